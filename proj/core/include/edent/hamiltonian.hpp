#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "edent/basis.hpp"
#include "edent/lattice.hpp"

namespace edent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ModelKind { huckel, hubbard, ppp, heisenberg };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

/// Model parameters. Electronic energies are in eV; the Heisenberg J is in
/// whatever unit the caller picks (default 1).
///
///   H = -sum_<ij>,s t (c+_is c_js + h.c.) + sum_i U/2 n_i (n_i - 1)
///       + sum_{i>j} V_ij (n_i - z_i)(n_j - z_j)          (ppp only)
///   H = sum_<ij> J S_i . S_j                               (heisenberg)
struct ModelSpec {
  ModelKind kind = ModelKind::hubbard;
  double t = -1.0;
  double U = 4.0;
  std::vector<double> z;  ///< per-site neutral occupancy; empty means all 1
  double J = 1.0;
  LocalSpace site_space = LocalSpace::spin_half;  ///< heisenberg only

  LocalSpace local_space() const {
    return kind == ModelKind::heisenberg ? site_space : LocalSpace::electron;
  }
  /// Standard conjugated-pi parameters: t = -2.4 eV, U = 11.26 eV.
  static ModelSpec ppp_standard();
  static ModelSpec hubbard(double t, double U);
  static ModelSpec huckel(double t);
  static ModelSpec heisenberg(double J, LocalSpace site_space);
};

/// Ohno interpolation V = 14.397 / sqrt((28.794 / (U_i + U_j))^2 + r^2), eV
/// with r in Å.
double ohno_potential(double U_i, double U_j, double r);

/// Sector-restricted Hamiltonian, applied matrix-free unless materialized.
class Hamiltonian {
 public:
  Hamiltonian(const Geometry& geometry, ModelSpec model, std::shared_ptr<const BasisTable> basis);

  std::size_t dim() const noexcept { return basis_->size(); }
  const BasisTable& basis() const noexcept { return *basis_; }
  std::shared_ptr<const BasisTable> basis_ptr() const noexcept { return basis_; }
  const Geometry& geometry() const noexcept { return geometry_; }
  const ModelSpec& model() const noexcept { return model_; }

  double diagonal(std::size_t i) const { return diag_[i]; }

  /// Calls f(column, value) for every structurally non-zero element of the
  /// row, diagonal included. Duplicates are not merged.
  template <class F>
  void for_each_in_row(std::size_t row, F&& f) const;

  /// y = H x; throws ValidationError on length mismatch.
  void apply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const;

  /// Stores the operator as CSR so later applies skip state decoding.
  void materialize();
  bool materialized() const noexcept { return !row_ptr_.empty(); }

  Matrix to_dense() const;
  /// Max absolute row sum (Gershgorin bound on the spectral radius).
  double norm_bound() const;

 private:
  Geometry geometry_;
  ModelSpec model_;
  std::shared_ptr<const BasisTable> basis_;
  std::vector<double> diag_;
  struct Bond {
    int a, b;
    std::uint32_t pair_mask;
    std::uint32_t between_mask;
  };
  std::vector<Bond> bonds_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
};

// Fermionic hop between bonded sites within one spin channel: the sign is the
// parity of same-channel electrons strictly between the two sites.
template <class F>
void Hamiltonian::for_each_in_row(std::size_t row, F&& f) const {
  const std::uint64_t code = basis_->state(row);
  f(row, diag_[row]);
  if (is_fermionic(basis_->space())) {
    const std::uint32_t up = basis_->up_mask(code);
    const std::uint32_t dn = basis_->dn_mask(code);
    const double amp = -model_.t;
    for (const auto& bond : bonds_) {
      const std::uint32_t ub = up & bond.pair_mask;
      if (ub != 0 && ub != bond.pair_mask) {
        const std::uint32_t nu = up ^ bond.pair_mask;
        const double s = (std::popcount(up & bond.between_mask) & 1) ? -amp : amp;
        f(static_cast<std::size_t>(basis_->index_of(basis_->encode(nu, dn))), s);
      }
      const std::uint32_t db = dn & bond.pair_mask;
      if (db != 0 && db != bond.pair_mask) {
        const std::uint32_t nd = dn ^ bond.pair_mask;
        const double s = (std::popcount(dn & bond.between_mask) & 1) ? -amp : amp;
        f(static_cast<std::size_t>(basis_->index_of(basis_->encode(up, nd))), s);
      }
    }
  } else {
    const int two_s = twice_site_spin(basis_->space());
    // J/2 (S+_a S-_b + S-_a S+_b); with twice-values the element is
    // J/2 * sqrt((2s(2s+2) - 2m_a(2m_a+2)) (2s(2s+2) - 2m_b(2m_b-2))) / 4.
    const int ss = two_s * (two_s + 2);
    for (const auto& bond : bonds_) {
      const int da = spin_digit(code, bond.a);
      const int db = spin_digit(code, bond.b);
      const int ma = 2 * da - two_s;
      const int mb = 2 * db - two_s;
      if (da < two_s && db > 0) {
        const double c = 0.125 * model_.J * std::sqrt(double((ss - ma * (ma + 2)) * (ss - mb * (mb - 2))));
        const auto nc = with_spin_digit(with_spin_digit(code, bond.a, da + 1), bond.b, db - 1);
        f(static_cast<std::size_t>(basis_->index_of(nc)), c);
      }
      if (da > 0 && db < two_s) {
        const double c = 0.125 * model_.J * std::sqrt(double((ss - ma * (ma - 2)) * (ss - mb * (mb + 2))));
        const auto nc = with_spin_digit(with_spin_digit(code, bond.a, da - 1), bond.b, db + 1);
        f(static_cast<std::size_t>(basis_->index_of(nc)), c);
      }
    }
  }
}

}  // namespace edent
