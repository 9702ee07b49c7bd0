#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edent/basis.hpp"
#include "edent/hamiltonian.hpp"
#include "edent/lattice.hpp"

namespace edent {

/// Operator that maps basis state i to sign[i] * basis state target[i].
class SignedPermutation {
 public:
  SignedPermutation() = default;
  SignedPermutation(std::vector<std::int32_t> target, std::vector<std::int8_t> sign);

  std::size_t size() const noexcept { return target_.size(); }
  std::int32_t target(std::size_t i) const { return target_[i]; }
  std::int8_t sign(std::size_t i) const { return sign_[i]; }

  Vector apply(const Vector& x) const;
  /// <x, P x>
  double expectation(const Vector& x) const;

 private:
  std::vector<std::int32_t> target_;
  std::vector<std::int8_t> sign_;
};

/// Site permutation acting on a sector. Electron states pick up the parity of
/// reordering the permuted creation operators within each spin channel.
SignedPermutation site_permutation_operator(const BasisTable& basis, const std::vector<int>& perm);

/// Phase convention of the C2 operator on electron sectors.
///
/// `fermionic` is the genuine operator c+_{i,s} -> c+_{P(i),s}; it commutes
/// with S+ and S-, so every M_S component of a multiplet shares one parity.
/// `sign_free` multiplies it by the sector constant
/// (-1)^{n_up (n_up - 1)/2 + n_dn (n_dn - 1)/2}; for chain reversal that is
/// the plain permutation of occupation patterns with no reordering sign. At
/// half filling the two agree for 2M_S = 0 and differ by -1 for 2M_S = 2.
enum class C2Convention { fermionic, sign_free };
std::string to_string(C2Convention c);
C2Convention parse_c2_convention(const std::string& s);

/// C2 of the geometry; throws ValidationError when none is declared.
SignedPermutation c2_operator(const Geometry& geometry, const BasisTable& basis,
                              C2Convention convention = C2Convention::fermionic);

/// Electron-hole conjugation c+_{i,s} -> phi_i c_{i,-s} with phi_i the
/// sublattice sign ((-1)^i along a chain, site 1 odd). Preserves (N_e, M_S)
/// at half filling; the overall phase makes a covalent (one electron per
/// site) reference configuration map onto itself with coefficient +1, which
/// then holds for every covalent configuration of the sector.
SignedPermutation eh_operator(const Geometry& geometry, const BasisTable& basis);

/// Single-application conveniences.
Vector apply_c2(const Vector& x, const Geometry& geometry, const BasisTable& basis,
                C2Convention convention = C2Convention::fermionic);
Vector apply_eh(const Vector& x, const Geometry& geometry, const BasisTable& basis);

/// S+ / S- between a sector and the one with 2M_S + 2, plus S^2 within the
/// sector.
class SpinLadder {
 public:
  explicit SpinLadder(std::shared_ptr<const BasisTable> basis);

  const BasisTable& basis() const noexcept { return *basis_; }
  const BasisTable& upper() const noexcept { return *upper_; }

  Vector raise(const Vector& x) const;  ///< M -> M+1
  Vector lower(const Vector& y) const;  ///< M+1 -> M
  Vector s_squared(const Vector& x) const;
  /// <x|S^2|x> = Sz^2 + Sz + |S+ x|^2 for normalized x.
  double expectation(const Vector& x) const;

 private:
  template <class F>
  void for_each_lowering(std::uint64_t upper_code, F&& f) const;

  std::shared_ptr<const BasisTable> basis_;
  std::shared_ptr<const BasisTable> upper_;
};

struct SpinResult {
  double s_squared = 0.0;
  int twice_s = 0;     ///< nearest S with S(S+1) closest to <S^2>
  bool mixed = false;  ///< <S^2> further than tol from every S(S+1)
};

SpinResult total_spin(const Vector& x, const SpinLadder& ladder, double tol = 1e-6);
SpinResult total_spin(const Vector& x, std::shared_ptr<const BasisTable> basis, double tol = 1e-6);

/// Symmetry label: parities are +1/-1, or 0 when the operator is not defined
/// on the sector (eh away from half filling or on non-bipartite clusters).
struct SymmetryLabel {
  int c2_parity = 1;
  int eh_parity = 0;
  int twice_s = 0;

  /// "1_Ag+", "3_Bu+", "1_Bu-"; without electron-hole parity "1_A" / "3_B".
  std::string to_string() const;
  static SymmetryLabel parse(const std::string& text);
  friend bool operator==(const SymmetryLabel&, const SymmetryLabel&) = default;
};

/// Symmetry operators available on one sector.
class SymmetryOps {
 public:
  SymmetryOps(const Geometry& geometry, std::shared_ptr<const BasisTable> basis,
              C2Convention convention = C2Convention::fermionic);

  const BasisTable& basis() const noexcept { return *basis_; }
  C2Convention c2_convention() const noexcept { return convention_; }
  bool has_c2() const noexcept { return c2_.has_value(); }
  bool has_eh() const noexcept { return eh_.has_value(); }
  const SignedPermutation& c2() const { return c2_.value(); }
  const SignedPermutation& eh() const { return eh_.value(); }
  const SpinLadder& spin() const noexcept { return spin_; }

  /// 1/4 (1 + c C2)(1 + e J); a zero parity skips that factor.
  Vector project(const Vector& x, int c2_parity, int eh_parity) const;

  /// Parities from expectation values; a parity whose |<P>| misses 1 by more
  /// than tol is reported as 0 (not an eigenstate).
  SymmetryLabel label(const Vector& x, double tol = 1e-6) const;

 private:
  std::shared_ptr<const BasisTable> basis_;
  C2Convention convention_;
  std::optional<SignedPermutation> c2_;
  std::optional<SignedPermutation> eh_;
  SpinLadder spin_;
};

/// Projection onto the requested parities (spec-level convenience).
Vector project(const Vector& x, const SymmetryOps& ops, int c2_parity, int eh_parity);

}  // namespace edent
