#include "edent/hamiltonian.hpp"

#include <algorithm>

#include "edent/errors.hpp"

namespace edent {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::huckel:
      return "huckel";
    case ModelKind::hubbard:
      return "hubbard";
    case ModelKind::ppp:
      return "ppp";
    case ModelKind::heisenberg:
      return "heisenberg";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "huckel") return ModelKind::huckel;
  if (s == "hubbard") return ModelKind::hubbard;
  if (s == "ppp") return ModelKind::ppp;
  if (s == "heisenberg") return ModelKind::heisenberg;
  throw ValidationError("unknown model kind '" + s + "' (expected huckel, hubbard, ppp, heisenberg)");
}

ModelSpec ModelSpec::ppp_standard() {
  ModelSpec m;
  m.kind = ModelKind::ppp;
  m.t = -2.4;
  m.U = 11.26;
  return m;
}

ModelSpec ModelSpec::hubbard(double t, double U) {
  ModelSpec m;
  m.kind = ModelKind::hubbard;
  m.t = t;
  m.U = U;
  return m;
}

ModelSpec ModelSpec::huckel(double t) {
  ModelSpec m;
  m.kind = ModelKind::huckel;
  m.t = t;
  m.U = 0.0;
  return m;
}

ModelSpec ModelSpec::heisenberg(double J, LocalSpace site_space) {
  ModelSpec m;
  m.kind = ModelKind::heisenberg;
  m.J = J;
  m.site_space = site_space;
  return m;
}

double ohno_potential(double U_i, double U_j, double r) {
  const double sum = U_i + U_j;
  if (!(sum > 0.0)) throw ValidationError("ohno_potential: U_i + U_j must be positive");
  if (!(r >= 0.0)) throw ValidationError("ohno_potential: r_ij must be non-negative");
  const double a = 28.794 / sum;
  return 14.397 / std::sqrt(a * a + r * r);
}

Hamiltonian::Hamiltonian(const Geometry& geometry, ModelSpec model, std::shared_ptr<const BasisTable> basis)
    : geometry_(geometry), model_(std::move(model)), basis_(std::move(basis)) {
  if (!basis_) throw ValidationError("Hamiltonian: null basis");
  const int n = geometry_.n_sites();
  if (basis_->n_sites() != n) throw ValidationError("Hamiltonian: basis and geometry disagree on site count");
  const bool spin_model = model_.kind == ModelKind::heisenberg;
  if (spin_model) {
    if (is_fermionic(model_.site_space))
      throw ValidationError("Hamiltonian: heisenberg needs site_space spin_half or spin_one");
    if (basis_->sector().n_electrons)
      throw ValidationError("Hamiltonian: heisenberg model given a sector with n_electrons");
    if (basis_->space() != model_.site_space)
      throw ValidationError("Hamiltonian: basis local space does not match the model's site spin");
  } else {
    if (!is_fermionic(basis_->space()) || !basis_->sector().n_electrons)
      throw ValidationError("Hamiltonian: " + to_string(model_.kind) + " needs an electron sector");
    if (!std::isfinite(model_.t) || !std::isfinite(model_.U))
      throw ValidationError("Hamiltonian: t and U must be finite");
    if (!model_.z.empty() && static_cast<int>(model_.z.size()) != n)
      throw ValidationError("Hamiltonian: z must list one occupancy per site");
  }

  for (auto [a, b] : geometry_.bonds()) {
    Bond bond{a, b, (1u << a) | (1u << b), 0u};
    const int lo = std::min(a, b), hi = std::max(a, b);
    bond.between_mask = ((1u << hi) - 1u) & ~((2u << lo) - 1u);
    bonds_.push_back(bond);
  }

  const std::size_t dim = basis_->size();
  diag_.assign(dim, 0.0);
  if (spin_model) {
    const int two_s = twice_site_spin(basis_->space());
    for (std::size_t i = 0; i < dim; ++i) {
      const auto code = basis_->state(i);
      double e = 0.0;
      for (const auto& bond : bonds_) {
        const int ma = 2 * spin_digit(code, bond.a) - two_s;
        const int mb = 2 * spin_digit(code, bond.b) - two_s;
        e += 0.25 * model_.J * ma * mb;
      }
      diag_[i] = e;
    }
    return;
  }

  const bool with_u = model_.kind != ModelKind::huckel;
  const bool with_v = model_.kind == ModelKind::ppp;
  std::vector<double> z(n, 1.0);
  if (!model_.z.empty()) z = model_.z;
  std::vector<double> V;
  if (with_v) {
    V.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        V[i * n + j] = ohno_potential(model_.U, model_.U, geometry_.distance(i, j));
  }
  std::vector<double> dq(n);
  for (std::size_t k = 0; k < dim; ++k) {
    const auto code = basis_->state(k);
    const auto up = basis_->up_mask(code);
    const auto dn = basis_->dn_mask(code);
    double e = 0.0;
    if (with_u) e += model_.U * std::popcount(up & dn);  // U/2 n(n-1) = U on doubly occupied sites
    if (with_v) {
      for (int i = 0; i < n; ++i) dq[i] = double((up >> i & 1u) + (dn >> i & 1u)) - z[i];
      for (int i = 0; i < n; ++i) {
        if (dq[i] == 0.0) continue;
        for (int j = 0; j < i; ++j) e += V[i * n + j] * dq[i] * dq[j];
      }
    }
    diag_[k] = e;
  }
}

void Hamiltonian::apply(const Vector& x, Vector& y) const {
  const auto dim = static_cast<Eigen::Index>(this->dim());
  if (x.size() != dim)
    throw ValidationError("Hamiltonian::apply: vector length " + std::to_string(x.size()) +
                          " does not match dimension " + std::to_string(dim));
  y.resize(dim);
  if (materialized()) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
      y[i] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < dim; ++i) {
    double acc = 0.0;
    for_each_in_row(static_cast<std::size_t>(i), [&](std::size_t j, double v) { acc += v * x[j]; });
    y[i] = acc;
  }
}

Vector Hamiltonian::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

void Hamiltonian::materialize() {
  if (materialized()) return;
  const std::size_t dim = this->dim();
  std::vector<std::size_t> ptr(dim + 1, 0);
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < dim; ++i) {
    for_each_in_row(i, [&](std::size_t j, double v) {
      cols.push_back(static_cast<std::int32_t>(j));
      vals.push_back(v);
    });
    ptr[i + 1] = cols.size();
  }
  row_ptr_ = std::move(ptr);
  cols_ = std::move(cols);
  vals_ = std::move(vals);
}

Matrix Hamiltonian::to_dense() const {
  const auto dim = static_cast<Eigen::Index>(this->dim());
  Matrix h = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for_each_in_row(static_cast<std::size_t>(i), [&](std::size_t j, double v) { h(i, static_cast<Eigen::Index>(j)) += v; });
  return h;
}

double Hamiltonian::norm_bound() const {
  double best = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    double row = 0.0;
    for_each_in_row(i, [&](std::size_t, double v) { row += std::abs(v); });
    best = std::max(best, row);
  }
  return best;
}

}  // namespace edent
