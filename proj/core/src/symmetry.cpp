#include "edent/symmetry.hpp"

#include <bit>
#include <cmath>

#include "edent/errors.hpp"

namespace edent {

namespace {

// Parity of the permutation sorting perm[] restricted to the occupied sites.
int channel_reorder_parity(std::uint32_t mask, const std::vector<int>& perm) {
  std::uint64_t seen = 0;
  int inv = 0;
  while (mask) {
    const int i = std::countr_zero(mask);
    mask &= mask - 1;
    const int k = perm[i];
    inv += std::popcount(seen >> (k + 1));
    seen |= std::uint64_t{1} << k;
  }
  return inv & 1;
}

std::uint32_t permute_mask(std::uint32_t mask, const std::vector<int>& perm) {
  std::uint32_t out = 0;
  while (mask) {
    const int i = std::countr_zero(mask);
    mask &= mask - 1;
    out |= 1u << perm[i];
  }
  return out;
}

// Applies annihilators (listed in operator order, rightmost acts first) to a
// mode occupation; returns the accumulated sign.
int annihilate_sequence(std::uint64_t& occ, const std::vector<int>& modes) {
  int sign = 1;
  for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
    const int m = *it;
    if (!(occ >> m & 1u)) return 0;
    if (std::popcount(occ & ((std::uint64_t{1} << m) - 1)) & 1) sign = -sign;
    occ &= ~(std::uint64_t{1} << m);
  }
  return sign;
}

// Raw phase of the conjugation on (up, dn) before the global normalization,
// with the image occupation written to (out_up, out_dn).
int eh_raw_sign(std::uint32_t up, std::uint32_t dn, int n, const std::vector<int>& phi,
                std::uint32_t& out_up, std::uint32_t& out_dn) {
  // prod_{a in up} phi_a c_{a,dn}  prod_{b in dn} phi_b c_{b,up}  acting on the
  // filled state (all up modes 0..n-1, then all down modes n..2n-1).
  std::vector<int> ops;
  int phase = 1;
  for (int a = 0; a < n; ++a)
    if (up >> a & 1u) {
      ops.push_back(n + a);
      phase *= phi[a];
    }
  for (int b = 0; b < n; ++b)
    if (dn >> b & 1u) {
      ops.push_back(b);
      phase *= phi[b];
    }
  const std::uint64_t filled = (std::uint64_t{1} << (2 * n)) - 1;
  std::uint64_t occ = filled;
  const int s = annihilate_sequence(occ, ops);
  out_up = static_cast<std::uint32_t>(occ & ((std::uint64_t{1} << n) - 1));
  out_dn = static_cast<std::uint32_t>(occ >> n);
  return s * phase;
}

std::shared_ptr<const BasisTable> upper_sector(const BasisTable& b) {
  Sector up = b.sector();
  up.twice_ms += 2;
  const int n = b.n_sites();
  bool reachable;
  if (is_fermionic(b.space()))
    reachable = up.twice_ms <= *up.n_electrons;
  else
    reachable = up.twice_ms <= n * twice_site_spin(b.space());
  if (!reachable) return std::make_shared<BasisTable>(n, b.space(), up, std::vector<std::uint64_t>{});
  return std::make_shared<BasisTable>(enumerate_sector(n, b.space(), up));
}

}  // namespace

SignedPermutation::SignedPermutation(std::vector<std::int32_t> target, std::vector<std::int8_t> sign)
    : target_(std::move(target)), sign_(std::move(sign)) {
  if (target_.size() != sign_.size()) throw ValidationError("SignedPermutation: size mismatch");
}

Vector SignedPermutation::apply(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != size())
    throw ValidationError("SignedPermutation::apply: length mismatch");
  Vector y(x.size());
  for (std::size_t i = 0; i < size(); ++i) y[target_[i]] = sign_[i] * x[static_cast<Eigen::Index>(i)];
  return y;
}

double SignedPermutation::expectation(const Vector& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += x[target_[i]] * sign_[i] * x[static_cast<Eigen::Index>(i)];
  return acc;
}

SignedPermutation site_permutation_operator(const BasisTable& basis, const std::vector<int>& perm) {
  const int n = basis.n_sites();
  if (static_cast<int>(perm.size()) != n) throw ValidationError("site permutation has wrong length");
  const std::size_t dim = basis.size();
  std::vector<std::int32_t> target(dim);
  std::vector<std::int8_t> sign(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto code = basis.state(i);
    std::uint64_t image;
    int s = 1;
    if (is_fermionic(basis.space())) {
      const auto up = basis.up_mask(code);
      const auto dn = basis.dn_mask(code);
      image = basis.encode(permute_mask(up, perm), permute_mask(dn, perm));
      if ((channel_reorder_parity(up, perm) + channel_reorder_parity(dn, perm)) & 1) s = -1;
    } else {
      image = 0;
      for (int site = 0; site < n; ++site)
        image |= std::uint64_t(spin_digit(code, site)) << (2 * perm[site]);
    }
    const auto j = basis.index_of(image);
    if (j < 0) throw ValidationError("site permutation leaves the sector");
    target[i] = static_cast<std::int32_t>(j);
    sign[i] = static_cast<std::int8_t>(s);
  }
  return {std::move(target), std::move(sign)};
}

std::string to_string(C2Convention c) { return c == C2Convention::fermionic ? "fermionic" : "sign_free"; }

C2Convention parse_c2_convention(const std::string& s) {
  if (s == "fermionic") return C2Convention::fermionic;
  if (s == "sign_free") return C2Convention::sign_free;
  throw ValidationError("unknown C2 convention '" + s + "' (expected fermionic or sign_free)");
}

SignedPermutation c2_operator(const Geometry& geometry, const BasisTable& basis, C2Convention convention) {
  if (!geometry.c2_map())
    throw ValidationError("geometry '" + geometry.name() + "' declares no C2 axis");
  if (geometry.n_sites() != basis.n_sites()) throw ValidationError("c2_operator: site count mismatch");
  auto op = site_permutation_operator(basis, *geometry.c2_map());
  if (convention == C2Convention::sign_free && is_fermionic(basis.space()) && basis.sector().n_electrons) {
    const int ne = *basis.sector().n_electrons;
    const int n_up = (ne + basis.sector().twice_ms) / 2;
    const int n_dn = (ne - basis.sector().twice_ms) / 2;
    if ((n_up * (n_up - 1) / 2 + n_dn * (n_dn - 1) / 2) % 2 != 0) {
      std::vector<std::int32_t> target(op.size());
      std::vector<std::int8_t> sign(op.size());
      for (std::size_t i = 0; i < op.size(); ++i) {
        target[i] = op.target(i);
        sign[i] = static_cast<std::int8_t>(-op.sign(i));
      }
      op = SignedPermutation(std::move(target), std::move(sign));
    }
  }
  return op;
}

SignedPermutation eh_operator(const Geometry& geometry, const BasisTable& basis) {
  const int n = basis.n_sites();
  if (!is_fermionic(basis.space())) throw ValidationError("electron-hole symmetry needs an electron basis");
  if (basis.sector().n_electrons.value_or(-1) != n)
    throw ValidationError("electron-hole symmetry needs a half-filled sector (N_e = n_sites)");
  auto phi = geometry.sublattice_signs();
  if (!phi) throw ValidationError("electron-hole symmetry needs a bipartite bond graph");

  // Covalent reference: alternate up/down from site 1, then flip the first
  // down spins to reach the sector's M_S.
  const int n_up = (n + basis.sector().twice_ms) / 2;
  std::uint32_t ref_up = 0;
  for (int i = 0; i < n; i += 2) ref_up |= 1u << i;
  for (int i = 1; std::popcount(ref_up) < n_up && i < n; i += 2) ref_up |= 1u << i;
  for (int i = n - 1; std::popcount(ref_up) > n_up && i >= 0; --i) ref_up &= ~(1u << i);
  const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1u);
  std::uint32_t ou, od;
  const int norm = eh_raw_sign(ref_up, all & ~ref_up, n, *phi, ou, od);

  const std::size_t dim = basis.size();
  std::vector<std::int32_t> target(dim);
  std::vector<std::int8_t> sign(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto code = basis.state(i);
    const int s = eh_raw_sign(basis.up_mask(code), basis.dn_mask(code), n, *phi, ou, od);
    const auto j = basis.index_of(basis.encode(ou, od));
    if (j < 0 || s == 0) throw ValidationError("electron-hole map leaves the sector");
    target[i] = static_cast<std::int32_t>(j);
    sign[i] = static_cast<std::int8_t>(s * norm);
  }
  return {std::move(target), std::move(sign)};
}

Vector apply_c2(const Vector& x, const Geometry& geometry, const BasisTable& basis, C2Convention convention) {
  return c2_operator(geometry, basis, convention).apply(x);
}

Vector apply_eh(const Vector& x, const Geometry& geometry, const BasisTable& basis) {
  return eh_operator(geometry, basis).apply(x);
}

SpinLadder::SpinLadder(std::shared_ptr<const BasisTable> basis)
    : basis_(std::move(basis)), upper_(upper_sector(*basis_)) {}

// Calls f(lower_index, <upper|S+_i|lower>) for every site i with S-_i
// non-vanishing on the upper state.
template <class F>
void SpinLadder::for_each_lowering(std::uint64_t code, F&& f) const {
  const int n = basis_->n_sites();
  if (is_fermionic(basis_->space())) {
    const auto up = upper_->up_mask(code);
    const auto dn = upper_->dn_mask(code);
    const int n_up_lower = std::popcount(up) - 1;
    for (int i = 0; i < n; ++i) {
      if (!(up >> i & 1u) || (dn >> i & 1u)) continue;
      const std::uint32_t lu = up & ~(1u << i);
      const std::uint32_t ld = dn | (1u << i);
      // S+_i = c+_{i,up} c_{i,dn} on the lower state (lu, ld).
      const int below_dn = std::popcount(ld & ((1u << i) - 1u));
      const int below_up = std::popcount(lu & ((1u << i) - 1u));
      const int parity = (n_up_lower + below_dn + below_up) & 1;
      const auto j = basis_->index_of(basis_->encode(lu, ld));
      f(static_cast<std::size_t>(j), parity ? -1.0 : 1.0);
    }
  } else {
    const int two_s = twice_site_spin(basis_->space());
    const int ss = two_s * (two_s + 2);
    for (int i = 0; i < n; ++i) {
      const int d = spin_digit(code, i);
      if (d == 0) continue;
      const int m_low = 2 * (d - 1) - two_s;  // twice m of the lower state
      const double c = 0.5 * std::sqrt(double(ss - m_low * (m_low + 2)));
      const auto j = basis_->index_of(with_spin_digit(code, i, d - 1));
      f(static_cast<std::size_t>(j), c);
    }
  }
}

Vector SpinLadder::raise(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != basis_->size()) throw ValidationError("SpinLadder::raise: length mismatch");
  const auto dim = static_cast<Eigen::Index>(upper_->size());
  Vector y = Vector::Zero(dim);
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < dim; ++k) {
    double acc = 0.0;
    for_each_lowering(upper_->state(static_cast<std::size_t>(k)), [&](std::size_t j, double c) { acc += c * x[j]; });
    y[k] = acc;
  }
  return y;
}

Vector SpinLadder::lower(const Vector& y) const {
  if (static_cast<std::size_t>(y.size()) != upper_->size()) throw ValidationError("SpinLadder::lower: length mismatch");
  Vector x = Vector::Zero(static_cast<Eigen::Index>(basis_->size()));
  // Scatter; serial so the summation order is fixed.
  for (std::size_t k = 0; k < upper_->size(); ++k) {
    const double yk = y[static_cast<Eigen::Index>(k)];
    if (yk == 0.0) continue;
    for_each_lowering(upper_->state(k), [&](std::size_t j, double c) { x[j] += c * yk; });
  }
  return x;
}

Vector SpinLadder::s_squared(const Vector& x) const {
  const double sz = 0.5 * basis_->sector().twice_ms;
  Vector out = (sz * sz + sz) * x;
  if (!upper_->empty()) out += lower(raise(x));
  return out;
}

double SpinLadder::expectation(const Vector& x) const {
  const double sz = 0.5 * basis_->sector().twice_ms;
  double s2 = (sz * sz + sz) * x.squaredNorm();
  if (!upper_->empty()) s2 += raise(x).squaredNorm();
  return s2;
}

SpinResult total_spin(const Vector& x, const SpinLadder& ladder, double tol) {
  SpinResult r;
  r.s_squared = ladder.expectation(x);
  // S = (-1 + sqrt(1 + 4 <S^2>)) / 2, rounded to the nearest half-integer.
  const double s = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, r.s_squared)));
  r.twice_s = static_cast<int>(std::lround(2.0 * s));
  const double S = 0.5 * r.twice_s;
  r.mixed = std::abs(r.s_squared - S * (S + 1.0)) > tol;
  return r;
}

SpinResult total_spin(const Vector& x, std::shared_ptr<const BasisTable> basis, double tol) {
  return total_spin(x, SpinLadder(std::move(basis)), tol);
}

std::string SymmetryLabel::to_string() const {
  std::string s = std::to_string(twice_s + 1) + "_";
  if (eh_parity == 0) return s + (c2_parity > 0 ? "A" : "B");
  return s + (c2_parity > 0 ? "Ag" : "Bu") + (eh_parity > 0 ? "+" : "-");
}

SymmetryLabel SymmetryLabel::parse(const std::string& text) {
  const auto us = text.find('_');
  if (us == std::string::npos || us == 0) throw ValidationError("bad symmetry label '" + text + "'");
  SymmetryLabel l;
  int mult = 0;
  try {
    mult = std::stoi(text.substr(0, us));
  } catch (const std::exception&) {
    throw ValidationError("bad spin multiplicity in label '" + text + "'");
  }
  if (mult < 1) throw ValidationError("bad spin multiplicity in label '" + text + "'");
  l.twice_s = mult - 1;
  const auto rest = text.substr(us + 1);
  if (rest == "Ag+" || rest == "Ag-" || rest == "Bu+" || rest == "Bu-") {
    l.c2_parity = rest[0] == 'A' ? 1 : -1;
    l.eh_parity = rest[2] == '+' ? 1 : -1;
  } else if (rest == "A" || rest == "B") {
    l.c2_parity = rest[0] == 'A' ? 1 : -1;
    l.eh_parity = 0;
  } else {
    throw ValidationError("bad symmetry label '" + text + "' (expected e.g. 1_Ag+, 3_Bu+, 1_A)");
  }
  return l;
}

SymmetryOps::SymmetryOps(const Geometry& geometry, std::shared_ptr<const BasisTable> basis,
                         C2Convention convention)
    : basis_(basis), convention_(convention), spin_(basis) {
  if (geometry.c2_map()) c2_ = c2_operator(geometry, *basis_, convention);
  if (is_fermionic(basis_->space()) && basis_->sector().n_electrons.value_or(-1) == basis_->n_sites() &&
      geometry.sublattice_signs())
    eh_ = eh_operator(geometry, *basis_);
}

Vector SymmetryOps::project(const Vector& x, int c2_parity, int eh_parity) const {
  Vector y = x;
  if (c2_parity != 0) {
    if (!c2_) throw ValidationError("project: no C2 operator on this geometry");
    y = 0.5 * (y + c2_parity * c2_->apply(y));
  }
  if (eh_parity != 0) {
    if (!eh_) throw ValidationError("project: electron-hole symmetry unavailable on this sector");
    y = 0.5 * (y + eh_parity * eh_->apply(y));
  }
  return y;
}

SymmetryLabel SymmetryOps::label(const Vector& x, double tol) const {
  SymmetryLabel l;
  const double nn = x.squaredNorm();
  auto parity = [&](const SignedPermutation& p) {
    const double e = p.expectation(x) / nn;
    if (std::abs(std::abs(e) - 1.0) > tol) return 0;
    return e > 0 ? 1 : -1;
  };
  l.c2_parity = c2_ ? parity(*c2_) : 0;
  l.eh_parity = eh_ ? parity(*eh_) : 0;
  l.twice_s = total_spin(x / std::sqrt(nn), spin_).twice_s;
  return l;
}

Vector project(const Vector& x, const SymmetryOps& ops, int c2_parity, int eh_parity) {
  return ops.project(x, c2_parity, eh_parity);
}

}  // namespace edent
