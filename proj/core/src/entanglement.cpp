#include "edent/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "edent/errors.hpp"

namespace edent {

namespace {

void check_normalized(const Vector& v, const BasisTable& basis) {
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw ValidationError("entanglement: vector length " + std::to_string(v.size()) + " does not match basis size " +
                          std::to_string(basis.size()));
  const double n2 = v.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-10)
    throw ValidationError("entanglement: unnormalized input (<v|v> = " + std::to_string(n2) + ")");
}

double log2_block_fock(const BasisTable& basis, std::size_t sites) {
  const double local = is_fermionic(basis.space()) ? 4.0 : double(twice_site_spin(basis.space()) + 1);
  return static_cast<double>(sites) * std::log2(local);
}

// Coefficient block of sector s for every column of `vs`, stacked
// horizontally and scaled by `scale`.
std::vector<Matrix> coefficient_blocks(const Matrix& vs, const BipartiteIndex& idx, double scale) {
  std::vector<Matrix> blocks(idx.sectors.size());
  const auto g = vs.cols();
  for (std::size_t s = 0; s < blocks.size(); ++s) blocks[s] = Matrix::Zero(idx.left_dim[s], idx.right_dim[s] * g);
  for (Eigen::Index c = 0; c < g; ++c)
    for (std::size_t i = 0; i < idx.sector_of.size(); ++i) {
      const double a = vs(static_cast<Eigen::Index>(i), c);
      if (a == 0.0) continue;
      const auto s = static_cast<std::size_t>(idx.sector_of[i]);
      blocks[s](idx.left_index[i], c * idx.right_dim[s] + idx.right_index[i]) = scale * idx.sign[i] * a;
    }
  return blocks;
}

std::vector<double> squared_singular_values(const Matrix& c) {
  if (c.size() == 0) return {};
  auto squares = [](const Vector& sv) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i) w.push_back(sv[i] * sv[i]);
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
  };
  // Eigen 3.4.0's divide-and-conquer SVD can return wrong values on blocks
  // with zero rows or columns; small blocks go straight to Jacobi and large
  // ones fall back to it when the squared values miss the Frobenius norm.
  if (std::min(c.rows(), c.cols()) <= 128) return squares(Eigen::JacobiSVD<Matrix>(c).singularValues());
  auto w = squares(Eigen::BDCSVD<Matrix>(c).singularValues());
  const double norm2 = c.squaredNorm();
  if (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - norm2) > 1e-12 * std::max(norm2, 1.0))
    w = squares(Eigen::JacobiSVD<Matrix>(c).singularValues());
  return w;
}

RDMSpectrum assemble(const std::vector<Matrix>& blocks, const BipartiteIndex& idx, const BasisTable& basis) {
  RDMSpectrum out;
  out.log2_left_fock = log2_block_fock(basis, idx.cut.left.size());
  out.log2_right_fock = log2_block_fock(basis, idx.cut.right.size());
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    SectorSpectrum sec;
    sec.sector = idx.sectors[s];
    sec.weights = squared_singular_values(blocks[s]);
    sec.partial_entropy = entropy_bits(sec.weights);
    out.entropy += sec.partial_entropy;
    out.sectors.push_back(std::move(sec));
  }
  return out;
}

std::vector<double> gram_eigenvalues(const Matrix& g) {
  if (g.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  std::vector<double> w(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (auto& x : w) x = std::max(x, 0.0);
  return w;
}

double binary_entropy(double nu) {
  double s = 0.0;
  if (nu > kWeightFloor) s -= nu * std::log2(nu);
  if (1.0 - nu > kWeightFloor) s -= (1.0 - nu) * std::log2(1.0 - nu);
  return s;
}

}  // namespace

double entropy_bits(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights)
    if (w >= kWeightFloor) s -= w * std::log2(w);
  return s;
}

double RDMSpectrum::total_weight() const {
  double t = 0.0;
  for (const auto& s : sectors)
    for (double w : s.weights) t += w;
  return t;
}

std::vector<double> RDMSpectrum::all_weights() const {
  std::vector<double> w;
  for (const auto& s : sectors) w.insert(w.end(), s.weights.begin(), s.weights.end());
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

RDMSpectrum schmidt_spectrum(const Vector& v, const BasisTable& basis, const BipartiteIndex& index) {
  check_normalized(v, basis);
  return assemble(coefficient_blocks(v, index, 1.0), index, basis);
}

RDMSpectrum schmidt_spectrum(const Vector& v, const BasisTable& basis, const Bipartition& cut) {
  check_normalized(v, basis);
  return schmidt_spectrum(v, basis, bipartite_factorize(basis, cut));
}

TwoSidedEntropy entropy_both_sides(const Vector& v, const BasisTable& basis, const Bipartition& cut) {
  check_normalized(v, basis);
  const auto idx = bipartite_factorize(basis, cut);
  TwoSidedEntropy out;
  for (const auto& c : coefficient_blocks(v, idx, 1.0)) {
    auto l = gram_eigenvalues(c * c.transpose());
    auto r = gram_eigenvalues(c.transpose() * c);
    out.left_weights.insert(out.left_weights.end(), l.begin(), l.end());
    out.right_weights.insert(out.right_weights.end(), r.begin(), r.end());
  }
  std::sort(out.left_weights.begin(), out.left_weights.end(), std::greater<>());
  std::sort(out.right_weights.begin(), out.right_weights.end(), std::greater<>());
  out.left = entropy_bits(out.left_weights);
  out.right = entropy_bits(out.right_weights);
  return out;
}

std::vector<SectorEntropy> sector_table(const RDMSpectrum& spectrum) {
  std::vector<SectorEntropy> rows;
  for (const auto& s : spectrum.sectors) rows.push_back({s.sector, s.partial_entropy});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SectorEntropy& a, const SectorEntropy& b) { return a.partial_entropy > b.partial_entropy; });
  return rows;
}

std::vector<SectorEntropy> sector_table(const Vector& v, const BasisTable& basis, const Bipartition& cut) {
  return sector_table(schmidt_spectrum(v, basis, cut));
}

DecadeHistogram decade_histogram(const std::vector<double>& weights) {
  DecadeHistogram n{};
  for (double w : weights) {
    if (!(w >= kWeightFloor)) continue;
    // Smallest p with w >= 10^-(p+1), checked against exact powers so that
    // w = 10^-p lands in bin p - 1.
    int p = static_cast<int>(std::floor(-std::log10(w)));
    p = std::clamp(p, 0, 15);
    while (p > 0 && w >= std::pow(10.0, -p)) --p;
    while (p < 15 && w < std::pow(10.0, -(p + 1))) ++p;
    ++n[static_cast<std::size_t>(p)];
  }
  return n;
}

DecadeHistogram decade_histogram(const RDMSpectrum& spectrum) { return decade_histogram(spectrum.all_weights()); }

RDMSpectrum degenerate_average(const Matrix& members, const BasisTable& basis, const Bipartition& cut) {
  const auto g = members.cols();
  if (g == 0) throw ValidationError("degenerate_average: empty manifold (g = 0)");
  if (static_cast<std::size_t>(members.rows()) != basis.size())
    throw ValidationError("degenerate_average: member length does not match basis size");
  const double err = (members.transpose() * members - Matrix::Identity(g, g)).cwiseAbs().maxCoeff();
  if (err > 1e-8)
    throw ValidationError("degenerate_average: members are not orthonormal (error " + std::to_string(err) + ")");
  // rho_av = (1/g) sum C_i C_i^T is the Gram matrix of [C_1 .. C_g] / sqrt(g).
  const auto idx = bipartite_factorize(basis, cut);
  return assemble(coefficient_blocks(members, idx, 1.0 / std::sqrt(double(g))), idx, basis);
}

RDMSpectrum degenerate_average(const DegenerateManifold& manifold, const EigenSet& set, const BasisTable& basis,
                               const Bipartition& cut) {
  Matrix m(set.vectors.rows(), static_cast<Eigen::Index>(manifold.members.size()));
  for (std::size_t c = 0; c < manifold.members.size(); ++c)
    m.col(static_cast<Eigen::Index>(c)) = set.vectors.col(static_cast<Eigen::Index>(manifold.members[c]));
  return degenerate_average(m, basis, cut);
}

double free_fermion_oracle(const Geometry& geometry, double t, const Bipartition& cut, const Sector& sector) {
  const int n = geometry.n_sites();
  cut.validate(n);
  if (!sector.n_electrons) throw ValidationError("free_fermion_oracle: sector needs an electron count");
  validate_sector(n, LocalSpace::electron, sector);
  const int n_up = (*sector.n_electrons + sector.twice_ms) / 2;
  const int n_dn = (*sector.n_electrons - sector.twice_ms) / 2;

  Matrix h = Matrix::Zero(n, n);
  for (auto [a, b] : geometry.bonds()) h(a, b) = h(b, a) = -t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector& eps = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(t));

  double s = 0.0;
  for (int filled : {n_up, n_dn}) {
    if (filled > 0 && filled < n && std::abs(eps[filled] - eps[filled - 1]) <= 1e-9 * scale)
      throw ValidationError("free_fermion_oracle: degenerate one-body levels at the Fermi energy (filling " +
                            std::to_string(filled) + " of " + std::to_string(n) +
                            "); the ground state is not unique, so an explicit orbital filling rule is required");
    const Matrix occ = es.eigenvectors().leftCols(filled);
    Matrix c(cut.left.size(), cut.left.size());
    for (std::size_t a = 0; a < cut.left.size(); ++a)
      for (std::size_t b = 0; b < cut.left.size(); ++b)
        c(a, b) = occ.row(cut.left[a]).dot(occ.row(cut.left[b]));
    Eigen::SelfAdjointEigenSolver<Matrix> cs(c, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < cs.eigenvalues().size(); ++i)
      s += binary_entropy(std::clamp(cs.eigenvalues()[i], 0.0, 1.0));
  }
  return s;
}

}  // namespace edent
