#include "edent/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "edent/errors.hpp"

namespace edent {

namespace {

// Uniform in [-1, 1) from the top 53 bits; identical on every platform.
void fill_random(Vector& v, std::mt19937_64& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::ldexp(static_cast<double>(rng() >> 11), -52) - 1.0;
}

// Two passes of classical Gram-Schmidt against the first `cols` columns of V.
void orthogonalize(const Matrix& V, Eigen::Index cols, Vector& w) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector h = V.leftCols(cols).transpose() * w;
    w.noalias() -= V.leftCols(cols) * h;
  }
}

EigenSet sorted_eigenset(const Eigen::SelfAdjointEigenSolver<Matrix>& es) {
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
  EigenSet out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

}  // namespace

EigenSet dense_spectrum(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  EigenSet out = sorted_eigenset(es);
  out.residuals.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.residuals[i] = (symmetric * out.vectors.col(idx) - out.values[idx] * out.vectors.col(idx)).norm();
  }
  return out;
}

EigenSet dense_spectrum(const Hamiltonian& h, std::size_t cap) {
  if (h.dim() > cap)
    throw ValidationError("dense_spectrum: dimension " + std::to_string(h.dim()) + " exceeds the dense cap " +
                          std::to_string(cap) + "; use lanczos_lowest for extremal states");
  if (h.dim() == 0) throw ValidationError("dense_spectrum: empty sector");
  return dense_spectrum(h.to_dense());
}

EigenSet lanczos_lowest(const LinearOperator& op, std::size_t dim, int k, const LanczosOptions& opts) {
  if (k < 1) throw ValidationError("lanczos_lowest: k must be >= 1");
  if (dim == 0) throw ValidationError("lanczos_lowest: empty operator");
  if (static_cast<std::size_t>(k) > dim)
    throw ValidationError("lanczos_lowest: k exceeds the dimension " + std::to_string(dim));

  const auto n = static_cast<Eigen::Index>(dim);
  const int block = opts.block_size > 0 ? opts.block_size : (k == 1 ? 1 : std::min(k, 8));
  int cap = opts.max_basis > 0 ? opts.max_basis : std::max(40, 2 * (k + block) + 20);
  cap = std::max(cap, k + 2 * block);
  cap = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cap), dim));

  std::mt19937_64 rng(opts.seed);
  Matrix V(n, cap + block);
  Matrix T = Matrix::Zero(cap + block, cap + block);
  Eigen::Index m = 0;  // expanded columns
  double scale = 1.0;

  // Appends fresh random directions after column `at`; returns how many fit.
  auto fresh = [&](Eigen::Index at, int want) {
    int got = 0;
    Vector w(n);
    for (int attempt = 0; got < want && attempt < 4 * want + 4; ++attempt) {
      fill_random(w, rng);
      if (opts.filter) opts.filter(w);
      const double n0 = w.norm();
      if (!(n0 > 1e-12)) continue;
      orthogonalize(V, at + got, w);
      const double n1 = w.norm();
      if (n1 <= 1e-8 * n0) continue;
      V.col(at + got) = w / n1;
      ++got;
    }
    return got;
  };

  int pending = fresh(0, block);
  if (pending == 0) throw ValidationError("lanczos_lowest: the filtered subspace is empty");

  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart <= opts.max_restarts;) {
    // Expand the pending block.
    const Eigen::Index tot = m + pending;
    Matrix W(n, pending);
    Vector y(n);
    for (int j = 0; j < pending; ++j) {
      op(V.col(m + j), y);
      if (opts.filter) opts.filter(y);
      W.col(j) = y;
    }
    Matrix H = V.leftCols(tot).transpose() * W;
    W.noalias() -= V.leftCols(tot) * H;
    const Matrix H2 = V.leftCols(tot).transpose() * W;
    W.noalias() -= V.leftCols(tot) * H2;
    H += H2;
    T.block(0, m, tot, pending) = H;
    T.block(m, 0, pending, tot) = H.transpose();
    const Matrix D = H.bottomRows(pending);
    T.block(m, m, pending, pending) = 0.5 * (D + D.transpose());
    const int expanded = pending;
    m = tot;
    scale = std::max(scale, T.diagonal().head(m).cwiseAbs().maxCoeff());

    // W = R B with R orthonormal and orthogonal to V; vanishing directions
    // are dropped (invariant subspace) and refilled with random vectors.
    Matrix B = Matrix::Zero(expanded, expanded);
    int accepted = 0;
    for (int j = 0; j < expanded; ++j) {
      Vector w = W.col(j);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < accepted; ++i) {
          const double c = V.col(m + i).dot(w);
          B(i, j) += c;
          w -= c * V.col(m + i);
        }
      const double nrm = w.norm();
      if (nrm > 1e-13 * scale && m + accepted < cap + block) {
        V.col(m + accepted) = w / nrm;
        B(accepted, j) = nrm;
        ++accepted;
      }
    }
    const Matrix coupling = B.topRows(accepted);
    if (accepted < expanded && m + accepted < n) accepted += fresh(m + accepted, expanded - accepted);
    accepted = static_cast<int>(std::min<Eigen::Index>(accepted, n - m));

    // Rayleigh-Ritz on the expanded basis.
    Eigen::SelfAdjointEigenSolver<Matrix> es(T.topLeftCorner(m, m));
    const Vector theta = es.eigenvalues();
    const Matrix S = es.eigenvectors();
    const int kk = static_cast<int>(std::min<Eigen::Index>(k, m));
    bool all_small = kk == k;
    double worst = 0.0;
    for (int i = 0; i < kk; ++i) {
      double est = 0.0;
      if (coupling.rows() > 0) est = (coupling * S.block(m - expanded, i, expanded, 1)).norm();
      worst = std::max(worst, est);
      if (est > 0.5 * opts.tol) all_small = false;
    }
    best = std::min(best, worst);

    if (all_small || accepted == 0) {
      EigenSet out;
      out.values = theta.head(kk);
      out.vectors = V.leftCols(m) * S.leftCols(kk);
      out.residuals.resize(kk);
      bool ok = true;
      for (int i = 0; i < kk; ++i) {
        Vector v = out.vectors.col(i);
        v.normalize();
        out.vectors.col(i) = v;
        op(v, y);
        out.residuals[i] = (y - out.values[i] * v).norm();
        if (out.residuals[i] > opts.tol) ok = false;
      }
      if (kk < k)
        throw ValidationError("lanczos_lowest: the (filtered) space has only " + std::to_string(kk) +
                              " states, fewer than k = " + std::to_string(k));
      if (ok) return out;
      if (accepted == 0) {
        // Exhausted space but residuals did not verify: restart from Ritz vectors.
        accepted = fresh(m, 1);
        if (accepted == 0) return out;
      }
    }

    pending = accepted;
    if (m + pending > cap) {
      const Eigen::Index keep = std::min<Eigen::Index>(m - 1, std::max<Eigen::Index>(k + block, cap / 2));
      const Matrix Y = V.leftCols(m) * S.leftCols(keep);
      const Matrix R = V.middleCols(m, pending);
      V.leftCols(keep) = Y;
      V.middleCols(keep, pending) = R;
      T.setZero();
      T.diagonal().head(keep) = theta.head(keep);
      m = keep;
      ++restart;
    }
  }
  throw ConvergenceError("lanczos_lowest: no convergence after " + std::to_string(opts.max_restarts) +
                             " restarts (best residual estimate " + std::to_string(best) + ")",
                         best);
}

EigenSet lanczos_lowest(const Hamiltonian& h, int k, const LanczosOptions& opts) {
  return lanczos_lowest([&h](const Vector& x, Vector& y) { h.apply(x, y); }, h.dim(), k, opts);
}

EigenSet lowest_in_label(const Hamiltonian& h, const SymmetryOps& ops, const SymmetryLabel& label, int k,
                         const LanczosOptions& opts) {
  const auto& basis = h.basis();
  if (basis.sector().twice_ms != label.twice_s)
    throw ValidationError("lowest_in_label: sector 2M_S = " + std::to_string(basis.sector().twice_ms) +
                          " but label " + label.to_string() + " needs 2M_S = 2S = " + std::to_string(label.twice_s));
  if (label.c2_parity != 0 && !ops.has_c2()) throw ValidationError("lowest_in_label: geometry has no C2 axis");
  if (label.eh_parity != 0 && !ops.has_eh())
    throw ValidationError("lowest_in_label: electron-hole symmetry unavailable (needs half filling, bipartite bonds)");

  const double S = 0.5 * label.twice_s;
  const double target = S * (S + 1.0);
  const auto& m = h.model();
  double lambda = std::max({std::abs(m.t), std::abs(m.J), 0.25});
  if (m.kind == ModelKind::heisenberg) lambda = std::max(std::abs(m.J), 0.25);

  LanczosOptions o = opts;
  o.filter = [&](Vector& x) { x = ops.project(x, label.c2_parity, label.eh_parity); };

  for (int attempt = 0; attempt < 6; ++attempt, lambda *= 4.0) {
    auto op = [&](const Vector& x, Vector& y) {
      h.apply(x, y);
      if (label.twice_s + 2 <= basis.n_sites() * twice_site_spin(basis.space()) || is_fermionic(basis.space()))
        y += lambda * (ops.spin().s_squared(x) - target * x);
    };
    EigenSet raw;
    try {
      raw = lanczos_lowest(op, h.dim(), k, o);
    } catch (const ValidationError& e) {
      throw ValidationError("lowest_in_label: symmetry subspace " + label.to_string() + ": " + e.what());
    }
    bool spins_ok = true;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto sr = total_spin(raw.vectors.col(static_cast<Eigen::Index>(i)), ops.spin());
      if (sr.mixed || sr.twice_s != label.twice_s) spins_ok = false;
    }
    if (!spins_ok) continue;

    EigenSet out;
    out.values.resize(k);
    out.vectors = raw.vectors;
    out.residuals.resize(k);
    Vector y;
    for (int i = 0; i < k; ++i) {
      const Vector v = out.vectors.col(i);
      h.apply(v, y);
      out.values[i] = v.dot(y);
      out.residuals[i] = (y - out.values[i] * v).norm();
    }
    return out;
  }
  throw ConvergenceError("lowest_in_label: could not isolate spin " + std::to_string(S) + " states for " +
                             label.to_string(),
                         0.0);
}

EigenSet lowest_in_label(const Geometry& geometry, const ModelSpec& model, const SymmetryLabel& label, int k,
                         const LanczosOptions& opts, C2Convention convention) {
  const LocalSpace space = model.local_space();
  Sector sector{std::nullopt, label.twice_s};
  if (is_fermionic(space)) sector.n_electrons = geometry.n_sites();
  auto basis = std::make_shared<const BasisTable>(enumerate_sector(geometry, space, sector));
  Hamiltonian h(geometry, model, basis);
  SymmetryOps ops(geometry, basis, convention);
  return lowest_in_label(h, ops, label, k, opts);
}

EigenSet subspace_spectrum(const Hamiltonian& h, const SymmetryOps& ops, int c2_parity, int eh_parity,
                           std::optional<int> twice_s, std::size_t cap) {
  const std::size_t dim = h.dim();
  if (c2_parity != 0 && !ops.has_c2()) throw ValidationError("subspace_spectrum: no C2 operator");
  if (eh_parity != 0 && !ops.has_eh()) throw ValidationError("subspace_spectrum: no electron-hole operator");

  // Symmetry-adapted orthonormal basis: one projected vector per orbit.
  std::vector<std::int32_t> column(dim, -1);
  std::vector<double> coeff(dim, 0.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> cols;
  std::vector<char> seen(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (seen[i]) continue;
    std::vector<std::pair<std::size_t, double>> acc{{i, 1.0}};
    auto act = [&](const SignedPermutation& p, int parity) {
      std::vector<std::pair<std::size_t, double>> next = acc;
      for (auto [j, c] : acc) next.emplace_back(static_cast<std::size_t>(p.target(j)), parity * p.sign(j) * c);
      acc = std::move(next);
    };
    if (c2_parity != 0) act(ops.c2(), c2_parity);
    if (eh_parity != 0) act(ops.eh(), eh_parity);
    std::sort(acc.begin(), acc.end());
    std::vector<std::pair<std::size_t, double>> merged;
    for (auto [j, c] : acc) {
      if (!merged.empty() && merged.back().first == j)
        merged.back().second += c;
      else
        merged.emplace_back(j, c);
    }
    double norm2 = 0.0;
    for (auto [j, c] : merged) {
      seen[j] = 1;
      norm2 += c * c;
    }
    if (norm2 < 1e-12) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<std::pair<std::size_t, double>> col;
    for (auto [j, c] : merged) {
      if (c == 0.0) continue;
      column[j] = static_cast<std::int32_t>(cols.size());
      coeff[j] = c * inv;
      col.emplace_back(j, c * inv);
    }
    cols.push_back(std::move(col));
  }
  const auto nq = static_cast<Eigen::Index>(cols.size());
  if (nq == 0) throw ValidationError("subspace_spectrum: the symmetry subspace is empty");
  if (static_cast<std::size_t>(nq) > cap)
    throw ValidationError("subspace_spectrum: subspace dimension " + std::to_string(nq) + " exceeds the dense cap");

  auto project_back = [&](const Vector& full, Matrix& out, Eigen::Index b) {
    for (std::size_t j = 0; j < dim; ++j)
      if (column[j] >= 0 && full[static_cast<Eigen::Index>(j)] != 0.0)
        out(column[j], b) += coeff[j] * full[static_cast<Eigen::Index>(j)];
  };

  Matrix HQ = Matrix::Zero(nq, nq);
  Vector scratch = Vector::Zero(static_cast<Eigen::Index>(dim));
  std::vector<std::size_t> touched;
  for (Eigen::Index b = 0; b < nq; ++b) {
    for (auto [j, c] : cols[b])
      h.for_each_in_row(j, [&](std::size_t i, double v) {
        if (scratch[static_cast<Eigen::Index>(i)] == 0.0) touched.push_back(i);
        scratch[static_cast<Eigen::Index>(i)] += v * c;
      });
    for (auto i : touched) {
      if (column[i] >= 0) HQ(column[i], b) += coeff[i] * scratch[static_cast<Eigen::Index>(i)];
      scratch[static_cast<Eigen::Index>(i)] = 0.0;
    }
    touched.clear();
  }
  HQ = 0.5 * (HQ + HQ.transpose()).eval();

  Matrix Z;  // subspace columns spanning the requested spin
  if (twice_s) {
    Matrix S2 = Matrix::Zero(nq, nq);
    Vector x = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (Eigen::Index b = 0; b < nq; ++b) {
      for (auto [j, c] : cols[b]) x[static_cast<Eigen::Index>(j)] = c;
      project_back(ops.spin().s_squared(x), S2, b);
      for (auto [j, c] : cols[b]) x[static_cast<Eigen::Index>(j)] = 0.0;
    }
    S2 = 0.5 * (S2 + S2.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(S2);
    const double S = 0.5 * *twice_s;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < nq; ++i)
      if (std::abs(es.eigenvalues()[i] - S * (S + 1.0)) < 1e-6) keep.push_back(i);
    if (keep.empty()) throw ValidationError("subspace_spectrum: no states with the requested spin");
    Z.resize(nq, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) Z.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  } else {
    Z = Matrix::Identity(nq, nq);
  }

  const Matrix HZ = Z.transpose() * HQ * Z;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (HZ + HZ.transpose()));
  if (es.info() != Eigen::Success) throw ConvergenceError("subspace_spectrum: dense eigensolver failed", 0.0);
  const Matrix coeffs = Z * es.eigenvectors();  // nq x nz

  EigenSet out;
  out.values = es.eigenvalues();
  out.vectors = Matrix::Zero(static_cast<Eigen::Index>(dim), coeffs.cols());
  for (Eigen::Index b = 0; b < nq; ++b)
    for (auto [j, c] : cols[b]) out.vectors.row(static_cast<Eigen::Index>(j)) += c * coeffs.row(b);
  out.residuals = residual_norms(h, out);
  return out;
}

std::vector<DegenerateManifold> group_degenerate(const Vector& values, double rel_tol) {
  std::vector<DegenerateManifold> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!out.empty()) {
      const double ref = out.back().value;
      if (std::abs(v - ref) <= rel_tol * std::max(1.0, std::abs(ref))) {
        out.back().members.push_back(static_cast<std::size_t>(i));
        continue;
      }
    }
    out.push_back({v, {static_cast<std::size_t>(i)}});
  }
  return out;
}

std::vector<DegenerateManifold> group_degenerate(const EigenSet& set, double rel_tol) {
  return group_degenerate(set.values, rel_tol);
}

std::vector<SymmetryLabel> label_eigenset(EigenSet& set, const SymmetryOps& ops, double rel_tol) {
  // Rotates the columns `idx` of set.vectors to diagonalize <v_a|O|v_b>, then
  // splits them into runs of equal rounded eigenvalue (descending).
  auto rotate = [&](const std::vector<std::size_t>& idx, auto&& apply_op) {
    const auto g = static_cast<Eigen::Index>(idx.size());
    Matrix M(set.vectors.rows(), g);
    for (Eigen::Index a = 0; a < g; ++a) M.col(a) = set.vectors.col(static_cast<Eigen::Index>(idx[a]));
    Matrix OM(M.rows(), g);
    for (Eigen::Index a = 0; a < g; ++a) OM.col(a) = apply_op(Vector(M.col(a)));
    Matrix G = M.transpose() * OM;
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    // Descending eigenvalue order: +1 before -1, high spin last is handled by caller.
    const Matrix rotated = M * es.eigenvectors().rowwise().reverse();
    for (Eigen::Index a = 0; a < g; ++a) set.vectors.col(static_cast<Eigen::Index>(idx[a])) = rotated.col(a);
    std::vector<std::vector<std::size_t>> runs;
    const Vector ev = es.eigenvalues().reverse();
    for (Eigen::Index a = 0; a < g; ++a) {
      if (a == 0 || std::abs(ev[a] - ev[a - 1]) > 1e-6)
        runs.push_back({idx[a]});
      else
        runs.back().push_back(idx[a]);
    }
    return runs;
  };

  for (const auto& manifold : group_degenerate(set.values, rel_tol)) {
    if (manifold.multiplicity() < 2) continue;
    std::vector<std::vector<std::size_t>> groups{manifold.members};
    if (ops.has_c2()) {
      std::vector<std::vector<std::size_t>> next;
      for (auto& g : groups)
        for (auto& r : rotate(g, [&](const Vector& v) { return ops.c2().apply(v); })) next.push_back(r);
      groups = std::move(next);
    }
    if (ops.has_eh()) {
      std::vector<std::vector<std::size_t>> next;
      for (auto& g : groups)
        for (auto& r : rotate(g, [&](const Vector& v) { return ops.eh().apply(v); })) next.push_back(r);
      groups = std::move(next);
    }
    for (auto& g : groups)
      if (g.size() > 1) {
        // Ascending spin inside a run of equal parities.
        auto runs = rotate(g, [&](const Vector& v) { return Vector(-ops.spin().s_squared(v)); });
        (void)runs;
      }
  }

  std::vector<SymmetryLabel> labels;
  labels.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) labels.push_back(ops.label(set.vectors.col(static_cast<Eigen::Index>(i))));
  return labels;
}

std::vector<double> residual_norms(const Hamiltonian& h, const EigenSet& set) {
  std::vector<double> out(set.size());
  Vector y;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Vector v = set.vectors.col(idx);
    h.apply(v, y);
    out[i] = (y - set.values[idx] * v).norm();
  }
  return out;
}

double orthonormality_error(const EigenSet& set) {
  const Matrix G = set.vectors.transpose() * set.vectors;
  return (G - Matrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

}  // namespace edent
