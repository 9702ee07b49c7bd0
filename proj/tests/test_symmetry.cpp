#include <doctest.h>

#include <random>

#include "edent/errors.hpp"
#include "edent/solver.hpp"
#include "edent/symmetry.hpp"
#include "oracle.hpp"

using namespace edent;

namespace {

std::shared_ptr<const BasisTable> sector(int n, LocalSpace space, Sector s) {
  return std::make_shared<const BasisTable>(enumerate_sector(n, space, s));
}

Matrix as_matrix(const SignedPermutation& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(p.target(static_cast<std::size_t>(i)), i) = p.sign(static_cast<std::size_t>(i));
  return m;
}

Vector random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = d(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("fermionic C2 equals the operator-string oracle") {
  for (int n : {4, 5, 6})
    for (int ne : {n - 1, n, n + 1})
      for (int m : {ne % 2, ne % 2 + 2}) {
        const auto g = build_chain(n);
        auto b = sector(n, LocalSpace::electron, Sector{ne, m});
        const Matrix ours = as_matrix(c2_operator(g, *b));
        CHECK((ours - oracle::permutation_matrix(*b, *g.c2_map())).cwiseAbs().maxCoeff() == 0.0);
      }
  const auto ico = build_icosahedron();
  auto b = sector(12, LocalSpace::electron, Sector{3, 1});
  CHECK((as_matrix(c2_operator(ico, *b)) - oracle::permutation_matrix(*b, *ico.c2_map())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sign-free C2 differs by the sector constant") {
  const auto g = build_chain(6);
  for (int m : {0, 2, 4}) {
    auto b = sector(6, LocalSpace::electron, Sector{6, m});
    const int nu = (6 + m) / 2, nd = (6 - m) / 2;
    const int c = ((nu * (nu - 1) / 2 + nd * (nd - 1) / 2) % 2) ? -1 : 1;
    const Matrix f = as_matrix(c2_operator(g, *b, C2Convention::fermionic));
    const Matrix s = as_matrix(c2_operator(g, *b, C2Convention::sign_free));
    CHECK((s - c * f).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(parse_c2_convention(to_string(C2Convention::sign_free)) == C2Convention::sign_free);
  CHECK_THROWS_AS(parse_c2_convention("bosonic"), ValidationError);
}

TEST_CASE("fermionic C2 commutes with spin raising") {
  const auto g = build_chain(6);
  auto lo = sector(6, LocalSpace::electron, Sector{6, 0});
  auto hi = sector(6, LocalSpace::electron, Sector{6, 2});
  SpinLadder ladder(lo);
  const Vector x = random_vector(lo->size(), 1);
  for (auto conv : {C2Convention::fermionic, C2Convention::sign_free}) {
    const Vector a = ladder.raise(apply_c2(x, g, *lo, conv));
    const Vector b = apply_c2(ladder.raise(x), g, *hi, conv);
    if (conv == C2Convention::fermionic)
      CHECK((a - b).norm() < 1e-13);
    else
      CHECK((a + b).norm() < 1e-13);
  }
}

TEST_CASE("electron-hole operator matches the oracle up to its phase") {
  for (int n : {2, 4, 6}) {
    const auto g = build_chain(n);
    for (int m : {0, 2}) {
      auto b = sector(n, LocalSpace::electron, Sector{n, m});
      const Matrix ours = as_matrix(eh_operator(g, *b));
      const Matrix ref = oracle::eh_matrix(*b, *g.sublattice_signs());
      const double phase = (ours - ref).cwiseAbs().maxCoeff() == 0.0 ? 1.0 : -1.0;
      CHECK((ours - phase * ref).cwiseAbs().maxCoeff() == 0.0);
      // Covalent configurations map onto themselves with +1.
      for (std::size_t k = 0; k < b->size(); ++k) {
        const auto code = b->state(k);
        if ((b->up_mask(code) ^ b->dn_mask(code)) == (1u << n) - 1) CHECK(ours(Eigen::Index(k), Eigen::Index(k)) == 1.0);
      }
    }
  }
  auto off = sector(4, LocalSpace::electron, Sector{3, 1});
  CHECK_THROWS_AS(eh_operator(build_chain(4), *off), ValidationError);
  auto ico = sector(12, LocalSpace::electron, Sector{2, 0});
  CHECK_THROWS_AS(eh_operator(build_icosahedron(), *ico), ValidationError);
}

TEST_CASE("symmetries commute with the Hamiltonians") {
  const auto g = build_chain(6);
  for (const auto& model : {ModelSpec::hubbard(-1.0, 4.0), ModelSpec::ppp_standard(), ModelSpec::huckel(-2.0)})
    for (int m : {0, 2}) {
      auto b = sector(6, LocalSpace::electron, Sector{6, m});
      const Matrix h = Hamiltonian(g, model, b).to_dense();
      for (auto conv : {C2Convention::fermionic, C2Convention::sign_free}) {
        const Matrix c = as_matrix(c2_operator(g, *b, conv));
        CHECK((h * c - c * h).cwiseAbs().maxCoeff() < 1e-12);
      }
      const Matrix e = as_matrix(eh_operator(g, *b));
      CHECK((h * e - e * h).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((e * e - Matrix::Identity(h.rows(), h.cols())).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("spin-permutation C2 commutes with Heisenberg") {
  const auto g = build_icosahedron();
  auto b = sector(12, LocalSpace::spin_half, Sector{std::nullopt, 4});
  const Matrix h = Hamiltonian(g, ModelSpec::heisenberg(1.0, LocalSpace::spin_half), b).to_dense();
  const Matrix c = as_matrix(c2_operator(g, *b));
  CHECK((h * c - c * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("total spin") {
  const auto g = build_chain(2);
  auto b = sector(2, LocalSpace::spin_half, Sector{std::nullopt, 0});
  Vector singlet(2), triplet(2);
  singlet << 1, -1;
  triplet << 1, 1;
  singlet.normalize();
  triplet.normalize();
  CHECK(total_spin(singlet, b).twice_s == 0);
  CHECK(total_spin(triplet, b).twice_s == 2);
  CHECK(total_spin(triplet, b).s_squared == doctest::Approx(2.0));
  const Vector mix = (singlet + triplet).normalized();
  CHECK(total_spin(mix, b).mixed);

  // S^2 commutes with the Hubbard Hamiltonian; eigenvalues of S^2 are S(S+1).
  auto e = sector(4, LocalSpace::electron, Sector{4, 0});
  SpinLadder ladder(e);
  const Matrix h = Hamiltonian(build_chain(4), ModelSpec::hubbard(-1.0, 2.0), e).to_dense();
  Matrix s2(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.cols(); ++i) s2.col(i) = ladder.s_squared(Vector::Unit(h.cols(), i));
  CHECK((h * s2 - s2 * h).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s2, Eigen::EigenvaluesOnly);
  for (double v : es.eigenvalues()) {
    const double s = 0.5 * (std::sqrt(1 + 4 * v) - 1);
    CHECK(std::abs(s - std::round(s)) < 1e-10);
  }
}

TEST_CASE("projectors are idempotent and complete") {
  const auto g = build_chain(6);
  auto b = sector(6, LocalSpace::electron, Sector{6, 0});
  SymmetryOps ops(g, b);
  const Vector x = random_vector(b->size(), 9);
  Vector sum = Vector::Zero(x.size());
  for (int c : {1, -1})
    for (int e : {1, -1}) {
      const Vector p = ops.project(x, c, e);
      CHECK((ops.project(p, c, e) - p).norm() < 1e-13);
      CHECK(ops.c2().expectation(p) == doctest::Approx(c * p.squaredNorm()));
      sum += p;
    }
  CHECK((sum - x).norm() < 1e-13);
}

TEST_CASE("ground-state labels") {
  const auto g = build_chain(6);
  auto b = sector(6, LocalSpace::electron, Sector{6, 0});
  SymmetryOps ops(g, b);
  const auto set = dense_spectrum(Hamiltonian(g, ModelSpec::hubbard(-1.0, 4.0), b));
  CHECK(ops.label(set.vectors.col(0)).to_string() == "1_Ag+");
  CHECK(ops.label(Vector::Unit(Eigen::Index(b->size()), 0)).c2_parity == 0);
}

TEST_CASE("label text") {
  for (const char* s : {"1_Ag+", "1_Bu-", "3_Bu+", "3_Ag-", "5_Ag+"}) CHECK(SymmetryLabel::parse(s).to_string() == s);
  const auto l = SymmetryLabel::parse("3_Bu+");
  CHECK(l.twice_s == 2);
  CHECK(l.c2_parity == -1);
  CHECK(l.eh_parity == 1);
  CHECK(SymmetryLabel::parse("2_B").eh_parity == 0);
  CHECK_THROWS_AS(SymmetryLabel::parse("Ag+"), ValidationError);
  CHECK_THROWS_AS(SymmetryLabel::parse("1_Cg+"), ValidationError);
}
