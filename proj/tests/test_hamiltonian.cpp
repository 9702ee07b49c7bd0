#include <doctest.h>

#include <cmath>
#include <random>

#include "edent/errors.hpp"
#include "edent/hamiltonian.hpp"
#include "oracle.hpp"

using namespace edent;

namespace {

std::shared_ptr<const BasisTable> sector(int n, LocalSpace space, Sector s) {
  return std::make_shared<const BasisTable>(enumerate_sector(n, space, s));
}

Vector random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("two-site Hubbard closed form") {
  const double t = -1.3, U = 3.7;
  const auto g = build_chain(2);
  Hamiltonian h(g, ModelSpec::hubbard(t, U), sector(2, LocalSpace::electron, Sector{2, 0}));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.to_dense());
  const auto& e = es.eigenvalues();
  CHECK(e[0] == doctest::Approx(0.5 * (U - std::sqrt(U * U + 16 * t * t))));
  CHECK(e[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e[2] == doctest::Approx(U));
  CHECK(e[3] == doctest::Approx(0.5 * (U + std::sqrt(U * U + 16 * t * t))));
}

TEST_CASE("two-site Heisenberg closed forms") {
  const auto g = build_chain(2);
  Hamiltonian half(g, ModelSpec::heisenberg(2.0, LocalSpace::spin_half), sector(2, LocalSpace::spin_half, Sector{std::nullopt, 0}));
  Eigen::SelfAdjointEigenSolver<Matrix> a(half.to_dense());
  CHECK(a.eigenvalues()[0] == doctest::Approx(-1.5));
  CHECK(a.eigenvalues()[1] == doctest::Approx(0.5));
  // S1.S2 = (S(S+1) - 4)/2 for two spin-1: -2, -1, 1.
  Hamiltonian one(g, ModelSpec::heisenberg(1.0, LocalSpace::spin_one), sector(2, LocalSpace::spin_one, Sector{std::nullopt, 0}));
  Eigen::SelfAdjointEigenSolver<Matrix> b(one.to_dense());
  CHECK(b.eigenvalues()[0] == doctest::Approx(-2.0));
  CHECK(b.eigenvalues()[1] == doctest::Approx(-1.0));
  CHECK(b.eigenvalues()[2] == doctest::Approx(1.0));
}

TEST_CASE("electron Hamiltonians match the Jordan-Wigner oracle") {
  struct Case {
    Geometry g;
    ModelSpec m;
    Sector s;
  };
  auto ppp = ModelSpec::ppp_standard();
  auto ppp_z = ppp;
  ppp_z.z = {1.0, 1.0, 2.0, 0.0, 1.0};
  const std::vector<Case> cases{
      {oracle::ring(4), ModelSpec::hubbard(-1.0, 4.0), Sector{4, 0}},
      {oracle::ring(5), ModelSpec::hubbard(-0.7, 2.5), Sector{3, 1}},
      {oracle::ring(6), ModelSpec::hubbard(-1.0, 1.0), Sector{6, 2}},
      {build_chain(5), ppp, Sector{5, 1}},
      {build_chain(5), ppp_z, Sector{4, 0}},
      {build_icosahedron(), ModelSpec::huckel(-1.0), Sector{3, 1}},
      {build_icosahedron(), ModelSpec::hubbard(-1.0, 4.0), Sector{2, 0}},
  };
  for (const auto& c : cases) {
    auto b = sector(c.g.n_sites(), LocalSpace::electron, c.s);
    Hamiltonian h(c.g, c.m, b);
    const Matrix ref = oracle::electron_hamiltonian(c.g, c.m, *b);
    CHECK((h.to_dense() - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spin Hamiltonians match the oracle") {
  for (auto space : {LocalSpace::spin_half, LocalSpace::spin_one})
    for (const auto& g : {oracle::ring(5), build_chain(4)}) {
      const int m = space == LocalSpace::spin_half ? (g.n_sites() % 2) : 0;
      auto b = sector(g.n_sites(), space, Sector{std::nullopt, m});
      const auto model = ModelSpec::heisenberg(1.3, space);
      Hamiltonian h(g, model, b);
      CHECK((h.to_dense() - oracle::spin_hamiltonian(g, model, *b)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("matrix-free, stored and dense products agree") {
  const auto g = build_chain(6);
  for (const auto& model : {ModelSpec::ppp_standard(), ModelSpec::hubbard(-1.0, 4.0)}) {
    Hamiltonian h(g, model, sector(6, LocalSpace::electron, Sector{6, 0}));
    const Vector x = random_vector(h.dim(), 5);
    const Matrix d = h.to_dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Vector y0 = h.apply(x);
    CHECK((y0 - d * x).norm() < 1e-12 * y0.norm());
    h.materialize();
    CHECK(h.materialized());
    CHECK((h.apply(x) - y0).norm() < 1e-12 * y0.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= h.norm_bound() * (1 + 1e-12));
  }
}

TEST_CASE("apply rejects wrong lengths") {
  Hamiltonian h(build_chain(2), ModelSpec::hubbard(-1, 1), sector(2, LocalSpace::electron, Sector{2, 0}));
  Vector y;
  CHECK_THROWS_AS(h.apply(Vector::Zero(3), y), ValidationError);
}

TEST_CASE("Ohno potential limits") {
  CHECK(ohno_potential(11.26, 11.26, 0.0) == doctest::Approx(11.26));
  CHECK(ohno_potential(11.26, 11.26, 1e6) == doctest::Approx(14.397e-6).epsilon(1e-6));
  CHECK(ohno_potential(11.26, 11.26, 1.397) < ohno_potential(11.26, 11.26, 1.0));
}

TEST_CASE("model names round trip") {
  for (auto k : {ModelKind::huckel, ModelKind::hubbard, ModelKind::ppp, ModelKind::heisenberg})
    CHECK(parse_model_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_model_kind("tJ"), ValidationError);
}
