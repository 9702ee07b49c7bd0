#include <doctest.h>

#include <cmath>

#include "edent/errors.hpp"
#include "edent/lattice.hpp"

using namespace edent;

TEST_CASE("chain geometry") {
  const auto g = build_chain(6, 1.4);
  CHECK(g.n_sites() == 6);
  CHECK(g.bonds().size() == 5);
  CHECK(g.distance(0, 5) == doctest::Approx(7.0));
  CHECK(g.bonded(2, 3));
  CHECK_FALSE(g.bonded(1, 3));
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(3) == 2);
  REQUIRE(g.c2_map());
  CHECK(*g.c2_map() == std::vector<int>{5, 4, 3, 2, 1, 0});
  const auto phi = g.sublattice_signs();
  REQUIRE(phi);
  CHECK(*phi == std::vector<int>{-1, 1, -1, 1, -1, 1});
}

TEST_CASE("icosahedron is a regular 5-coordinated cluster") {
  const double a = 1.397;
  const auto g = build_icosahedron(a);
  CHECK(g.n_sites() == 12);
  CHECK(g.bonds().size() == 30);
  for (int i = 0; i < 12; ++i) CHECK(g.degree(i) == 5);
  for (const auto& [i, j] : g.bonds()) CHECK(g.distance(i, j) == doctest::Approx(a).epsilon(1e-12));
  // Circumradius a sin(2 pi / 5).
  CHECK(g.distance(0, 11) == doctest::Approx(2 * a * std::sin(0.4 * 3.14159265358979323846)));
  CHECK_FALSE(g.sublattice_signs());

  REQUIRE(g.c2_map());
  const auto& p = *g.c2_map();
  for (int i = 0; i < 12; ++i) {
    CHECK(p[p[i]] == i);
    CHECK((i < 6) != (p[i] < 6));  // swaps the upper and lower halves
  }
}

TEST_CASE("geometry validation") {
  std::vector<Vec3> c{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK_THROWS_AS(Geometry("x", c, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(Geometry("x", c, {{0, 3}}), ValidationError);
  CHECK_THROWS_AS(Geometry("x", c, {{0, 1}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(Geometry("x", {{0, 0, 0}, {0, 0, 0}}, {}), ValidationError);
  CHECK_THROWS_AS(build_chain(0), ValidationError);
  CHECK_THROWS_AS(build_icosahedron(-1.0), ValidationError);

  auto g = build_chain(4);
  CHECK_THROWS_AS(g.declare_c2({1, 2, 3, 0}), ValidationError);  // not an involution
  CHECK_THROWS_AS(g.declare_c2({1, 0, 2, 3}), ValidationError);  // breaks bonds
  CHECK_NOTHROW(g.declare_c2({3, 2, 1, 0}));
}

TEST_CASE("text format round trip") {
  for (const auto& g : {build_chain(7, 1.397), build_icosahedron()}) {
    const std::string text = serialize_geometry(g);
    const auto back = parse_geometry(text);
    CHECK(back.n_sites() == g.n_sites());
    CHECK(back.bonds() == g.bonds());
    CHECK(back.coords() == g.coords());
    CHECK(serialize_geometry(back) == text);
  }
}

TEST_CASE("text format errors carry line numbers") {
  try {
    parse_geometry("sites 2\n1 0 0 0\n2 0 0 oops\nbonds 0\n");
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_geometry("sites 2\n1 0 0 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_geometry("sites 2\n1 0 0 0\n2 1 0 0\nbonds 1\n1 3\n"), ValidationError);
}

TEST_CASE("bipartitions") {
  const auto g = build_chain(6);
  const auto cut = half_cut(g, 2);
  CHECK(cut.left == std::vector<int>{0, 1});
  CHECK(cut.right == std::vector<int>{2, 3, 4, 5});
  CHECK_THROWS_AS(half_cut(g, 0), ValidationError);
  CHECK_THROWS_AS(half_cut(g, 6), ValidationError);
  CHECK_THROWS_AS((Bipartition{{0, 1}, {1, 2, 3, 4, 5}}.validate(6)), ValidationError);
  CHECK_THROWS_AS((Bipartition{{0, 1}, {2, 3, 4}}.validate(6)), ValidationError);
  CHECK_NOTHROW((Bipartition{{4, 0}, {1, 2, 3, 5}}.validate(6)));
}
