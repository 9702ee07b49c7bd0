#include <doctest.h>

#include <numeric>

#include "edent/analysis.hpp"
#include "edent/errors.hpp"

using namespace edent;

TEST_CASE("density of states histogram") {
  const auto p = dos_histogram({0.0, 0.1, 0.6, 0.7, 0.8, 2.1}, 0.5);
  REQUIRE(p.size() == 5);
  CHECK(p.x[0] == 0.0);
  CHECK(p.x[4] == doctest::Approx(2.0));
  CHECK(p.y == std::vector<double>{2, 3, 0, 0, 1});
  CHECK_THROWS_AS(dos_histogram({0.0}, 0.0), ValidationError);
}

TEST_CASE("smoothing names") {
  for (const char* s : {"none", "paper", "energy_bin(0.25)"}) CHECK(Smoothing::parse(s).to_string() == s);
  CHECK(Smoothing::parse("energy_bin").width == 0.5);
  CHECK_THROWS_AS(Smoothing::parse("gaussian"), ValidationError);
  CHECK_THROWS_AS(Smoothing::parse("energy_bin(-1)"), ValidationError);
}

TEST_CASE("paper grouping tiles the spectrum") {
  for (std::size_t n : {90u, 91u, 137u, 485u, 570u}) {
    const auto g = paper_groups(n);
    std::size_t at = 0;
    for (const auto& [a, b] : g) {
      CHECK(a == at);
      CHECK(b > a);
      at = b;
    }
    CHECK(at == n);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(g[i].second - g[i].first == 1);
      CHECK(g[g.size() - 1 - i].second - g[g.size() - 1 - i].first == 1);
    }
    CHECK(g[5] == std::pair<std::size_t, std::size_t>{5, 9});
    CHECK(g[g.size() - 6] == std::pair<std::size_t, std::size_t>{n - 9, n - 5});
  }
  CHECK_THROWS_AS(paper_groups(89), ValidationError);
}

TEST_CASE("smoothing") {
  std::vector<double> e(100), s(100);
  std::iota(e.begin(), e.end(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = double(i % 3);
  const auto raw = smooth_profile(e, s, Smoothing{});
  CHECK(raw.size() == 100);
  const auto paper = smooth_profile(e, s, Smoothing::parse("paper"));
  CHECK(paper.size() == paper_groups(100).size());
  CHECK(paper.y[5] == doctest::Approx((2 + 0 + 1 + 2) / 4.0));
  CHECK(paper.x[5] == doctest::Approx(6.5));
  const auto bins = smooth_profile(e, s, Smoothing::parse("energy_bin(10)"));
  CHECK(bins.size() == 10);
  CHECK(bins.err.size() == 10);

  std::string warning;
  const auto fallback = smooth_profile({0, 1, 2}, {1, 2, 3}, Smoothing::parse("paper"), &warning);
  CHECK(fallback.size() == 3);
  CHECK_FALSE(warning.empty());
  CHECK_THROWS_AS(smooth_profile({0, 1}, {1}, Smoothing{}), ValidationError);
}

TEST_CASE("Spearman correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 45}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 1, 1}, {1, 2, 3}) == 0.0);
  // Average ranks for ties: x ranks {1.5, 1.5, 3}, y ranks {1, 2, 3}.
  CHECK(spearman({5, 5, 7}, {1, 2, 3}) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("entropy against log DoS") {
  const auto few = entropy_vs_logdos({0.0, 0.1, 0.7}, {1, 2, 3}, 0.5);
  CHECK_FALSE(few.correlation);
  std::vector<double> e, s;
  for (int bin = 0; bin < 6; ++bin)
    for (int k = 0; k < 1 + bin; ++k) {
      e.push_back(bin + 0.5);
      s.push_back(bin);
    }
  const auto c = entropy_vs_logdos(e, s, 1.0);
  REQUIRE(c.correlation);
  CHECK(*c.correlation == doctest::Approx(1.0));
  CHECK(c.pairs.x[5] == doctest::Approx(std::log2(6.0)));
}

TEST_CASE("target syntax") {
  const auto t = TargetState::parse("2:1_Ag+");
  CHECK(t.root == 2);
  CHECK(t.label.twice_s == 0);
  CHECK(t.to_string() == "2:1_Ag+");
  CHECK(TargetState::parse("3_Bu+").root == 1);
  CHECK_THROWS_AS(TargetState::parse("0:1_Ag+"), ValidationError);
}

TEST_CASE("ground states and sweeps on small chains") {
  const auto half = ModelSpec::heisenberg(1.0, LocalSpace::spin_half);
  const auto gs = chain_ground_state(half, 7);
  CHECK(gs.basis->sector().twice_ms == 1);
  CHECK(chain_ground_state(ModelSpec::heisenberg(1.0, LocalSpace::spin_one), 5).basis->sector().twice_ms == 0);
  const auto hub = chain_ground_state(ModelSpec::hubbard(-1.0, 4.0), 6);
  CHECK(hub.basis->sector() == Sector{6, 0});

  const auto p = sweep_block_size(half, 10);
  REQUIRE(p.size() == 9);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.y[i] == doctest::Approx(p.y[p.size() - 1 - i]).epsilon(1e-9));
  const auto lengths = sweep_ground_state(ModelSpec::hubbard(-1.0, 2.0), {4, 6});
  CHECK(lengths.x == std::vector<double>{4, 6});
  CHECK_THROWS_AS(sweep_ground_state(half, {5}), ValidationError);

  const auto series = excited_state_series(ModelSpec::hubbard(-1.0, 4.0), {4, 6}, standard_excited_targets());
  CHECK(series.size() == standard_excited_targets().size());
  // The half-filled ground state of a chain is 1_Ag+.
  CHECK(labelled_state_entropy(ModelSpec::hubbard(-1.0, 4.0), 6, TargetState::parse("1_Ag+")) ==
        doctest::Approx(sweep_ground_state(ModelSpec::hubbard(-1.0, 4.0), {6}).y[0]).epsilon(1e-9));
}
