#include <benchmark/benchmark.h>

#include <random>

#include "edent/analysis.hpp"

using namespace edent;

namespace {

std::shared_ptr<const BasisTable> half_filled(int n) {
  return std::make_shared<const BasisTable>(enumerate_sector(n, LocalSpace::electron, Sector{n, 0}));
}

Vector random_unit(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = d(rng);
  return v.normalized();
}

void BM_ApplyMatrixFree(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Hamiltonian h(build_chain(n), ModelSpec::ppp_standard(), half_filled(n));
  const Vector x = random_unit(h.dim());
  Vector y(x.size());
  for (auto _ : state) {
    h.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.dim()));
}
BENCHMARK(BM_ApplyMatrixFree)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ApplyStored(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Hamiltonian h(build_chain(n), ModelSpec::ppp_standard(), half_filled(n));
  h.materialize();
  const Vector x = random_unit(h.dim());
  Vector y(x.size());
  for (auto _ : state) {
    h.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.dim()));
}
BENCHMARK(BM_ApplyStored)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SchmidtSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = build_chain(n);
  auto b = half_filled(n);
  const Vector v = random_unit(b->size());
  const auto idx = bipartite_factorize(*b, half_cut(g, n / 2));
  for (auto _ : state) benchmark::DoNotOptimize(schmidt_spectrum(v, *b, idx).entropy);
}
BENCHMARK(BM_SchmidtSpectrum)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_LanczosGroundState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Hamiltonian h(build_chain(n), ModelSpec::hubbard(-1.0, 4.0), half_filled(n));
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_lowest(h, 1).values[0]);
}
BENCHMARK(BM_LanczosGroundState)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SubspaceSpectrum(benchmark::State& state) {
  const auto g = build_chain(8);
  auto b = half_filled(8);
  Hamiltonian h(g, ModelSpec::hubbard(-1.0, 4.0), b);
  SymmetryOps ops(g, b);
  for (auto _ : state) benchmark::DoNotOptimize(subspace_spectrum(h, ops, 1, 1, 0).values[0]);
}
BENCHMARK(BM_SubspaceSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
