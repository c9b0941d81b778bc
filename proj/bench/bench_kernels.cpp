// Serial reference vs OpenMP kernels, plus one full restricted fit per
// execution mode. Run with OMP_NUM_THREADS to vary the team size.

#include <benchmark/benchmark.h>

#include <random>

#include "rao/estimators.hpp"
#include "rao/kernels.hpp"

using namespace rao;

namespace {

struct Data {
  Matrix x;
  Vector center;
  Matrix precision;
  Vector w;
};

Data make(int n, int p) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  Data d;
  d.x.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) d.x(i, j) = z(rng);
  d.center = Vector::Zero(p);
  d.precision = Matrix::Identity(p, p);
  d.w = kernels::serial::dpd_weights(d.x, d.center, d.precision, 0.5);
  return d;
}

template <bool Parallel>
void BM_Weights(benchmark::State& state) {
  const Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    Vector w = Parallel ? kernels::omp::dpd_weights(d.x, d.center, d.precision, 0.5)
                        : kernels::serial::dpd_weights(d.x, d.center, d.precision, 0.5);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Cross(benchmark::State& state) {
  const Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    Matrix c = Parallel ? kernels::omp::weighted_cross(d.x, d.w, d.center)
                        : kernels::serial::weighted_cross(d.x, d.w, d.center);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Exec E>
void BM_FitIndependence(benchmark::State& state) {
  const Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  FitConfig cfg;
  cfg.exec = E;
  for (auto _ : state) {
    RestrictedFit f = fit_independence(d.x, 0.5, cfg);
    benchmark::DoNotOptimize(f.sigma2_tilde.data());
  }
}

void Shapes(benchmark::internal::Benchmark* b) {
  for (int n : {500, 5000, 50000})
    for (int p : {4, 16}) b->Args({n, p});
}

}  // namespace

BENCHMARK(BM_Weights<false>)->Name("weights/serial")->Apply(Shapes);
BENCHMARK(BM_Weights<true>)->Name("weights/omp")->Apply(Shapes);
BENCHMARK(BM_Cross<false>)->Name("cross/serial")->Apply(Shapes);
BENCHMARK(BM_Cross<true>)->Name("cross/omp")->Apply(Shapes);
BENCHMARK(BM_FitIndependence<kernels::Exec::Serial>)->Name("fit/serial")->Apply(Shapes);
BENCHMARK(BM_FitIndependence<kernels::Exec::Parallel>)->Name("fit/omp")->Apply(Shapes);

BENCHMARK_MAIN();
