#include <benchmark/benchmark.h>

#include <cmath>

#include "fgbc/algebra.hpp"
#include "fgbc/manifolds.hpp"
#include "fgbc/quadrature.hpp"
#include "fgbc/sphere_bundle.hpp"

using namespace fgbc;

static void BM_MetricJet(benchmark::State& state) {
  const Atlas S = Atlas::sphere();
  const auto m = install_metric(S, "randers(0.1)");
  const Vec2 x(0.3, -0.2), y(0.6, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(metric_jet(m, 0, x, y));
}
BENCHMARK(BM_MetricJet);

static void BM_BundleForms(benchmark::State& state) {
  const Atlas S = Atlas::sphere();
  const SphereBundle bundle(S, install_metric(S, "randers(0.1)"));
  const Vec3 xi(0.3, -0.2, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(bundle.forms(0, xi));
}
BENCHMARK(BM_BundleForms)->Unit(benchmark::kMicrosecond);

static void BM_ExpTruncated(benchmark::State& state) {
  const int rank = static_cast<int>(state.range(0));
  const int dim = 2 * rank - 1;
  BigradedElement a(rank, dim);
  Mask form = 0;
  for (int i = 0; i < rank; ++i)
    for (int j = i + 1; j < rank; ++j) {
      const Mask f = Mask{1} << (form++ % dim) | Mask{1} << ((form + 1) % dim);
      a.add(f, Mask{1} << i | Mask{1} << j, 0.1 * (i + j + 1));
    }
  for (auto _ : state) benchmark::DoNotOptimize(exp_truncated(a));
}
BENCHMARK(BM_ExpTruncated)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_SphereQuadrature(benchmark::State& state) {
  const Atlas S = Atlas::sphere();
  const BaseDensity f = [](int, const Vec2& x) {
    const double s = 1.0 + x.squaredNorm();
    return 4.0 / (s * s);
  };
  const ExcisedDomain dom{&S, {ExcisedDisk{0, Vec2::Zero(), 0.1}, ExcisedDisk{1, Vec2(0.5, 0.3), 0.1}}};
  const QuadratureOptions q{static_cast<int>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(base_integral_excised(f, dom, q));
}
BENCHMARK(BM_SphereQuadrature)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
