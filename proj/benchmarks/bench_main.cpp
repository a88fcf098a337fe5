#include <benchmark/benchmark.h>

#include <cmath>

#include "canardkit/algebra.hpp"
#include "canardkit/blowup.hpp"
#include "canardkit/dynamics.hpp"
#include "canardkit/parser.hpp"

using namespace canardkit;

namespace {

PolyVectorField field(const char* a, const char* b) { return PolyVectorField({parse_poly(a), parse_poly(b)}); }

void BM_PolyMultiply(benchmark::State& state) {
  const MultiPoly a = parse_poly("(x + 2/3*y - eps + 1)^4");
  const MultiPoly b = parse_poly("(x^2 - y/5 + 3*eps)^3");
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_PolyMultiply);

void BM_PolyGcd(benchmark::State& state) {
  const MultiPoly c = parse_poly("x^2 - y + 1/2*eps");
  const MultiPoly a = c * parse_poly("(x + y)^2 - 3*eps");
  const MultiPoly b = c * parse_poly("x*y - 7/3");
  for (auto _ : state) benchmark::DoNotOptimize(gcd_poly(a, b));
}
BENCHMARK(BM_PolyGcd);

void BM_SquarefreeFactor(benchmark::State& state) {
  const MultiPoly p = parse_poly("(y-x)*(y+x)*(y-x/2)*(y+x/2)*(y-x^2)^2");
  for (auto _ : state) benchmark::DoNotOptimize(squarefree_factor(p));
}
BENCHMARK(BM_SquarefreeFactor);

void BM_SphereField(benchmark::State& state) {
  const PolyVectorField xhat = extend_field(field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0"), field("1", "1/2"));
  const BlowupSphere sphere(xhat, Weights{1, 1, 4});
  double th = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sphere.exact(th, 1.0));
    th = std::fmod(th + 0.37, 3.0);
  }
}
BENCHMARK(BM_SphereField);

void BM_IntegrateFull(benchmark::State& state) {
  const PolyVectorField x0 = field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
  const PolyVectorField x1 = field("1", "1/2");
  IntegratorConfig cfg;
  cfg.epsilon = 1e-2;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_full(x0, x1, cfg, {-0.5, -0.25 + 1e-4}, 150.0));
}
BENCHMARK(BM_IntegrateFull)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
