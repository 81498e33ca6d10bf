#include <benchmark/benchmark.h>

#include <random>

#include "nctorus/dolbeault.hpp"
#include "nctorus/heisenberg1d.hpp"
#include "nctorus/ktheory.hpp"
#include "nctorus/riemann.hpp"

using namespace nctorus;

namespace {

FourierElement dense_element(const ThetaPtr& th, int radius, std::mt19937_64& rng) {
  FourierElement::Coefficients c;
  Mode m(th->dim(), -radius);
  // odometer over the box
  while (true) {
    c[m] = cd(gaussian(rng), gaussian(rng));
    std::size_t k = 0;
    while (k < m.size() && m[k] == radius) m[k++] = -radius;
    if (k == m.size()) break;
    ++m[k];
  }
  return FourierElement(th, c);
}

void BM_Multiply(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto th = make_theta(random_theta(2, rng));
  const int radius = static_cast<int>(state.range(0));
  const auto a = dense_element(th, radius, rng), b = dense_element(th, radius, rng);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
  state.SetComplexityN(static_cast<long>(a.coeffs().size()));
}
BENCHMARK(BM_Multiply)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_FreeCohomology(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  auto th = make_theta(random_theta(n, rng));
  const auto cs = random_complex_structure(n, rng);
  const auto frame = antihol_frame(cs);
  const auto conn = FreeConnection::trivial(th, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cohomology_dims(cs, frame, conn, {static_cast<int>(state.range(1))}));
}
BENCHMARK(BM_FreeCohomology)->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);

void BM_PerturbedCohomology(benchmark::State& state) {
  std::mt19937_64 rng(3);
  auto th = make_theta(random_theta(2, rng));
  const auto cs = random_complex_structure(2, rng);
  const auto frame = antihol_frame(cs);
  const FourierElement phi(th, {{{1, 0, 1, -1}, 0.3}, {{2, 0, 2, -2}, 0.1}});
  const FreeConnection conn(1, {MatrixElement::scalar(dbar(frame, 0, phi)), MatrixElement::scalar(dbar(frame, 1, phi))});
  for (auto _ : state) benchmark::DoNotOptimize(cohomology_dims(cs, frame, conn, {static_cast<int>(state.range(0))}));
}
BENCHMARK(BM_PerturbedCohomology)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_StandardModule(benchmark::State& state) {
  const StandardModule1D sm{3, 1, cd(0.3, 2.0), static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(standard_module_cohomology(sm));
}
BENCHMARK(BM_StandardModule)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_NonalgCertificate(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto cs = random_complex_structure(2, rng);
  const auto th = random_theta(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nonalg_certificate(cs, th, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_NonalgCertificate)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
