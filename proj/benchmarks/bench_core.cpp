#include <cmath>

#include <benchmark/benchmark.h>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/scheme.hpp"
#include "compete/simulator.hpp"
#include "compete/spectrum.hpp"
#include "compete/spreading.hpp"

using namespace compete;

namespace {

const auto kCanonical = CoefficientSet::constants({1, 1, 0.5, 0.4, 0.5, 1});

Field bell(const Grid& g) {
  Field u(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) u[j] = std::exp(-g.x(j) * g.x(j));
  return u;
}

void BM_ApplyRandom(benchmark::State& state) {
  const Grid g(-50.0, 50.0, static_cast<std::size_t>(state.range(0)));
  const Field u = bell(g);
  Field out(g.size());
  for (auto _ : state) {
    apply_random(u, g, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyRandom)->Arg(1001)->Arg(4001);

void BM_ApplyNonlocal(benchmark::State& state) {
  const Grid g(-50.0, 50.0, static_cast<std::size_t>(state.range(0)));
  const Kernel k(KernelShape::uniform, 1.0, g.h());
  const Field u = bell(g);
  Field out(g.size());
  for (auto _ : state) {
    apply_nonlocal(u, g, k, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyNonlocal)->Arg(1001)->Arg(4001);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const Grid g(-50.0, 50.0, static_cast<std::size_t>(state.range(0)));
  DispersalStepper st(g, Dispersal::random(), 0.01, StepMode::diffusion_implicit);
  Field u = bell(g);
  for (auto _ : state) {
    st.advance(u);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(1001)->Arg(4001);

void BM_DispersionSpeed(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dispersion_speed(kCanonical, Dispersal::random()).c);
  }
}
BENCHMARK(BM_DispersionSpeed);

void BM_SimulatorPeriod(benchmark::State& state) {
  const Grid g(-60.0, 220.0, 2801);
  Simulator sim(CompetitionSystem(kCanonical, g, Dispersal::random()), SchemeConfig{});
  auto [u, v] = make_front_data(g, 1.0, 0.4, -20.0, 1.0);
  SystemState s{0.0, u, v};
  for (auto _ : state) {
    s = sim.run_periods(std::move(s), 1);
    benchmark::DoNotOptimize(s.u.data());
  }
}
BENCHMARK(BM_SimulatorPeriod)->Unit(benchmark::kMillisecond);

void BM_PrincipalSpectrum(benchmark::State& state) {
  const Grid g(-20.0, 20.0, 201);
  const auto field = kCanonical[Coef::a2].with_bump(SpatialBump::with_width(0.5, 4.0, 0.0));
  const auto p = LinearProblem::make(0.0, GrowthRate::separable(field, g), g,
                                     Dispersal::random(), SchemeConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(principal_spectrum_point(p).lambda);
  }
}
BENCHMARK(BM_PrincipalSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
