#include "floqsmat/floquet.hpp"
#include "floqsmat/oracle.hpp"
#include "floqsmat/slowmod.hpp"
#include "floqsmat/smatrix.hpp"

#include <benchmark/benchmark.h>

using namespace floqsmat;

namespace {

KerrCavityParams kerr(double chi, double delta0, double omega) {
  KerrCavityParams p;
  p.chi = chi;
  p.delta0 = delta0;
  p.omega = omega;
  return p;
}

ParameterLoop coupling_loop() {
  Eigen::VectorXd c(2), a(2), b(2);
  c << 0.15, 0.0;
  a << 0.5, 0.0;
  b << 0.0, 0.5;
  return ellipse_loop(c, a, b, 2.0 * pi, {0.5});
}

void BM_floquet_kerr(benchmark::State& state) {
  const LadderSystem sys = build_kerr_cavity(kerr(1.0, 3.0, 2.5), 2);
  FloquetOptions opts;
  opts.harmonic_cutoff = static_cast<int>(state.range(0));
  opts.samples = 8 * opts.harmonic_cutoff;
  for (auto _ : state) benchmark::DoNotOptimize(floquet_decompose(sys, 2, opts));
}
BENCHMARK(BM_floquet_kerr)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_floquet_jaynes_cummings(benchmark::State& state) {
  JaynesCummingsParams p;
  p.g_loop = coupling_loop().with_period(2.0 * pi / 1.3);
  const LadderSystem sys = build_jaynes_cummings_modulated(p, 2);
  for (auto _ : state) benchmark::DoNotOptimize(floquet_decompose(sys, 2));
}
BENCHMARK(BM_floquet_jaynes_cummings)->Unit(benchmark::kMillisecond);

void BM_transmission_sweep(benchmark::State& state) {
  const auto setup = prepare_scattering(build_kerr_cavity(kerr(0.0, 3.0, 10.0), 1), 1);
  TransmissionRequest req;
  req.nu_grid = default_nu_grid();
  for (auto _ : state) benchmark::DoNotOptimize(transmission(setup, req));
}
BENCHMARK(BM_transmission_sweep)->Unit(benchmark::kMillisecond);

void BM_two_photon_connected(benchmark::State& state) {
  const auto setup = prepare_scattering(build_kerr_cavity(kerr(1.0, 3.0, 2.5), 2), 2);
  std::vector<double> delta(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = -10.0 + 20.0 * i / (delta.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(two_photon_connected(setup, 1, 0.0, 0.0, delta));
}
BENCHMARK(BM_two_photon_connected)->Arg(21)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_slowmod_first_order(benchmark::State& state) {
  const auto fam = jaynes_cummings_family(JaynesCummingsParams{}, 2);
  const auto loop = coupling_loop();
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(g_first(loop, fam, 0.3, N));
}
BENCHMARK(BM_slowmod_first_order)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_loop_construction(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(coupling_loop());
}
BENCHMARK(BM_loop_construction)->Unit(benchmark::kMillisecond);

void BM_oracle_sk(benchmark::State& state) {
  const LadderSystem sys = build_kerr_cavity(kerr(0.0, 3.0, 2.5), 1);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_sk_window(sys, 0.4, -4, 4));
}
BENCHMARK(BM_oracle_sk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
