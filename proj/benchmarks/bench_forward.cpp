#include <benchmark/benchmark.h>

#include "eitlab/boundary_spectral.hpp"
#include "eitlab/conductivity.hpp"
#include "eitlab/forward.hpp"
#include "eitlab/noise.hpp"

using namespace eit;

static void BM_BuildMesh(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_mesh(static_cast<int>(state.range(0))));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildMesh)->Arg(16)->Arg(32)->Arg(64);

static void BM_SolverSetup(benchmark::State& state) {
  const DiskMesh mesh = build_mesh(static_cast<int>(state.range(0)));
  const auto gamma = element_conductivity(mesh, sample_shape(1, 32));
  for (auto _ : state) benchmark::DoNotOptimize(NeumannSolver(mesh, gamma));
}
BENCHMARK(BM_SolverSetup)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// Full NtD matrix for a contrast-100 shape sample, J modes per side.
static void BM_AssembleNtd(benchmark::State& state) {
  const DiskMesh mesh = build_mesh(static_cast<int>(state.range(0)));
  const ConductivityField gamma = sample_shape(1, 32);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_ntd(mesh, gamma, static_cast<int>(state.range(1)), 32));
}
BENCHMARK(BM_AssembleNtd)->Args({32, 8})->Args({32, 16})->Args({64, 16})->Unit(benchmark::kMillisecond);

static void BM_SynthesizeKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NtDMatrix m(n);
  for (int j : m.index_set().indices()) m(j, j) = 1.0 / std::abs(j);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_from_matrix(m));
}
BENCHMARK(BM_SynthesizeKernel)->Arg(32)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_NoiseField(benchmark::State& state) {
  NoiseSpec spec;
  spec.grid_size = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_noise_field(spec, seed++));
}
BENCHMARK(BM_NoiseField)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
