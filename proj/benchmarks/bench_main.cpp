// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include <benchmark/benchmark.h>

#include <Eigen/Eigenvalues>

#include "tsica/eigen_duality.hpp"
#include "tsica/fastica.hpp"
#include "tsica/pipeline.hpp"
#include "tsica/random.hpp"
#include "tsica/simgen.hpp"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  tsica::Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

void BM_DualEigens(benchmark::State& state) {
  const Eigen::MatrixXd x = tsica::center_columns(gaussian(100, state.range(0), 1), false).values;
  for (auto _ : state) benchmark::DoNotOptimize(tsica::covariance_eigens(x, 20));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DualEigens)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

// Dense v x v covariance, only feasible for small v.
void BM_DirectCovarianceEigens(benchmark::State& state) {
  const Eigen::MatrixXd x = tsica::center_columns(gaussian(100, state.range(0), 1), false).values;
  for (auto _ : state) {
    const Eigen::MatrixXd cov = x.transpose() * x / 100.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    benchmark::DoNotOptimize(solver.eigenvalues());
  }
}
BENCHMARK(BM_DirectCovarianceEigens)->RangeMultiplier(2)->Range(256, 1024)->Unit(benchmark::kMillisecond);

void BM_FastIca(benchmark::State& state) {
  tsica::Rng rng(2);
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXd s(n, 8);
  for (Eigen::Index j = 0; j < 8; ++j)
    for (Eigen::Index i = 0; i < n; ++i) s(i, j) = 2.0 * rng.uniform() - 1.0;
  const Eigen::MatrixXd x = tsica::center_columns(s * gaussian(8, 8, 3), false).values;
  const tsica::Whitening w = tsica::reduce_and_whiten(x, 8);
  tsica::FastIcaOptions options;
  options.scheme = static_cast<tsica::FastIcaScheme>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(tsica::fastica_kurtosis(w.white, options));
}
BENCHMARK(BM_FastIca)->ArgsProduct({{1 << 12, 1 << 15}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const tsica::Simulation sim = tsica::simulate_multisignal(0);
  const tsica::MaskVolume mask = tsica::MaskVolume::all(sim.volume.spatial_extents());
  tsica::IcaRunConfig config;
  config.orientation = static_cast<tsica::Orientation>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tsica::run_ica(sim.volume, mask, config));
}
BENCHMARK(BM_Pipeline)->Arg(static_cast<int>(tsica::Orientation::temporal))->Arg(static_cast<int>(tsica::Orientation::spatial))->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
