// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "tsica/component_analysis.hpp"
#include "tsica/error.hpp"
#include "tsica/simgen.hpp"
#include "tsica/text_io.hpp"
#include "tsica/volume_io.hpp"

namespace tsica {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd voxel_series(const Volume4D& v, std::size_t voxel) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.frames()));
  for (std::size_t t = 0; t < v.frames(); ++t) out(static_cast<Eigen::Index>(t)) = v.voxel_value(voxel, t);
  return out;
}

TubePhantomSpec noiseless(TubePhantomSpec spec) {
  spec.background_sd = 0.0;
  spec.global_sd = 0.0;
  return spec;
}

TEST(Simgen, MultisignalShapeAndTube3Frequency) {
  const Simulation sim = simulate_multisignal(1);
  EXPECT_EQ(sim.volume.extents, (Extents4{128, 128, 3, 100}));
  const std::size_t voxel = sim.truth.pure_voxels[2][sim.truth.pure_voxels[2].size() / 2];
  EXPECT_EQ(dominant_frequency_phase(voxel_series(sim.volume, voxel)).bin, 6);
}

TEST(Simgen, NoiselessPureVoxelsEqualSignals) {
  const Simulation sim = simulate(noiseless(TubePhantomSpec::multisignal(2)));
  for (int tube = 0; tube < 4; ++tube) {
    const std::size_t voxel = sim.truth.pure_voxels[static_cast<std::size_t>(tube)].front();
    for (std::size_t t = 0; t < 100; ++t) {
      const double expected = periodic_signal(sim.spec.signals[static_cast<std::size_t>(tube)], static_cast<double>(t));
      EXPECT_EQ(sim.volume.voxel_value(voxel, t), expected);
      EXPECT_EQ(sim.truth.references(static_cast<Eigen::Index>(t), tube), expected);
    }
  }
}

TEST(Simgen, OverlapsCarryTheSumOfNeighbours) {
  const Simulation sim = simulate(noiseless(TubePhantomSpec::multisignal(3)));
  for (std::size_t voxel = 0; voxel < sim.truth.labels.size(); ++voxel) {
    if (sim.truth.labels[voxel] != region_label::overlap(2)) continue;
    for (std::size_t t = 0; t < 100; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      EXPECT_DOUBLE_EQ(sim.volume.voxel_value(voxel, t),
                       sim.truth.references(row, 1) + sim.truth.references(row, 2));
    }
    break;
  }
}

TEST(Simgen, SameSeedBitIdenticalOtherSeedDiffers) {
  const Simulation a = simulate_multisignal(7);
  const Simulation b = simulate_multisignal(7);
  const Simulation c = simulate_multisignal(8);
  EXPECT_EQ(a.volume.samples, b.volume.samples);
  EXPECT_NE(a.volume.samples, c.volume.samples);
}

TEST(Simgen, RegionsPartitionTheGrid) {
  const Simulation sim = simulate_multisignal(1);
  std::size_t total = 0;
  for (const auto& [label, count] : region_counts(sim.truth)) total += count;
  EXPECT_EQ(total, 128u * 128u * 3u);
  // Pure regions are pairwise disjoint.
  std::set<std::size_t> seen;
  for (const auto& pure : sim.truth.pure_voxels)
    for (std::size_t v : pure) EXPECT_TRUE(seen.insert(v).second);
  // Overlap regions belong to exactly two tubes.
  for (std::size_t v = 0; v < sim.truth.labels.size(); ++v) {
    if (sim.truth.labels[v] != region_label::overlap(1)) continue;
    int membership = 0;
    for (const auto& tube : sim.truth.tube_voxels) membership += std::binary_search(tube.begin(), tube.end(), v);
    EXPECT_EQ(membership, 2);
  }
}

TEST(Simgen, EventRelatedBookkeeping) {
  const Simulation sim = simulate_event_related(4);
  EXPECT_EQ(sim.volume.frames(), 100u);
  for (int tube = 0; tube < 4; ++tube) {
    const auto col = sim.truth.references.col(tube);
    EXPECT_EQ(static_cast<std::size_t>((col.array() == 1.0).count()), sim.truth.event_counts[static_cast<std::size_t>(tube)]);
    EXPECT_EQ(static_cast<std::size_t>((col.array() != 0.0).count()), sim.truth.event_counts[static_cast<std::size_t>(tube)]);
  }
  for (int label : sim.truth.labels)
    EXPECT_TRUE(label == region_label::outside || label == region_label::background || (label >= 1 && label <= 4));
}

TEST(Simgen, NoiselessEventVoxelBinarizesToReference) {
  const Simulation sim = simulate(noiseless(TubePhantomSpec::event_related(5)));
  for (int tube = 0; tube < 4; ++tube) {
    const std::size_t events = sim.truth.event_counts[static_cast<std::size_t>(tube)];
    if (events == 0) continue;
    const std::size_t voxel = sim.truth.pure_voxels[static_cast<std::size_t>(tube)].front();
    const BinarySequence b = binarize_timecourse(voxel_series(sim.volume, voxel), 1.0 - events / 100.0);
    EXPECT_EQ(binary_correlation(b, to_binary(sim.truth.references.col(tube))), 1.0);
  }
}

TEST(Simgen, TravelingWavePhases) {
  const Simulation sim = simulate(noiseless(TubePhantomSpec::traveling_wave(6)));
  EXPECT_EQ(sim.volume.frames(), 240u);
  std::array<double, 4> phase{};
  for (int tube = 0; tube < 4; ++tube) {
    const std::size_t voxel = sim.truth.pure_voxels[static_cast<std::size_t>(tube)].front();
    const FrequencyPhase fp = dominant_frequency_phase(voxel_series(sim.volume, voxel));
    EXPECT_EQ(fp.bin, 15);
    phase[static_cast<std::size_t>(tube)] = fp.phase;
  }
  EXPECT_NEAR(std::abs(phase_difference_mod_pi(phase[0], phase[2])), kPi / 2, 0.02);
  const SinusoidMoments m = sinusoid_moments(1.0 / 16.0, sim.spec.signals[0].phase, sim.spec.signals[2].phase, 0, 239);
  EXPECT_NEAR(m.covariance, 0.0, 1e-12);
}

TEST(Simgen, ValidateRejectsBadSpecs) {
  TubePhantomSpec spec = TubePhantomSpec::multisignal(0);
  spec.background_sd = -1;
  EXPECT_THROW(spec.validate(), Error);
  spec = TubePhantomSpec::multisignal(0);
  spec.tubes[1].inner = spec.tubes[0].inner;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Simgen, WriteSimulationRoundTrips) {
  testing::TempDir dir("simgen");
  const Simulation sim = simulate_event_related(9);
  const SimulationFiles files = write_simulation(sim, dir.path());
  const LoadedVolume back = read_volume(files.volume);
  EXPECT_EQ(back.volume.extents, sim.volume.extents);
  double worst = 0;
  for (std::size_t i = 0; i < sim.volume.samples.size(); ++i)
    worst = std::max(worst, std::abs(back.volume.samples[i] - sim.volume.samples[i]));
  EXPECT_LT(worst, 1e-6);
  const Table signals = read_table(files.signals);
  EXPECT_EQ(signals.names, (std::vector<std::string>{"tube1", "tube2", "tube3", "tube4"}));
  EXPECT_EQ(signals.values, sim.truth.references);
  const LoadedVolume labels = read_volume(files.labels);
  for (std::size_t i = 0; i < sim.truth.labels.size(); ++i)
    EXPECT_EQ(labels.volume.samples[i], sim.truth.labels[i]);
}

}  // namespace
}  // namespace tsica
