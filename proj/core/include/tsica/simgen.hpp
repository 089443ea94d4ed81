// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsica/volume.hpp"
#include "tsica/volume_io.hpp"

namespace tsica {

struct SignalDescriptor {
  enum class Kind { sinusoid, square, bernoulli };
  Kind kind = Kind::sinusoid;
  double frequency = 0.0;    // Hz, sinusoid and square
  double phase = 0.0;        // rad, sinusoid and square
  double probability = 0.0;  // bernoulli

  static SignalDescriptor sinusoid(double f, double phi = 0.0) { return {Kind::sinusoid, f, phi, 0.0}; }
  static SignalDescriptor square(double f, double phi = 0.0) { return {Kind::square, f, phi, 0.0}; }
  static SignalDescriptor bernoulli(double p) { return {Kind::bernoulli, 0.0, 0.0, p}; }
};

/// Annulus inner <= r < outer around the in-plane centre of the grid.
struct Annulus {
  double inner = 0.0;
  double outer = 0.0;
};

struct TubePhantomSpec {
  Extents3 extents{128, 128, 3};
  std::array<Annulus, 4> tubes{};
  double background_radius = 0.0;  // background is r >= this
  std::array<SignalDescriptor, 4> signals{};
  double amplitude = 1.0;  // scales every tube signal
  double background_sd = 0.2;
  double global_sd = 0.1;
  std::size_t frames = 100;
  double time_step = 1.0;
  std::uint64_t seed = 0;

  /// Four concentric tubes, neighbours overlapping by a thin ring.
  static std::array<Annulus, 4> overlapping_tubes();
  static std::array<Annulus, 4> disjoint_tubes();

  static TubePhantomSpec multisignal(std::uint64_t seed);
  static TubePhantomSpec event_related(std::uint64_t seed);
  static TubePhantomSpec traveling_wave(std::uint64_t seed);

  /// Throws InvalidArgument when the spec is inconsistent.
  void validate() const;
};

/// Region label codes in GroundTruth::labels.
namespace region_label {
inline constexpr int outside = 0;
inline constexpr int background = 9;
/// Pure tube i is i (1..4); the overlap of tubes i and i+1 is 10 i + i + 1
/// (12, 23, 34); tube 4 reaching into the background is 49.
inline constexpr int pure(int tube) { return tube; }
inline constexpr int overlap(int tube) { return 10 * tube + tube + 1; }
inline constexpr int tube4_background = 49;
}  // namespace region_label

struct GroundTruth {
  Extents3 extents{1, 1, 1};
  std::vector<int> labels;  // one code per voxel
  std::array<std::vector<std::size_t>, 4> tube_voxels;  // full tube (pure and overlaps)
  std::array<std::vector<std::size_t>, 4> pure_voxels;  // only this tube, no background
  std::vector<std::size_t> background_voxels;
  Eigen::MatrixXd references;  // frames x 4, the noise-free tube signals (before amplitude)
  std::array<std::size_t, 4> event_counts{};  // nonzero reference samples (event variant)

  MaskVolume tube_mask(int tube) const;  // 0-based tube index
  MaskVolume pure_mask(int tube) const;
};

struct Simulation {
  Volume4D volume;
  GroundTruth truth;
  TubePhantomSpec spec;
};

/// Deterministic for a fixed spec. Noise is drawn frame by frame, voxel by
/// voxel, from one stream: background noise first (background voxels only),
/// then global noise. Bernoulli events are drawn before any noise.
Simulation simulate(const TubePhantomSpec& spec);

Simulation simulate_multisignal(std::uint64_t seed);
Simulation simulate_event_related(std::uint64_t seed);
Simulation simulate_traveling_wave(std::uint64_t seed);

/// Sample value of a periodic descriptor at time t (seconds).
double periodic_signal(const SignalDescriptor& signal, double t);

struct SimulationFiles {
  std::filesystem::path volume;
  std::filesystem::path signals;
  std::filesystem::path labels;
};

/// volume, truth_signals.tsv and truth_labels volumes under `dir`.
SimulationFiles write_simulation(const Simulation& simulation, const std::filesystem::path& dir,
                                 FormatKind format = FormatKind::nifti_single);

/// Voxel counts per label, ascending by label code.
std::vector<std::pair<int, std::size_t>> region_counts(const GroundTruth& truth);

}  // namespace tsica
