// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tsica/error.hpp"
#include "tsica/random.hpp"
#include "tsica/text_io.hpp"
#include "tsica/volume_io.hpp"

namespace tsica {

namespace {

constexpr double kPi = std::numbers::pi;

MaskVolume mask_from(const Extents3& extents, const std::vector<std::size_t>& voxels) {
  MaskVolume mask;
  mask.extents = extents;
  mask.include.assign(extents[0] * extents[1] * extents[2], 0);
  for (const auto v : voxels) mask.include[v] = 1;
  return mask;
}

}  // namespace

std::array<Annulus, 4> TubePhantomSpec::overlapping_tubes() {
  // Roughly equal areas (about a tenth of a 128 x 128 slice each) with
  // thin shared rings between neighbours.
  return {{{0.0, 22.9}, {21.0, 31.0}, {29.7, 37.5}, {36.4, 43.0}}};
}

std::array<Annulus, 4> TubePhantomSpec::disjoint_tubes() {
  return {{{0.0, 23.0}, {23.0, 32.5}, {32.5, 39.5}, {39.5, 45.5}}};
}

TubePhantomSpec TubePhantomSpec::multisignal(std::uint64_t seed) {
  TubePhantomSpec spec;
  spec.tubes = overlapping_tubes();
  spec.background_radius = 42.0;
  spec.signals = {SignalDescriptor::sinusoid(1.0 / 11.0), SignalDescriptor::square(1.0 / 10.0),
                  SignalDescriptor::sinusoid(1.0 / 16.0), SignalDescriptor::square(1.0 / 4.0)};
  spec.frames = 100;
  spec.seed = seed;
  return spec;
}

TubePhantomSpec TubePhantomSpec::event_related(std::uint64_t seed) {
  TubePhantomSpec spec;
  spec.tubes = disjoint_tubes();
  spec.background_radius = 45.5;
  // Expected event counts 9, 17, 11 and 7 over 100 frames.
  spec.signals = {SignalDescriptor::bernoulli(0.09), SignalDescriptor::bernoulli(0.17),
                  SignalDescriptor::bernoulli(0.11), SignalDescriptor::bernoulli(0.07)};
  spec.frames = 100;
  spec.seed = seed;
  return spec;
}

TubePhantomSpec TubePhantomSpec::traveling_wave(std::uint64_t seed) {
  TubePhantomSpec spec;
  spec.tubes = overlapping_tubes();
  spec.background_radius = 42.0;
  const double f = 1.0 / 16.0;
  spec.signals = {SignalDescriptor::sinusoid(f, 0.0), SignalDescriptor::sinusoid(f, kPi / 4.0),
                  SignalDescriptor::sinusoid(f, kPi / 2.0), SignalDescriptor::sinusoid(f, 3.0 * kPi / 4.0)};
  spec.frames = 240;
  spec.seed = seed;
  return spec;
}

void TubePhantomSpec::validate() const {
  if (extents[0] == 0 || extents[1] == 0 || extents[2] == 0)
    fail(ErrorCode::invalid_argument, "phantom extents must be positive");
  if (frames < 2) fail(ErrorCode::invalid_argument, "phantom needs at least 2 frames");
  if (!(time_step > 0.0)) fail(ErrorCode::invalid_argument, "time step must be > 0");
  if (!(background_sd >= 0.0) || !(global_sd >= 0.0))
    fail(ErrorCode::invalid_argument, "noise standard deviations must be >= 0");
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    if (!(tubes[i].outer > tubes[i].inner) || tubes[i].inner < 0.0)
      fail(ErrorCode::invalid_argument, "tube radii must satisfy 0 <= inner < outer");
    if (i > 0 && !(tubes[i].inner > tubes[i - 1].inner && tubes[i].outer > tubes[i - 1].outer))
      fail(ErrorCode::invalid_argument, "tube radii must be strictly increasing");
    if (i > 1 && tubes[i].inner < tubes[i - 2].outer)
      fail(ErrorCode::invalid_argument, "only neighbouring tubes may overlap");
    const auto& s = signals[i];
    if (s.kind == SignalDescriptor::Kind::bernoulli && !(s.probability >= 0.0 && s.probability <= 1.0))
      fail(ErrorCode::invalid_argument, "Bernoulli probability outside [0, 1]");
  }
  if (background_radius < tubes[2].outer)
    fail(ErrorCode::invalid_argument, "background may only meet the outermost tube");
}

MaskVolume GroundTruth::tube_mask(int tube) const {
  return mask_from(extents, tube_voxels.at(static_cast<std::size_t>(tube)));
}

MaskVolume GroundTruth::pure_mask(int tube) const {
  return mask_from(extents, pure_voxels.at(static_cast<std::size_t>(tube)));
}

double periodic_signal(const SignalDescriptor& signal, double t) {
  switch (signal.kind) {
    case SignalDescriptor::Kind::sinusoid:
      return std::sin(2.0 * kPi * signal.frequency * t + signal.phase);
    case SignalDescriptor::Kind::square: {
      // +1 on the first half of each period, -1 on the second. The small
      // offset keeps sample times that land on a period boundary (up to
      // round-off) at the start of the new period.
      const double x = signal.frequency * t + signal.phase / (2.0 * kPi);
      const double frac = x - std::floor(x + 1e-9);
      return frac < 0.5 ? 1.0 : -1.0;
    }
    case SignalDescriptor::Kind::bernoulli:
      break;
  }
  fail(ErrorCode::invalid_argument, "Bernoulli signals are not periodic");
}

Simulation simulate(const TubePhantomSpec& spec) {
  spec.validate();
  Simulation sim;
  sim.spec = spec;
  const Extents3 ext = spec.extents;
  const std::size_t per_frame = ext[0] * ext[1] * ext[2];
  const std::size_t frames = spec.frames;

  GroundTruth& truth = sim.truth;
  truth.extents = ext;
  truth.labels.assign(per_frame, region_label::outside);
  std::vector<std::uint8_t> membership(per_frame, 0);  // bit i: tube i, bit 4: background
  const double cx = (static_cast<double>(ext[0]) - 1.0) / 2.0;
  const double cy = (static_cast<double>(ext[1]) - 1.0) / 2.0;
  for (std::size_t z = 0; z < ext[2]; ++z)
    for (std::size_t y = 0; y < ext[1]; ++y)
      for (std::size_t x = 0; x < ext[0]; ++x) {
        const std::size_t v = x + ext[0] * (y + ext[1] * z);
        const double r = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
        std::uint8_t bits = 0;
        for (std::size_t i = 0; i < 4; ++i)
          if (r >= spec.tubes[i].inner && r < spec.tubes[i].outer) bits |= static_cast<std::uint8_t>(1u << i);
        if (r >= spec.background_radius) bits |= 0x10;
        membership[v] = bits;

        const bool bg = bits & 0x10;
        int tubes_hit = 0;
        int first = -1;
        for (int i = 0; i < 4; ++i)
          if (bits & (1u << i)) {
            ++tubes_hit;
            if (first < 0) first = i;
            truth.tube_voxels[static_cast<std::size_t>(i)].push_back(v);
          }
        if (bg) truth.background_voxels.push_back(v);
        if (tubes_hit == 1 && !bg) {
          truth.labels[v] = region_label::pure(first + 1);
          truth.pure_voxels[static_cast<std::size_t>(first)].push_back(v);
        } else if (tubes_hit == 2) {
          truth.labels[v] = region_label::overlap(first + 1);
        } else if (tubes_hit == 1 && bg) {
          truth.labels[v] = first == 3 ? region_label::tube4_background : region_label::background;
        } else if (bg) {
          truth.labels[v] = region_label::background;
        }
      }

  Rng rng(spec.seed);
  truth.references.resize(static_cast<Eigen::Index>(frames), 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = spec.signals[i];
    std::size_t events = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      double value;
      if (s.kind == SignalDescriptor::Kind::bernoulli) {
        value = rng.bernoulli(s.probability) ? 1.0 : 0.0;
      } else {
        value = periodic_signal(s, static_cast<double>(t) * spec.time_step);
      }
      if (value != 0.0) ++events;
      truth.references(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = value;
    }
    truth.event_counts[i] = events;
  }

  Volume4D& volume = sim.volume;
  volume = Volume4D({ext[0], ext[1], ext[2], frames});
  volume.time_step = spec.time_step;
  for (std::size_t t = 0; t < frames; ++t) {
    std::array<double, 4> level{};
    for (std::size_t i = 0; i < 4; ++i)
      level[i] = spec.amplitude * truth.references(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
    double* frame = volume.samples.data() + per_frame * t;
    for (std::size_t v = 0; v < per_frame; ++v) {
      const std::uint8_t bits = membership[v];
      double value = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        if (bits & (1u << i)) value += level[i];
      if (bits & 0x10) value += spec.background_sd * rng.normal();
      value += spec.global_sd * rng.normal();
      frame[v] = value;
    }
  }
  return sim;
}

Simulation simulate_multisignal(std::uint64_t seed) { return simulate(TubePhantomSpec::multisignal(seed)); }
Simulation simulate_event_related(std::uint64_t seed) { return simulate(TubePhantomSpec::event_related(seed)); }
Simulation simulate_traveling_wave(std::uint64_t seed) { return simulate(TubePhantomSpec::traveling_wave(seed)); }

std::vector<std::pair<int, std::size_t>> region_counts(const GroundTruth& truth) {
  std::map<int, std::size_t> counts;
  for (const int label : truth.labels) ++counts[label];
  return {counts.begin(), counts.end()};
}

SimulationFiles write_simulation(const Simulation& simulation, const std::filesystem::path& dir,
                                 FormatKind format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());

  SimulationFiles files;
  VolumeHeader header = make_header(simulation.volume, Datatype::f64, format);
  header.description = "tsica phantom";
  files.volume = write_volume(simulation.volume, header, dir / "volume", format).files.front();

  Table table;
  table.names = {"tube1", "tube2", "tube3", "tube4"};
  table.values = simulation.truth.references;
  files.signals = dir / "truth_signals.tsv";
  write_table(files.signals, table);

  const Extents3 ext = simulation.truth.extents;
  Volume4D labels({ext[0], ext[1], ext[2], 1});
  for (std::size_t v = 0; v < simulation.truth.labels.size(); ++v)
    labels.samples[v] = simulation.truth.labels[v];
  VolumeHeader label_header = make_header(labels, Datatype::u8, format);
  label_header.description = "tsica phantom regions";
  files.labels = write_volume(labels, label_header, dir / "truth_labels", format).files.front();
  return files;
}

}  // namespace tsica
