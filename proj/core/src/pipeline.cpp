// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "tsica/error.hpp"
#include "tsica/text_io.hpp"

namespace tsica {

namespace {

std::atomic<unsigned> g_threads{1};

// Runs body(i) for i in [0, count) over the configured worker threads.
// Work items are independent, so the result is the same for any thread count.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

void check_mask(const Volume4D& volume, const MaskVolume& mask) {
  if (mask.extents != volume.spatial_extents() || mask.include.size() != volume.voxels_per_frame())
    fail(ErrorCode::extent_mismatch, "mask extents differ from the volume's spatial extents");
}

std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::floor(4.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  for (int k = -radius; k <= radius; ++k)
    taps[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * (k * k) / (sigma * sigma));
  return taps;
}

// One separable pass along `axis` of a single frame.
void smooth_axis(const double* in, double* out, const Extents3& ext, int axis,
                 const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? ext[0] : ext[0] * ext[1];
  const auto len = static_cast<long>(ext[static_cast<std::size_t>(axis)]);
  const std::size_t total = ext[0] * ext[1] * ext[2];
  for (std::size_t v = 0; v < total; ++v) {
    const std::size_t coord =
        axis == 0 ? v % ext[0] : axis == 1 ? (v / ext[0]) % ext[1] : v / (ext[0] * ext[1]);
    const std::size_t base = v - coord * stride;
    double sum = 0.0;
    double weight = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const long c = static_cast<long>(coord) + k;
      if (c < 0 || c >= len) continue;
      const double tap = taps[static_cast<std::size_t>(k + radius)];
      sum += tap * in[base + static_cast<std::size_t>(c) * stride];
      weight += tap;
    }
    out[v] = sum / weight;
  }
}

std::string component_name(Eigen::Index k) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "component_%02ld", static_cast<long>(k + 1));
  return buffer;
}

}  // namespace

void set_thread_count(unsigned threads) { g_threads = std::max(1u, threads); }
unsigned thread_count() { return g_threads; }

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::spatial ? "spatial" : "temporal";
}

Volume4D apply_mask(const Volume4D& volume, const MaskVolume& mask) {
  check_mask(volume, mask);
  Volume4D out = volume;
  const std::size_t per_frame = volume.voxels_per_frame();
  for (std::size_t t = 0; t < volume.frames(); ++t)
    for (std::size_t v = 0; v < per_frame; ++v)
      if (!mask.contains(v)) out.samples[v + per_frame * t] = 0.0;
  return out;
}

Volume4D smooth_gaussian(const Volume4D& volume, const std::array<double, 3>& fwhm_mm) {
  const double fwhm_to_sigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  std::array<std::vector<double>, 3> taps;
  bool any = false;
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(fwhm_mm[a] >= 0.0)) fail(ErrorCode::invalid_argument, "FWHM must be >= 0");
    if (fwhm_mm[a] == 0.0) continue;
    const double sigma = fwhm_mm[a] * fwhm_to_sigma / volume.voxel_size[a];
    taps[a] = gaussian_taps(sigma);
    any = any || taps[a].size() > 1;
  }
  if (!any) return volume;

  Volume4D out = volume;
  const Extents3 ext = volume.spatial_extents();
  const std::size_t per_frame = volume.voxels_per_frame();
  parallel_for(volume.frames(), [&](std::size_t t) {
    std::vector<double> scratch(per_frame);
    double* frame = out.samples.data() + per_frame * t;
    for (int a = 0; a < 3; ++a) {
      const auto& k = taps[static_cast<std::size_t>(a)];
      if (k.size() <= 1) continue;
      smooth_axis(frame, scratch.data(), ext, a, k);
      std::copy(scratch.begin(), scratch.end(), frame);
    }
  });
  return out;
}

UnrolledData unroll(const Volume4D& volume, const MaskVolume& mask, Orientation orientation) {
  check_mask(volume, mask);
  UnrolledData out;
  out.voxel_map = VoxelIndexMap::from_mask(mask);
  const auto voxels = static_cast<Eigen::Index>(out.voxel_map.size());
  const auto frames = static_cast<Eigen::Index>(volume.frames());
  if (voxels == 0) fail(ErrorCode::empty_mask, "mask selects no voxel");

  const std::size_t per_frame = volume.voxels_per_frame();
  if (orientation == Orientation::temporal) {
    out.matrix.resize(frames, voxels);
    for (Eigen::Index j = 0; j < voxels; ++j) {
      const std::size_t v = out.voxel_map.voxels[static_cast<std::size_t>(j)];
      for (Eigen::Index t = 0; t < frames; ++t)
        out.matrix(t, j) = volume.samples[v + per_frame * static_cast<std::size_t>(t)];
    }
  } else {
    out.matrix.resize(voxels, frames);
    for (Eigen::Index t = 0; t < frames; ++t)
      for (Eigen::Index j = 0; j < voxels; ++j)
        out.matrix(j, t) = volume.samples[out.voxel_map.voxels[static_cast<std::size_t>(j)] +
                                          per_frame * static_cast<std::size_t>(t)];
  }
  return out;
}

IcaDecomposition run_ica(const Volume4D& volume, const MaskVolume& mask, const IcaRunConfig& config) {
  check_mask(volume, mask);
  if (volume.frames() < 2) fail(ErrorCode::invalid_argument, "need at least 2 time points");
  if (mask.included_count() == 0) fail(ErrorCode::empty_mask, "mask selects no voxel");
  if (mask.included_count() < 2) fail(ErrorCode::invalid_argument, "need at least 2 voxels in the mask");
  if (!volume.all_finite()) fail(ErrorCode::invalid_argument, "volume has non-finite samples");

  IcaDecomposition out;
  out.orientation = config.orientation;
  out.seed = config.seed;
  out.count_was_automatic = config.count.automatic;

  // Masking happens implicitly: unroll only reads included voxels.
  UnrolledData unrolled = [&] {
    const bool smoothing = std::any_of(config.fwhm_mm.begin(), config.fwhm_mm.end(),
                                       [](double f) { return f != 0.0; });
    if (!smoothing) return unroll(volume, mask, config.orientation);
    return unroll(smooth_gaussian(volume, config.fwhm_mm), mask, config.orientation);
  }();
  out.voxel_map = std::move(unrolled.voxel_map);

  const auto frames = static_cast<std::size_t>(volume.frames());
  std::size_t m = 0;
  if (config.count.automatic) {
    out.spectrum = kaiser_spectrum(unrolled.matrix, config.orientation);
    try {
      m = select_component_count(out.spectrum, config.count);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_component) throw;
      m = std::min(frames - 1, config.fallback_cap);
      out.warnings.push_back("automatic count found no eigenvalue above 1; using " + std::to_string(m));
    }
  }

  CenteredMatrix centered = center_columns(std::move(unrolled.matrix), config.standardize, config.orientation);
  const Eigen::Index wanted = static_cast<Eigen::Index>(config.count.automatic ? m : config.count.fixed);
  const DualEigens eigens = covariance_eigens(centered.values, wanted);
  if (config.count.automatic) {
    if (static_cast<Eigen::Index>(m) > eigens.rank()) {
      m = static_cast<std::size_t>(eigens.rank());
      out.warnings.push_back("component count limited to the data rank " + std::to_string(m));
    }
  } else {
    out.spectrum = eigens.eigenvalues;
    m = select_component_count(eigens.eigenvalues, config.count);
  }

  Whitening whitening = whiten(centered.values, eigens, static_cast<Eigen::Index>(m));
  centered.values.resize(0, 0);

  FastIcaOptions options = config.ica;
  options.seed = config.seed;
  UnmixingMatrix unmixing = fastica_kurtosis(whitening.white, options);
  for (std::size_t k = 0; k < unmixing.convergence.size(); ++k)
    if (!unmixing.convergence[k].converged)
      out.warnings.push_back("component " + std::to_string(k + 1) + " did not converge");

  ExtractedSources extracted = extract_sources(whitening.white, unmixing.w);
  out.data_mixing = mixing_in_data_space(whitening.basis, extracted.a);
  out.sources = std::move(extracted.s);
  out.mixing = std::move(extracted.a);
  out.basis = std::move(whitening.basis);
  out.convergence = std::move(unmixing.convergence);
  return out;
}

Volume4D component_to_volume(const IcaDecomposition& decomposition, Eigen::Index k) {
  const Eigen::Index m = decomposition.component_count();
  if (k < 0 || k >= m)
    fail(ErrorCode::index_out_of_range,
         "component " + std::to_string(k) + " outside [0, " + std::to_string(m) + ")");
  const Eigen::MatrixXd& spatial = decomposition.orientation == Orientation::temporal
                                       ? decomposition.data_mixing
                                       : decomposition.sources;
  const Eigen::VectorXd column = spatial.col(k);
  return decomposition.voxel_map.fold(column);
}

Eigen::MatrixXd component_timecourses(const IcaDecomposition& decomposition) {
  return decomposition.orientation == Orientation::temporal ? decomposition.sources
                                                            : decomposition.data_mixing;
}

DecompositionFiles write_decomposition(const IcaDecomposition& decomposition, const Volume4D& geometry,
                                       const std::filesystem::path& dir, FormatKind format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());

  DecompositionFiles files;
  const Eigen::Index m = decomposition.component_count();
  for (Eigen::Index k = 0; k < m; ++k) {
    Volume4D map = component_to_volume(decomposition, k);
    map.voxel_size = geometry.voxel_size;
    map.time_step = geometry.time_step;
    VolumeHeader header = make_header(map, Datatype::f64, format);
    header.description = "tsica " + std::string(to_string(decomposition.orientation)) + " " + component_name(k);
    const auto report = write_volume(map, header, dir / component_name(k), format);
    files.maps.push_back(report.files.front());
  }

  Table table;
  table.values = component_timecourses(decomposition);
  for (Eigen::Index k = 0; k < m; ++k) table.names.push_back(component_name(k));
  files.timecourses = dir / "timecourses.tsv";
  write_table(files.timecourses, table);

  KeyValues meta;
  meta.emplace_back("orientation", std::string(to_string(decomposition.orientation)));
  meta.emplace_back("seed", std::to_string(decomposition.seed));
  meta.emplace_back("components", std::to_string(m));
  meta.emplace_back("count_mode", decomposition.count_was_automatic ? "auto" : "fixed");
  meta.emplace_back("observations", std::to_string(decomposition.observations()));
  meta.emplace_back("voxels", std::to_string(decomposition.voxel_map.size()));
  meta.emplace_back("time_step", format_double(geometry.time_step));
  std::string spectrum;
  const Eigen::Index shown = std::min<Eigen::Index>(decomposition.spectrum.size(), 20);
  for (Eigen::Index k = 0; k < shown; ++k)
    spectrum += (k ? "," : "") + format_double(decomposition.spectrum(k));
  meta.emplace_back("spectrum", spectrum);
  for (std::size_t k = 0; k < decomposition.convergence.size(); ++k) {
    const auto& c = decomposition.convergence[k];
    meta.emplace_back(component_name(static_cast<Eigen::Index>(k)) + ".iterations", std::to_string(c.iterations));
    meta.emplace_back(component_name(static_cast<Eigen::Index>(k)) + ".converged", c.converged ? "true" : "false");
    meta.emplace_back(component_name(static_cast<Eigen::Index>(k)) + ".final_delta", format_double(c.final_delta));
  }
  for (std::size_t i = 0; i < decomposition.warnings.size(); ++i)
    meta.emplace_back("warning." + std::to_string(i + 1), decomposition.warnings[i]);
  files.metadata = dir / "metadata.txt";
  write_key_values(files.metadata, meta);
  return files;
}

}  // namespace tsica
