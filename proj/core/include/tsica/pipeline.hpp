// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsica/eigen_duality.hpp"
#include "tsica/fastica.hpp"
#include "tsica/volume.hpp"
#include "tsica/volume_io.hpp"

namespace tsica {

struct IcaRunConfig {
  Orientation orientation = Orientation::temporal;
  ComponentCountMode count = ComponentCountMode::auto_rule();
  std::uint64_t seed = 0;
  std::array<double, 3> fwhm_mm{0.0, 0.0, 0.0};  // 0 disables smoothing on that axis
  FastIcaOptions ica;                             // ica.seed is overwritten by `seed`
  bool standardize = false;                       // for the whitening step
  std::size_t fallback_cap = 20;
};

/// Worker threads for data-parallel loops. Results never depend on it.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Zeroes excluded voxels at every time point.
Volume4D apply_mask(const Volume4D& volume, const MaskVolume& mask);

/// Separable Gaussian filter per frame with sigma = fwhm / (2 sqrt(2 ln 2))
/// in voxel units, taps out to 4 sigma, weights renormalized over the part
/// of the kernel that falls inside the volume.
Volume4D smooth_gaussian(const Volume4D& volume, const std::array<double, 3>& fwhm_mm);

struct UnrolledData {
  Eigen::MatrixXd matrix;  // spatial: v_l x t_l, temporal: t_l x v_l
  VoxelIndexMap voxel_map;
};

UnrolledData unroll(const Volume4D& volume, const MaskVolume& mask, Orientation orientation);

/// smooth -> mask -> unroll -> center -> count -> whiten -> FastICA.
IcaDecomposition run_ica(const Volume4D& volume, const MaskVolume& mask, const IcaRunConfig& config);

/// 0-based component index. Temporal runs fold column k of a^X, spatial
/// runs fold source k.
Volume4D component_to_volume(const IcaDecomposition& decomposition, Eigen::Index k);

/// Time courses paired with the maps: S for temporal runs, a^X for spatial.
Eigen::MatrixXd component_timecourses(const IcaDecomposition& decomposition);

struct DecompositionFiles {
  std::vector<std::filesystem::path> maps;
  std::filesystem::path timecourses;
  std::filesystem::path metadata;
};

/// Writes component_XX maps, timecourses.tsv and metadata.txt under `dir`.
/// `geometry` supplies voxel sizes and time step for the map headers.
DecompositionFiles write_decomposition(const IcaDecomposition& decomposition, const Volume4D& geometry,
                                       const std::filesystem::path& dir,
                                       FormatKind format = FormatKind::nifti_single);

std::string_view to_string(Orientation orientation);

}  // namespace tsica
