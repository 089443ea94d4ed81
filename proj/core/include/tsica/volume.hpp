// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tsica {

using Extents3 = std::array<std::size_t, 3>;
using Extents4 = std::array<std::size_t, 4>;

/// Dense 4D intensity array. Sample (x, y, z, t) lives at
/// x + nx * (y + ny * (z + nz * t)).
struct Volume4D {
  Extents4 extents{1, 1, 1, 1};
  std::vector<double> samples;
  std::array<double, 3> voxel_size{1.0, 1.0, 1.0};  // mm
  double time_step = 1.0;                            // s

  Volume4D() = default;
  explicit Volume4D(Extents4 ext, double fill = 0.0);

  std::size_t voxels_per_frame() const { return extents[0] * extents[1] * extents[2]; }
  std::size_t frames() const { return extents[3]; }
  Extents3 spatial_extents() const { return {extents[0], extents[1], extents[2]}; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z, std::size_t t = 0) const {
    return x + extents[0] * (y + extents[1] * (z + extents[2] * t));
  }
  double& at(std::size_t x, std::size_t y, std::size_t z, std::size_t t = 0) {
    return samples[index(x, y, z, t)];
  }
  double at(std::size_t x, std::size_t y, std::size_t z, std::size_t t = 0) const {
    return samples[index(x, y, z, t)];
  }

  /// Value of spatial voxel `voxel` (linear, x fastest) at frame `t`.
  double voxel_value(std::size_t voxel, std::size_t t) const {
    return samples[voxel + voxels_per_frame() * t];
  }

  bool all_finite() const;

  friend bool operator==(const Volume4D&, const Volume4D&) = default;
};

/// Boolean voxel inclusion over a 3D grid.
struct MaskVolume {
  Extents3 extents{1, 1, 1};
  std::vector<std::uint8_t> include;

  static MaskVolume all(Extents3 ext);
  /// Voxels whose frame-0 value is non-zero.
  static MaskVolume from_volume(const Volume4D& volume);

  std::size_t voxel_count() const { return extents[0] * extents[1] * extents[2]; }
  std::size_t included_count() const;
  bool contains(std::size_t voxel) const { return include[voxel] != 0; }
};

/// Row/column index j <-> linear spatial voxel index, in canonical
/// x-fastest order restricted to the mask.
struct VoxelIndexMap {
  Extents3 extents{1, 1, 1};
  std::vector<std::size_t> voxels;

  static VoxelIndexMap from_mask(const MaskVolume& mask);

  std::size_t size() const { return voxels.size(); }
  /// Scatters one value per mapped voxel into a single-frame volume; voxels
  /// outside the map are zero.
  template <typename Values>
  Volume4D fold(const Values& values) const {
    Volume4D out({extents[0], extents[1], extents[2], 1});
    for (std::size_t j = 0; j < voxels.size(); ++j) out.samples[voxels[j]] = values[j];
    return out;
  }
};

}  // namespace tsica
