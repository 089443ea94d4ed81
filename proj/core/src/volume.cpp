// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/volume.hpp"

#include <algorithm>
#include <cmath>

namespace tsica {

Volume4D::Volume4D(Extents4 ext, double fill)
    : extents(ext), samples(ext[0] * ext[1] * ext[2] * ext[3], fill) {}

bool Volume4D::all_finite() const {
  return std::all_of(samples.begin(), samples.end(), [](double v) { return std::isfinite(v); });
}

MaskVolume MaskVolume::all(Extents3 ext) {
  MaskVolume mask;
  mask.extents = ext;
  mask.include.assign(ext[0] * ext[1] * ext[2], 1);
  return mask;
}

MaskVolume MaskVolume::from_volume(const Volume4D& volume) {
  MaskVolume mask;
  mask.extents = volume.spatial_extents();
  mask.include.resize(volume.voxels_per_frame());
  for (std::size_t v = 0; v < mask.include.size(); ++v)
    mask.include[v] = volume.samples[v] != 0.0 ? 1 : 0;
  return mask;
}

std::size_t MaskVolume::included_count() const {
  return static_cast<std::size_t>(std::count(include.begin(), include.end(), std::uint8_t{1}));
}

VoxelIndexMap VoxelIndexMap::from_mask(const MaskVolume& mask) {
  VoxelIndexMap map;
  map.extents = mask.extents;
  map.voxels.reserve(mask.included_count());
  for (std::size_t v = 0; v < mask.include.size(); ++v)
    if (mask.include[v]) map.voxels.push_back(v);
  return map;
}

}  // namespace tsica
