// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsica/volume.hpp"

namespace tsica {

enum class FormatKind { analyze75, nifti_single, nifti_pair };
enum class Endianness { little, big };

/// Sample types accepted on disk. Values are the on-disk datatype codes
/// shared by ANALYZE 7.5 and NIFTI-1.
enum class Datatype : std::int16_t { u8 = 2, i16 = 4, i32 = 8, f32 = 16, f64 = 64 };

std::string_view to_string(FormatKind kind);
std::string_view to_string(Endianness endianness);
std::string_view to_string(Datatype type);
int bits_per_sample(Datatype type);
bool is_supported_datatype(std::int16_t code);

inline constexpr std::size_t kHeaderBytes = 348;
inline constexpr std::size_t kNiftiSingleMinOffset = 352;

struct FormatInfo {
  FormatKind kind = FormatKind::nifti_single;
  Endianness endianness = Endianness::little;

  friend bool operator==(const FormatInfo&, const FormatInfo&) = default;
};

/// Parsed header. The interpreted fields are the ones the toolkit uses;
/// everything else in the 348 bytes travels in `opaque` (canonical
/// little-endian image with the interpreted byte ranges zeroed) so a
/// rewrite in the same format family loses nothing.
struct VolumeHeader {
  FormatKind format = FormatKind::nifti_single;
  Endianness endianness = Endianness::little;

  std::int16_t ndim = 4;
  std::array<std::int16_t, 4> dims{1, 1, 1, 1};
  Datatype datatype = Datatype::f32;
  /// pixdim[1..3]: voxel size (mm); pixdim[4]: time step (s); pixdim[0]: qfac (NIFTI).
  std::array<float, 8> pixdim{1.f, 1.f, 1.f, 1.f, 1.f, 0.f, 0.f, 0.f};
  float vox_offset = static_cast<float>(kNiftiSingleMinOffset);
  /// NIFTI scl_slope/scl_inter; ANALYZE stores them in funused1/funused2.
  float scale_slope = 1.f;
  float scale_intercept = 0.f;

  // NIFTI-only orientation fields, carried but never applied.
  std::uint8_t xyzt_units = 0;
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  std::array<float, 3> quatern{};  // b, c, d
  std::array<float, 3> qoffset{};  // x, y, z
  std::array<std::array<float, 4>, 3> srow{};

  std::string description;  // at most 79 characters survive a write

  std::array<std::uint8_t, kHeaderBytes> opaque{};
  /// Single-file NIFTI bytes between the header and vox_offset
  /// (extension flag plus any extensions).
  std::vector<std::uint8_t> extension;

  /// Read-time observations (e.g. slope 0 treated as 1). Not compared.
  std::vector<std::string> notes;

  Extents4 extents() const;
  std::size_t sample_count() const;
  bool has_nifti_orientation() const;

  friend bool operator==(const VolumeHeader& a, const VolumeHeader& b);
};

/// Header describing `volume` with default orientation fields.
VolumeHeader make_header(const Volume4D& volume, Datatype type,
                         FormatKind format = FormatKind::nifti_single,
                         Endianness endianness = Endianness::little);

struct LoadedVolume {
  Volume4D volume;
  VolumeHeader header;
};

struct WriteReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

enum class NiftiMode { single, pair };

FormatInfo detect_format(std::span<const std::uint8_t> header_bytes);
FormatInfo detect_format(const std::filesystem::path& path);

/// Decodes a 348-byte header image (either byte order).
VolumeHeader decode_header(std::span<const std::uint8_t> header_bytes);
/// Encodes `header` in `format` layout using `header.endianness`.
std::array<std::uint8_t, kHeaderBytes> encode_header(const VolumeHeader& header, FormatKind format);

VolumeHeader read_header(const std::filesystem::path& path);
LoadedVolume read_volume(const std::filesystem::path& path);

WriteReport write_nifti(const Volume4D& volume, const VolumeHeader& header,
                        const std::filesystem::path& path, NiftiMode mode);
WriteReport write_analyze(const Volume4D& volume, const VolumeHeader& header,
                          const std::filesystem::path& path);
/// Dispatches to write_nifti / write_analyze.
WriteReport write_volume(const Volume4D& volume, const VolumeHeader& header,
                         const std::filesystem::path& path, FormatKind format);

/// Header and data file locations for `path` under `format`
/// (`x.nii`, or the `x.hdr` / `x.img` pair).
struct VolumeFiles {
  std::filesystem::path header;
  std::filesystem::path data;
};
VolumeFiles resolve_files(const std::filesystem::path& path, FormatKind format);

}  // namespace tsica
