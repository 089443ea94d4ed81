// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "tsica/error.hpp"

namespace tsica {

namespace fs = std::filesystem;

namespace {

// Multi-byte fields of each layout: {offset, width, count}. Used to move
// between file byte order and the canonical little-endian image.
struct SwapField {
  std::size_t offset;
  std::size_t width;
  std::size_t count;
};

constexpr SwapField kNiftiSwap[] = {
    {0, 4, 1},   {32, 4, 1},  {36, 2, 1},  {40, 2, 8},  {56, 4, 3},  {68, 2, 1},
    {70, 2, 1},  {72, 2, 1},  {74, 2, 1},  {76, 4, 8},  {108, 4, 1}, {112, 4, 1},
    {116, 4, 1}, {120, 2, 1}, {124, 4, 1}, {128, 4, 1}, {132, 4, 1}, {136, 4, 1},
    {140, 4, 1}, {144, 4, 1}, {252, 2, 2}, {256, 4, 6}, {280, 4, 12},
};

constexpr SwapField kAnalyzeSwap[] = {
    {0, 4, 1},   {32, 4, 1},  {36, 2, 1},  {40, 2, 8},  {68, 2, 1},  {70, 2, 1},
    {72, 2, 1},  {74, 2, 1},  {76, 4, 8},  {108, 4, 1}, {112, 4, 1}, {116, 4, 1},
    {120, 4, 1}, {124, 4, 1}, {128, 4, 1}, {132, 4, 1}, {136, 4, 1}, {140, 4, 1},
    {144, 4, 1}, {316, 4, 8},
};

// Byte ranges {offset, length} owned by interpreted VolumeHeader fields.
struct Range {
  std::size_t offset;
  std::size_t length;
};

constexpr Range kNiftiInterpreted[] = {
    {0, 4},     {40, 16},  {70, 2},   {72, 2},   {76, 32},  {108, 4}, {112, 4},
    {116, 4},   {123, 1},  {148, 80}, {252, 4},  {256, 24}, {280, 48}, {344, 4},
};

constexpr Range kAnalyzeInterpreted[] = {
    {0, 4}, {40, 16}, {70, 2}, {72, 2}, {76, 32}, {108, 4}, {112, 4}, {116, 4}, {148, 80},
};

constexpr std::size_t kOffsetSizeofHdr = 0;
constexpr std::size_t kOffsetRegular = 38;
constexpr std::size_t kOffsetDim = 40;
constexpr std::size_t kOffsetDatatype = 70;
constexpr std::size_t kOffsetBitpix = 72;
constexpr std::size_t kOffsetPixdim = 76;
constexpr std::size_t kOffsetVoxOffset = 108;
constexpr std::size_t kOffsetSlope = 112;
constexpr std::size_t kOffsetIntercept = 116;
constexpr std::size_t kOffsetXyztUnits = 123;
constexpr std::size_t kOffsetDescrip = 148;
constexpr std::size_t kDescripLength = 80;
constexpr std::size_t kOffsetQform = 252;
constexpr std::size_t kOffsetSform = 254;
constexpr std::size_t kOffsetQuatern = 256;
constexpr std::size_t kOffsetQoffset = 268;
constexpr std::size_t kOffsetSrow = 280;
constexpr std::size_t kOffsetMagic = 344;

using HeaderBytes = std::array<std::uint8_t, kHeaderBytes>;

bool is_nifti(FormatKind kind) { return kind != FormatKind::analyze75; }

std::span<const SwapField> swap_table(FormatKind kind) {
  if (is_nifti(kind)) return kNiftiSwap;
  return kAnalyzeSwap;
}

std::span<const Range> interpreted_ranges(FormatKind kind) {
  if (is_nifti(kind)) return kNiftiInterpreted;
  return kAnalyzeInterpreted;
}

void swap_fields(HeaderBytes& bytes, FormatKind kind) {
  for (const auto& field : swap_table(kind)) {
    for (std::size_t i = 0; i < field.count; ++i) {
      auto* p = bytes.data() + field.offset + i * field.width;
      std::reverse(p, p + field.width);
    }
  }
}

template <typename T>
T load_le(const std::uint8_t* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* b = reinterpret_cast<std::uint8_t*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

template <typename T>
void store_le(std::uint8_t* p, T value) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* b = reinterpret_cast<std::uint8_t*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  std::memcpy(p, &value, sizeof(T));
}

template <typename T>
T load(const std::uint8_t* p, Endianness order) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  const bool file_little = order == Endianness::little;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) {
    auto* b = reinterpret_cast<std::uint8_t*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

template <typename T>
void store(std::uint8_t* p, T value, Endianness order) {
  const bool file_little = order == Endianness::little;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) {
    auto* b = reinterpret_cast<std::uint8_t*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  std::memcpy(p, &value, sizeof(T));
}

HeaderBytes default_opaque() {
  HeaderBytes bytes{};
  bytes[kOffsetRegular] = 'r';
  return bytes;
}

void zero_interpreted(HeaderBytes& bytes, FormatKind kind) {
  for (const auto& r : interpreted_ranges(kind))
    std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(r.offset), r.length, std::uint8_t{0});
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

fs::path strip_volume_extension(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".nii" || ext == ".hdr" || ext == ".img") {
    fs::path base = path;
    base.replace_extension();
    return base;
  }
  return path;
}

fs::path with_suffix(const fs::path& base, const char* suffix) {
  fs::path out = base;
  out += suffix;
  return out;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) fail(ErrorCode::io_error, "cannot size " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
    fail(ErrorCode::io_error, "cannot read " + path.string());
  return bytes;
}

std::vector<std::uint8_t> read_prefix(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> first,
                std::span<const std::uint8_t> second = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(first.data()), static_cast<std::streamsize>(first.size()));
  if (!second.empty())
    out.write(reinterpret_cast<const char*>(second.data()),
              static_cast<std::streamsize>(second.size()));
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

// Locates the header file for a read request: `.img` maps to its `.hdr`,
// and an extension-less name tries `.nii` then `.hdr`.
fs::path header_path_for_read(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".img") return with_suffix(strip_volume_extension(path), ".hdr");
  if (ext == ".nii" || ext == ".hdr") return path;
  if (fs::exists(path)) return path;
  for (const char* suffix : {".nii", ".hdr"}) {
    fs::path candidate = with_suffix(path, suffix);
    if (fs::exists(candidate)) return candidate;
  }
  return path;
}

double effective_slope(const VolumeHeader& header) {
  return header.scale_slope == 0.f ? 1.0 : static_cast<double>(header.scale_slope);
}

template <typename T>
void decode_samples(const std::uint8_t* data, std::size_t count, Endianness order, double slope,
                    double intercept, std::vector<double>& out) {
  constexpr std::size_t width = sizeof(T);
  for (std::size_t i = 0; i < count; ++i) {
    const T raw = load<T>(data + i * width, order);
    out[i] = static_cast<double>(raw) * slope + intercept;
  }
}

template <typename T>
void encode_samples(std::span<const double> values, Endianness order, double slope,
                    double intercept, std::uint8_t* out) {
  constexpr std::size_t width = sizeof(T);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double scaled = (values[i] - intercept) / slope;
    T raw;
    if constexpr (std::is_integral_v<T>) {
      const double lo = static_cast<double>(std::numeric_limits<T>::min());
      const double hi = static_cast<double>(std::numeric_limits<T>::max());
      raw = static_cast<T>(std::clamp(std::nearbyint(scaled), lo, hi));
    } else {
      raw = static_cast<T>(scaled);
    }
    store<T>(out + i * width, raw, order);
  }
}

std::vector<std::uint8_t> encode_payload(const Volume4D& volume, const VolumeHeader& header) {
  const std::size_t width = static_cast<std::size_t>(bits_per_sample(header.datatype) / 8);
  std::vector<std::uint8_t> payload(volume.samples.size() * width);
  const double slope = effective_slope(header);
  const double intercept = header.scale_intercept;
  const std::span<const double> values(volume.samples);
  switch (header.datatype) {
    case Datatype::u8: encode_samples<std::uint8_t>(values, header.endianness, slope, intercept, payload.data()); break;
    case Datatype::i16: encode_samples<std::int16_t>(values, header.endianness, slope, intercept, payload.data()); break;
    case Datatype::i32: encode_samples<std::int32_t>(values, header.endianness, slope, intercept, payload.data()); break;
    case Datatype::f32: encode_samples<float>(values, header.endianness, slope, intercept, payload.data()); break;
    case Datatype::f64: encode_samples<double>(values, header.endianness, slope, intercept, payload.data()); break;
  }
  return payload;
}

void check_consistent(const Volume4D& volume, const VolumeHeader& header) {
  if (volume.extents != header.extents()) {
    std::ostringstream msg;
    msg << "volume extents " << volume.extents[0] << 'x' << volume.extents[1] << 'x'
        << volume.extents[2] << 'x' << volume.extents[3] << " do not match header dims";
    fail(ErrorCode::header_volume_mismatch, msg.str());
  }
  if (volume.samples.size() != header.sample_count())
    fail(ErrorCode::header_volume_mismatch, "sample count does not match header dims");
  if (!is_supported_datatype(static_cast<std::int16_t>(header.datatype)))
    fail(ErrorCode::unsupported_datatype, "cannot write datatype code " +
                                              std::to_string(static_cast<int>(header.datatype)));
}

std::size_t offset_of(const VolumeHeader& header) {
  const float offset = header.vox_offset;
  if (!(offset >= 0.f) || offset != std::floor(offset))
    fail(ErrorCode::invalid_argument, "vox_offset must be a non-negative integer");
  return static_cast<std::size_t>(offset);
}

}  // namespace

std::string_view to_string(FormatKind kind) {
  switch (kind) {
    case FormatKind::analyze75: return "analyze75";
    case FormatKind::nifti_single: return "nifti_single";
    case FormatKind::nifti_pair: return "nifti_pair";
  }
  return "unknown";
}

std::string_view to_string(Endianness endianness) {
  return endianness == Endianness::little ? "little" : "big";
}

std::string_view to_string(Datatype type) {
  switch (type) {
    case Datatype::u8: return "u8";
    case Datatype::i16: return "i16";
    case Datatype::i32: return "i32";
    case Datatype::f32: return "f32";
    case Datatype::f64: return "f64";
  }
  return "unknown";
}

int bits_per_sample(Datatype type) {
  switch (type) {
    case Datatype::u8: return 8;
    case Datatype::i16: return 16;
    case Datatype::i32: return 32;
    case Datatype::f32: return 32;
    case Datatype::f64: return 64;
  }
  return 0;
}

bool is_supported_datatype(std::int16_t code) {
  return code == 2 || code == 4 || code == 8 || code == 16 || code == 64;
}

Extents4 VolumeHeader::extents() const {
  Extents4 ext{1, 1, 1, 1};
  for (std::size_t i = 0; i < 4; ++i)
    if (static_cast<int>(i) < ndim) ext[i] = static_cast<std::size_t>(dims[i]);
  return ext;
}

std::size_t VolumeHeader::sample_count() const {
  const auto ext = extents();
  return ext[0] * ext[1] * ext[2] * ext[3];
}

bool VolumeHeader::has_nifti_orientation() const {
  if (qform_code != 0 || sform_code != 0 || xyzt_units != 0) return true;
  auto nonzero = [](float v) { return v != 0.f; };
  if (std::any_of(quatern.begin(), quatern.end(), nonzero)) return true;
  if (std::any_of(qoffset.begin(), qoffset.end(), nonzero)) return true;
  for (const auto& row : srow)
    if (std::any_of(row.begin(), row.end(), nonzero)) return true;
  return false;
}

bool operator==(const VolumeHeader& a, const VolumeHeader& b) {
  return a.format == b.format && a.endianness == b.endianness && a.ndim == b.ndim &&
         a.dims == b.dims && a.datatype == b.datatype && a.pixdim == b.pixdim &&
         a.vox_offset == b.vox_offset && a.scale_slope == b.scale_slope &&
         a.scale_intercept == b.scale_intercept && a.xyzt_units == b.xyzt_units &&
         a.qform_code == b.qform_code && a.sform_code == b.sform_code && a.quatern == b.quatern &&
         a.qoffset == b.qoffset && a.srow == b.srow && a.description == b.description &&
         a.opaque == b.opaque && a.extension == b.extension;
}

VolumeHeader make_header(const Volume4D& volume, Datatype type, FormatKind format,
                         Endianness endianness) {
  VolumeHeader header;
  header.format = format;
  header.endianness = endianness;
  header.datatype = type;
  header.ndim = volume.extents[3] > 1 ? 4 : 3;
  for (std::size_t i = 0; i < 4; ++i) header.dims[i] = static_cast<std::int16_t>(volume.extents[i]);
  header.pixdim = {1.f,
                   static_cast<float>(volume.voxel_size[0]),
                   static_cast<float>(volume.voxel_size[1]),
                   static_cast<float>(volume.voxel_size[2]),
                   static_cast<float>(volume.time_step),
                   0.f,
                   0.f,
                   0.f};
  header.vox_offset = format == FormatKind::nifti_single ? static_cast<float>(kNiftiSingleMinOffset) : 0.f;
  header.opaque = default_opaque();
  zero_interpreted(header.opaque, format);
  if (format == FormatKind::nifti_single) header.extension.assign(4, 0);
  return header;
}

FormatInfo detect_format(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes)
    fail(ErrorCode::truncated_header, "header needs 348 bytes, got " + std::to_string(bytes.size()));

  FormatInfo info;
  const char* magic = reinterpret_cast<const char*>(bytes.data() + kOffsetMagic);
  const bool magic_single = std::memcmp(magic, "n+1\0", 4) == 0;
  const bool magic_pair = std::memcmp(magic, "ni1\0", 4) == 0;
  info.kind = magic_single ? FormatKind::nifti_single
              : magic_pair ? FormatKind::nifti_pair
                           : FormatKind::analyze75;

  const auto size_le = load<std::int32_t>(bytes.data() + kOffsetSizeofHdr, Endianness::little);
  const auto size_be = load<std::int32_t>(bytes.data() + kOffsetSizeofHdr, Endianness::big);
  if (size_le == static_cast<std::int32_t>(kHeaderBytes)) {
    info.endianness = Endianness::little;
  } else if (size_be == static_cast<std::int32_t>(kHeaderBytes)) {
    info.endianness = Endianness::big;
  } else if (magic_single || magic_pair) {
    // Some writers leave sizeof_hdr unset; dim[0] in [1, 7] settles the order.
    const auto dim0_le = load<std::int16_t>(bytes.data() + kOffsetDim, Endianness::little);
    const auto dim0_be = load<std::int16_t>(bytes.data() + kOffsetDim, Endianness::big);
    if (dim0_le >= 1 && dim0_le <= 7) {
      info.endianness = Endianness::little;
    } else if (dim0_be >= 1 && dim0_be <= 7) {
      info.endianness = Endianness::big;
    } else {
      fail(ErrorCode::unrecognized_format, "NIFTI magic present but byte order undeterminable");
    }
  } else {
    fail(ErrorCode::unrecognized_format, "neither header size nor magic field is plausible");
  }
  return info;
}

FormatInfo detect_format(const fs::path& path) {
  const auto bytes = read_prefix(header_path_for_read(path), kHeaderBytes);
  return detect_format(bytes);
}

VolumeHeader decode_header(std::span<const std::uint8_t> bytes) {
  const FormatInfo info = detect_format(bytes);

  HeaderBytes le{};
  std::copy_n(bytes.begin(), kHeaderBytes, le.begin());
  if (info.endianness == Endianness::big) swap_fields(le, info.kind);

  VolumeHeader header;
  header.format = info.kind;
  header.endianness = info.endianness;

  const auto* p = le.data();
  const auto ndim = load_le<std::int16_t>(p + kOffsetDim);
  if (ndim < 1 || ndim > 7)
    fail(ErrorCode::unrecognized_format, "dim[0] = " + std::to_string(ndim) + " outside [1, 7]");
  header.ndim = ndim;
  for (int i = 0; i < 7; ++i) {
    const auto extent = load_le<std::int16_t>(p + kOffsetDim + 2 * (i + 1));
    if (i >= ndim) continue;
    if (extent < 1)
      fail(ErrorCode::unrecognized_format, "dim[" + std::to_string(i + 1) + "] must be >= 1");
    if (i < 4) {
      header.dims[static_cast<std::size_t>(i)] = extent;
    } else if (extent != 1) {
      fail(ErrorCode::unrecognized_format, "more than four non-singleton dimensions");
    }
  }

  const auto code = load_le<std::int16_t>(p + kOffsetDatatype);
  if (!is_supported_datatype(code))
    fail(ErrorCode::unsupported_datatype, "datatype code " + std::to_string(code));
  header.datatype = static_cast<Datatype>(code);
  const auto bitpix = load_le<std::int16_t>(p + kOffsetBitpix);
  if (bitpix != bits_per_sample(header.datatype))
    header.notes.push_back("bitpix " + std::to_string(bitpix) + " inconsistent with datatype; datatype wins");

  for (std::size_t i = 0; i < 8; ++i) header.pixdim[i] = load_le<float>(p + kOffsetPixdim + 4 * i);
  header.vox_offset = load_le<float>(p + kOffsetVoxOffset);
  header.scale_slope = load_le<float>(p + kOffsetSlope);
  header.scale_intercept = load_le<float>(p + kOffsetIntercept);
  if (header.scale_slope == 0.f) header.notes.push_back("scale slope 0 treated as 1");

  const char* descrip = reinterpret_cast<const char*>(p + kOffsetDescrip);
  header.description.assign(descrip, strnlen(descrip, kDescripLength));

  if (is_nifti(info.kind)) {
    header.xyzt_units = p[kOffsetXyztUnits];
    header.qform_code = load_le<std::int16_t>(p + kOffsetQform);
    header.sform_code = load_le<std::int16_t>(p + kOffsetSform);
    for (std::size_t i = 0; i < 3; ++i) {
      header.quatern[i] = load_le<float>(p + kOffsetQuatern + 4 * i);
      header.qoffset[i] = load_le<float>(p + kOffsetQoffset + 4 * i);
    }
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        header.srow[r][c] = load_le<float>(p + kOffsetSrow + 16 * r + 4 * c);
  }

  header.opaque = le;
  zero_interpreted(header.opaque, info.kind);
  return header;
}

std::array<std::uint8_t, kHeaderBytes> encode_header(const VolumeHeader& header, FormatKind format) {
  const bool same_family = is_nifti(header.format) == is_nifti(format);
  HeaderBytes le = same_family ? header.opaque : default_opaque();
  zero_interpreted(le, format);
  auto* p = le.data();

  store_le<std::int32_t>(p + kOffsetSizeofHdr, static_cast<std::int32_t>(kHeaderBytes));
  store_le<std::int16_t>(p + kOffsetDim, header.ndim);
  for (int i = 0; i < 7; ++i) {
    const std::int16_t extent = i < 4 ? header.dims[static_cast<std::size_t>(i)] : std::int16_t{1};
    store_le<std::int16_t>(p + kOffsetDim + 2 * (i + 1), i < header.ndim ? extent : std::int16_t{1});
  }
  store_le<std::int16_t>(p + kOffsetDatatype, static_cast<std::int16_t>(header.datatype));
  store_le<std::int16_t>(p + kOffsetBitpix, static_cast<std::int16_t>(bits_per_sample(header.datatype)));
  for (std::size_t i = 0; i < 8; ++i) store_le<float>(p + kOffsetPixdim + 4 * i, header.pixdim[i]);
  store_le<float>(p + kOffsetVoxOffset, header.vox_offset);
  store_le<float>(p + kOffsetSlope, header.scale_slope);
  store_le<float>(p + kOffsetIntercept, header.scale_intercept);

  const std::size_t descrip_len = std::min(header.description.size(), kDescripLength - 1);
  std::memcpy(p + kOffsetDescrip, header.description.data(), descrip_len);

  if (is_nifti(format)) {
    p[kOffsetXyztUnits] = header.xyzt_units;
    store_le<std::int16_t>(p + kOffsetQform, header.qform_code);
    store_le<std::int16_t>(p + kOffsetSform, header.sform_code);
    for (std::size_t i = 0; i < 3; ++i) {
      store_le<float>(p + kOffsetQuatern + 4 * i, header.quatern[i]);
      store_le<float>(p + kOffsetQoffset + 4 * i, header.qoffset[i]);
    }
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        store_le<float>(p + kOffsetSrow + 16 * r + 4 * c, header.srow[r][c]);
    std::memcpy(p + kOffsetMagic, format == FormatKind::nifti_single ? "n+1\0" : "ni1\0", 4);
  }

  if (header.endianness == Endianness::big) swap_fields(le, format);
  return le;
}

VolumeFiles resolve_files(const fs::path& path, FormatKind format) {
  const fs::path base = strip_volume_extension(path);
  if (format == FormatKind::nifti_single) {
    const fs::path file = with_suffix(base, ".nii");
    return {file, file};
  }
  return {with_suffix(base, ".hdr"), with_suffix(base, ".img")};
}

VolumeHeader read_header(const fs::path& path) {
  const fs::path header_path = header_path_for_read(path);
  const auto prefix = read_prefix(header_path, kHeaderBytes);
  VolumeHeader header = decode_header(prefix);
  if (header.format == FormatKind::nifti_single) {
    const std::size_t offset = offset_of(header);
    if (offset < kNiftiSingleMinOffset)
      fail(ErrorCode::unrecognized_format, "single-file NIFTI with vox_offset below 352");
    auto head = read_prefix(header_path, offset);
    if (head.size() < offset) fail(ErrorCode::truncated_data, "file ends before vox_offset");
    header.extension.assign(head.begin() + kHeaderBytes, head.end());
  }
  return header;
}

LoadedVolume read_volume(const fs::path& path) {
  const fs::path header_path = header_path_for_read(path);
  LoadedVolume loaded{Volume4D{}, read_header(header_path)};
  const VolumeHeader& header = loaded.header;

  const fs::path data_path = header.format == FormatKind::nifti_single
                                 ? header_path
                                 : with_suffix(strip_volume_extension(header_path), ".img");
  const auto bytes = read_file(data_path);
  const std::size_t offset = offset_of(header);
  const std::size_t width = static_cast<std::size_t>(bits_per_sample(header.datatype) / 8);
  const std::size_t count = header.sample_count();
  const std::size_t expected = offset + count * width;
  if (bytes.size() < expected)
    fail(ErrorCode::truncated_data, data_path.string() + ": expected " + std::to_string(expected) +
                                        " bytes, found " + std::to_string(bytes.size()));
  if (bytes.size() > expected)
    fail(ErrorCode::size_mismatch, data_path.string() + ": " + std::to_string(bytes.size() - expected) +
                                       " bytes beyond the payload declared by the header");

  Volume4D& volume = loaded.volume;
  volume.extents = header.extents();
  volume.samples.resize(count);
  volume.voxel_size = {header.pixdim[1], header.pixdim[2], header.pixdim[3]};
  volume.time_step = header.pixdim[4];

  const double slope = effective_slope(header);
  const double intercept = header.scale_intercept;
  const auto* data = bytes.data() + offset;
  switch (header.datatype) {
    case Datatype::u8: decode_samples<std::uint8_t>(data, count, header.endianness, slope, intercept, volume.samples); break;
    case Datatype::i16: decode_samples<std::int16_t>(data, count, header.endianness, slope, intercept, volume.samples); break;
    case Datatype::i32: decode_samples<std::int32_t>(data, count, header.endianness, slope, intercept, volume.samples); break;
    case Datatype::f32: decode_samples<float>(data, count, header.endianness, slope, intercept, volume.samples); break;
    case Datatype::f64: decode_samples<double>(data, count, header.endianness, slope, intercept, volume.samples); break;
  }
  return loaded;
}

WriteReport write_nifti(const Volume4D& volume, const VolumeHeader& header, const fs::path& path,
                        NiftiMode mode) {
  check_consistent(volume, header);
  WriteReport report;
  const FormatKind format = mode == NiftiMode::single ? FormatKind::nifti_single : FormatKind::nifti_pair;
  if (!is_nifti(header.format))
    report.warnings.push_back("ANALYZE header bytes outside the interpreted fields were not carried over");

  VolumeHeader out = header;
  out.format = format;
  std::vector<std::uint8_t> prefix;
  if (format == FormatKind::nifti_single) {
    std::size_t offset = offset_of(out);
    if (offset < kNiftiSingleMinOffset) {
      report.warnings.push_back("vox_offset raised to 352 for single-file NIFTI");
      offset = kNiftiSingleMinOffset;
      out.vox_offset = static_cast<float>(offset);
    }
    out.extension.resize(offset - kHeaderBytes, 0);
  } else {
    prefix.assign(offset_of(out), 0);
    out.extension.clear();
  }

  const auto header_bytes = encode_header(out, format);
  auto payload = encode_payload(volume, out);
  const VolumeFiles files = resolve_files(path, format);
  if (format == FormatKind::nifti_single) {
    std::vector<std::uint8_t> head(header_bytes.begin(), header_bytes.end());
    head.insert(head.end(), out.extension.begin(), out.extension.end());
    write_file(files.header, head, payload);
    report.files.push_back(files.header);
  } else {
    write_file(files.header, header_bytes);
    write_file(files.data, prefix, payload);
    report.files = {files.header, files.data};
  }
  return report;
}

WriteReport write_analyze(const Volume4D& volume, const VolumeHeader& header, const fs::path& path) {
  check_consistent(volume, header);
  WriteReport report;
  VolumeHeader out = header;
  if (is_nifti(header.format)) {
    if (header.has_nifti_orientation())
      report.warnings.push_back("NIFTI-only fields dropped: qform/sform codes, quaternion, offsets, srow, xyzt_units");
    report.warnings.push_back("NIFTI header bytes outside the interpreted fields were not carried over");
  }
  out.format = FormatKind::analyze75;
  out.xyzt_units = 0;
  out.qform_code = out.sform_code = 0;
  out.quatern = {};
  out.qoffset = {};
  out.srow = {};
  out.extension.clear();

  const auto header_bytes = encode_header(out, FormatKind::analyze75);
  const std::vector<std::uint8_t> prefix(offset_of(out), 0);
  auto payload = encode_payload(volume, out);
  const VolumeFiles files = resolve_files(path, FormatKind::analyze75);
  write_file(files.header, header_bytes);
  write_file(files.data, prefix, payload);
  report.files = {files.header, files.data};
  return report;
}

WriteReport write_volume(const Volume4D& volume, const VolumeHeader& header, const fs::path& path,
                         FormatKind format) {
  switch (format) {
    case FormatKind::nifti_single: return write_nifti(volume, header, path, NiftiMode::single);
    case FormatKind::nifti_pair: return write_nifti(volume, header, path, NiftiMode::pair);
    case FormatKind::analyze75: return write_analyze(volume, header, path);
  }
  fail(ErrorCode::invalid_argument, "unknown format");
}

}  // namespace tsica
