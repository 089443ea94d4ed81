// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <functional>

#include "oracles.hpp"
#include "tsica/error.hpp"
#include "tsica/random.hpp"
#include "tsica/volume_io.hpp"

namespace tsica {
namespace {

using testing::TempDir;

Volume4D ramp_volume(Extents4 ext) {
  Volume4D v(ext);
  for (std::size_t i = 0; i < v.samples.size(); ++i) v.samples[i] = 0.25 * static_cast<double>(i) - 3.0;
  return v;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

TEST(DetectFormat, SingleFileNifti) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({3, 2, 2, 2});
  write_nifti(v, make_header(v, Datatype::f32), dir / "a.nii", NiftiMode::single);
  EXPECT_EQ(detect_format(dir / "a.nii"), (FormatInfo{FormatKind::nifti_single, Endianness::little}));
}

TEST(DetectFormat, AnalyzePair) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({3, 2, 2, 2});
  write_analyze(v, make_header(v, Datatype::i16, FormatKind::analyze75), dir / "a.hdr");
  EXPECT_EQ(detect_format(dir / "a.hdr").kind, FormatKind::analyze75);
  EXPECT_EQ(detect_format(dir / "a.img").kind, FormatKind::analyze75);
}

TEST(DetectFormat, NiftiPair) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({3, 2, 2, 2});
  write_nifti(v, make_header(v, Datatype::f32, FormatKind::nifti_pair), dir / "a", NiftiMode::pair);
  EXPECT_EQ(detect_format(dir / "a.hdr").kind, FormatKind::nifti_pair);
}

TEST(DetectFormat, ByteSwappedSizeFieldReportsBigEndian) {
  testing::RawNiftiFields f;
  f.dim = {3, 4, 5, 6, 1, 1, 1, 1};
  const auto big = testing::raw_nifti_header(f, true);
  const auto little = testing::raw_nifti_header(f, false);
  EXPECT_EQ(detect_format(big).endianness, Endianness::big);
  EXPECT_EQ(detect_format(little).endianness, Endianness::little);
}

TEST(DetectFormat, ImplausibleHeaderIsRejected) {
  std::vector<std::uint8_t> junk(348, 0x5A);
  EXPECT_EQ(code_of([&] { detect_format(junk); }), ErrorCode::unrecognized_format);
}

TEST(DetectFormat, MagicWithUnsetSizeFallsBackOnDim0) {
  testing::RawNiftiFields f;
  f.sizeof_hdr = 0;
  f.dim = {3, 4, 5, 6, 1, 1, 1, 1};
  EXPECT_EQ(detect_format(testing::raw_nifti_header(f, true)).endianness, Endianness::big);
}

TEST(DetectFormat, ShortInputIsTruncatedHeader) {
  std::vector<std::uint8_t> bytes(200, 0);
  EXPECT_EQ(code_of([&] { detect_format(bytes); }), ErrorCode::truncated_header);
  TempDir dir("vio");
  write_bytes(dir / "short.nii", bytes);
  EXPECT_EQ(code_of([&] { read_header(dir / "short.nii"); }), ErrorCode::truncated_header);
}

TEST(DetectFormat, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { detect_format(std::filesystem::path("/nonexistent/x.nii")); }), ErrorCode::io_error);
}

TEST(ReadHeader, RoundTripsFields) {
  TempDir dir("vio");
  Volume4D v({128, 128, 3, 100}, 1.5);
  v.voxel_size = {2.0, 2.5, 3.0};
  v.time_step = 2.2;
  VolumeHeader h = make_header(v, Datatype::f32);
  h.qform_code = 1;
  h.quatern = {0.1f, 0.2f, 0.3f};
  h.srow[1] = {1.f, 2.f, 3.f, 4.f};
  h.description = "round trip";
  write_nifti(v, h, dir / "a.nii", NiftiMode::single);
  const VolumeHeader back = read_header(dir / "a.nii");
  EXPECT_EQ(back, h);
  EXPECT_EQ(back.extents(), (Extents4{128, 128, 3, 100}));
  EXPECT_FLOAT_EQ(back.pixdim[4], 2.2f);
}

TEST(ReadHeader, BigEndianVariantDecodesToSameLogicalFields) {
  testing::RawNiftiFields f;
  f.dim = {4, 7, 6, 5, 4, 1, 1, 1};
  f.datatype = 4;
  f.bitpix = 16;
  f.pixdim = {1, 1.5f, 2.5f, 3.5f, 2, 0, 0, 0};
  f.scl_slope = 2;
  f.scl_inter = -1;
  f.qform_code = 2;
  f.quatern = {0.5f, -0.25f, 0.125f};
  f.srow = {1, 0, 0, 10, 0, 1, 0, 20, 0, 0, 1, 30};
  f.descrip = "oracle";
  VolumeHeader big = decode_header(testing::raw_nifti_header(f, true));
  const VolumeHeader little = decode_header(testing::raw_nifti_header(f, false));
  EXPECT_EQ(big.endianness, Endianness::big);
  big.endianness = Endianness::little;
  EXPECT_EQ(big, little);
  EXPECT_EQ(little.dims, (std::array<std::int16_t, 4>{7, 6, 5, 4}));
  EXPECT_EQ(little.datatype, Datatype::i16);
  EXPECT_FLOAT_EQ(little.srow[2][3], 30.f);
  EXPECT_EQ(little.description, "oracle");
}

TEST(ReadHeader, EncoderMatchesIndependentByteWriter) {
  testing::RawNiftiFields f;
  f.dim = {4, 3, 2, 2, 5, 1, 1, 1};
  f.datatype = 64;
  f.bitpix = 64;
  f.descrip = "bytes";
  for (const bool big : {false, true}) {
    const auto raw = testing::raw_nifti_header(f, big);
    const auto encoded = encode_header(decode_header(raw), FormatKind::nifti_single);
    EXPECT_TRUE(std::equal(raw.begin(), raw.end(), encoded.begin())) << "big=" << big;
  }
}

TEST(ReadHeader, ComplexDatatypeIsUnsupported) {
  testing::RawNiftiFields f;
  f.datatype = 32;
  f.bitpix = 64;
  EXPECT_EQ(code_of([&] { decode_header(testing::raw_nifti_header(f, false)); }), ErrorCode::unsupported_datatype);
}

TEST(ReadHeader, ExtraDimensionsMustBeSingleton) {
  testing::RawNiftiFields f;
  f.dim = {5, 2, 2, 2, 2, 3, 1, 1};
  EXPECT_EQ(code_of([&] { decode_header(testing::raw_nifti_header(f, false)); }), ErrorCode::unrecognized_format);
  f.dim = {5, 2, 2, 2, 2, 1, 1, 1};
  EXPECT_EQ(decode_header(testing::raw_nifti_header(f, false)).extents(), (Extents4{2, 2, 2, 2}));
}

TEST(ReadVolume, F64RoundTripIsExact) {
  TempDir dir("vio");
  Rng rng(3);
  Volume4D v({5, 4, 3, 6});
  for (auto& s : v.samples) s = rng.normal() * 1e3;
  write_nifti(v, make_header(v, Datatype::f64), dir / "a.nii", NiftiMode::single);
  EXPECT_EQ(read_volume(dir / "a.nii").volume.samples, v.samples);
}

TEST(ReadVolume, AppliesSlopeAndIntercept) {
  TempDir dir("vio");
  testing::RawNiftiFields f;
  f.dim = {1, 1, 1, 1, 1, 1, 1, 1};
  f.datatype = 4;
  f.bitpix = 16;
  f.scl_slope = 2.0f;
  f.scl_inter = 1.0f;
  auto bytes = testing::raw_nifti_header(f, false);
  bytes.resize(352, 0);
  bytes.push_back(3);
  bytes.push_back(0);
  write_bytes(dir / "s.nii", bytes);
  const LoadedVolume loaded = read_volume(dir / "s.nii");
  ASSERT_EQ(loaded.volume.samples.size(), 1u);
  EXPECT_DOUBLE_EQ(loaded.volume.samples[0], 7.0);
}

TEST(ReadVolume, ZeroSlopeTreatedAsOneWithNote) {
  TempDir dir("vio");
  testing::RawNiftiFields f;
  f.dim = {1, 2, 1, 1, 1, 1, 1, 1};
  f.datatype = 2;
  f.bitpix = 8;
  f.scl_slope = 0.0f;
  f.scl_inter = 0.5f;
  auto bytes = testing::raw_nifti_header(f, false);
  bytes.resize(352, 0);
  bytes.push_back(4);
  bytes.push_back(9);
  write_bytes(dir / "s.nii", bytes);
  const LoadedVolume loaded = read_volume(dir / "s.nii");
  EXPECT_EQ(loaded.volume.samples, (std::vector<double>{4.5, 9.5}));
  EXPECT_FALSE(loaded.header.notes.empty());
}

TEST(ReadVolume, ShortPayloadIsTruncatedData) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 2});
  write_nifti(v, make_header(v, Datatype::f32), dir / "a.nii", NiftiMode::single);
  auto bytes = testing::file_bytes(dir / "a.nii");
  bytes.resize(bytes.size() - 4);
  write_bytes(dir / "a.nii", bytes);
  EXPECT_EQ(code_of([&] { read_volume(dir / "a.nii"); }), ErrorCode::truncated_data);
}

TEST(ReadVolume, LongPayloadIsSizeMismatch) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 2});
  write_nifti(v, make_header(v, Datatype::i16, FormatKind::nifti_pair), dir / "a", NiftiMode::pair);
  auto bytes = testing::file_bytes(dir / "a.img");
  bytes.push_back(0);
  bytes.push_back(0);
  write_bytes(dir / "a.img", bytes);
  EXPECT_EQ(code_of([&] { read_volume(dir / "a.hdr"); }), ErrorCode::size_mismatch);
}

TEST(ReadVolume, CanonicalIndexOrder) {
  TempDir dir("vio");
  Volume4D v({3, 4, 2, 2});
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t z = 0; z < 2; ++z)
      for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 3; ++x) v.at(x, y, z, t) = static_cast<double>(1000 * t + 100 * z + 10 * y + x);
  write_nifti(v, make_header(v, Datatype::i16), dir / "a.nii", NiftiMode::single);
  const auto back = read_volume(dir / "a.nii").volume;
  EXPECT_DOUBLE_EQ(back.samples[2 + 3 * (1 + 4 * (1 + 2 * 1))], 1112.0);
  EXPECT_DOUBLE_EQ(back.at(2, 3, 0, 1), 1032.0);
}

TEST(ReadVolume, BigEndianFileMatchesLittleEndian) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 3});
  for (const auto dt : {Datatype::i16, Datatype::i32, Datatype::f32, Datatype::f64}) {
    VolumeHeader h = make_header(v, dt, FormatKind::nifti_single, Endianness::big);
    write_nifti(v, h, dir / "b.nii", NiftiMode::single);
    const LoadedVolume loaded = read_volume(dir / "b.nii");
    EXPECT_EQ(loaded.header.endianness, Endianness::big);
    EXPECT_EQ(loaded.header, h);
    for (std::size_t i = 0; i < v.samples.size(); ++i)
      EXPECT_NEAR(loaded.volume.samples[i], v.samples[i], dt == Datatype::i16 || dt == Datatype::i32 ? 0.5 : 1e-6);
  }
}

TEST(WriteNifti, SingleModeRewriteIsByteIdentical) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 2});
  write_nifti(v, make_header(v, Datatype::f64), dir / "a.nii", NiftiMode::single);
  const LoadedVolume loaded = read_volume(dir / "a.nii");
  write_nifti(loaded.volume, loaded.header, dir / "b.nii", NiftiMode::single);
  EXPECT_EQ(testing::file_bytes(dir / "a.nii"), testing::file_bytes(dir / "b.nii"));
}

TEST(WriteNifti, PairModeWritesTwoFilesWithFixedHeaderLength) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 2});
  const WriteReport report = write_nifti(v, make_header(v, Datatype::f32, FormatKind::nifti_pair), dir / "p.nii",
                                         NiftiMode::pair);
  ASSERT_EQ(report.files.size(), 2u);
  EXPECT_EQ(std::filesystem::file_size(dir / "p.hdr"), 348u);
  EXPECT_EQ(std::filesystem::file_size(dir / "p.img"), v.samples.size() * 4);
  const auto hdr = testing::file_bytes(dir / "p.hdr");
  EXPECT_EQ(std::memcmp(hdr.data() + 344, "ni1\0", 4), 0);
}

TEST(WriteNifti, ExtentsMismatchIsRejected) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({4, 3, 2, 2});
  VolumeHeader h = make_header(v, Datatype::f32);
  h.dims[0] = 5;
  EXPECT_EQ(code_of([&] { write_nifti(v, h, dir / "a.nii", NiftiMode::single); }),
            ErrorCode::header_volume_mismatch);
}

TEST(WriteNifti, SmallOffsetRaisedWithWarning) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({2, 2, 1, 1});
  VolumeHeader h = make_header(v, Datatype::f32);
  h.vox_offset = 0;
  const WriteReport report = write_nifti(v, h, dir / "a.nii", NiftiMode::single);
  EXPECT_FALSE(report.warnings.empty());
  EXPECT_FLOAT_EQ(read_header(dir / "a.nii").vox_offset, 352.f);
}

TEST(WriteNifti, PreservesUninterpretedBytes) {
  TempDir dir("vio");
  testing::RawNiftiFields f;
  f.dim = {3, 2, 2, 1, 1, 1, 1, 1};
  auto bytes = testing::raw_nifti_header(f, true);
  const char* name = "db_name_field";
  std::memcpy(bytes.data() + 14, name, 13);  // ANALYZE-era db_name, unused by NIFTI
  bytes[228] = 'A';                           // aux_file
  bytes.resize(352, 0);
  bytes.resize(352 + 4 * 4, 0);
  write_bytes(dir / "a.nii", bytes);
  const LoadedVolume loaded = read_volume(dir / "a.nii");
  write_nifti(loaded.volume, loaded.header, dir / "b.nii", NiftiMode::single);
  EXPECT_EQ(testing::file_bytes(dir / "b.nii"), bytes);
}

TEST(WriteAnalyze, RoundTripKeepsGeometryAndDatatype) {
  TempDir dir("vio");
  Volume4D v = ramp_volume({5, 4, 3, 2});
  v.voxel_size = {1.5, 2.0, 4.0};
  v.time_step = 3.0;
  write_analyze(v, make_header(v, Datatype::f32, FormatKind::analyze75), dir / "a.img");
  const LoadedVolume loaded = read_volume(dir / "a.img");
  EXPECT_EQ(loaded.header.format, FormatKind::analyze75);
  EXPECT_EQ(loaded.header.datatype, Datatype::f32);
  EXPECT_EQ(loaded.volume.extents, v.extents);
  EXPECT_EQ(loaded.volume.voxel_size, v.voxel_size);
  EXPECT_DOUBLE_EQ(loaded.volume.time_step, 3.0);
  EXPECT_EQ(detect_format(dir / "a.hdr").kind, FormatKind::analyze75);
}

TEST(WriteAnalyze, DropsNiftiFieldsWithWarning) {
  TempDir dir("vio");
  const Volume4D v = ramp_volume({2, 2, 2, 1});
  VolumeHeader h = make_header(v, Datatype::f32);
  h.sform_code = 1;
  h.srow[0] = {1, 0, 0, 5};
  const WriteReport report = write_analyze(v, h, dir / "a");
  ASSERT_FALSE(report.warnings.empty());
  EXPECT_NE(report.warnings.front().find("NIFTI-only"), std::string::npos);
  const VolumeHeader back = read_header(dir / "a.hdr");
  EXPECT_EQ(back.sform_code, 0);
  EXPECT_FALSE(back.has_nifti_orientation());
}

TEST(WriteAnalyze, ScalingSurvivesInUnusedFloatSlots) {
  TempDir dir("vio");
  Volume4D v({3, 1, 1, 1});
  v.samples = {1.0, 7.0, 13.0};
  VolumeHeader h = make_header(v, Datatype::u8, FormatKind::analyze75);
  h.scale_slope = 2.0f;
  h.scale_intercept = 1.0f;
  write_analyze(v, h, dir / "s");
  const auto raw = testing::file_bytes(dir / "s.img");
  EXPECT_EQ(raw, (std::vector<std::uint8_t>{0, 3, 6}));
  EXPECT_EQ(read_volume(dir / "s.hdr").volume.samples, v.samples);
}

TEST(WriteVolume, IntegerQuantizationClampsToRange) {
  TempDir dir("vio");
  Volume4D v({4, 1, 1, 1});
  v.samples = {-5.0, 0.4, 254.6, 1000.0};
  write_volume(v, make_header(v, Datatype::u8), dir / "q", FormatKind::nifti_single);
  EXPECT_EQ(read_volume(dir / "q.nii").volume.samples, (std::vector<double>{0.0, 0.0, 255.0, 255.0}));
}

TEST(ResolveFiles, NamesPerFormat) {
  EXPECT_EQ(resolve_files("d/x.nii", FormatKind::nifti_pair).header, std::filesystem::path("d/x.hdr"));
  EXPECT_EQ(resolve_files("d/x.img", FormatKind::analyze75).data, std::filesystem::path("d/x.img"));
  EXPECT_EQ(resolve_files("d/x", FormatKind::nifti_single).data, std::filesystem::path("d/x.nii"));
}

}  // namespace
}  // namespace tsica
