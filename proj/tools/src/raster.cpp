// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "tsica/error.hpp"

namespace tsica::cli {

namespace {

// Image axes (horizontal, vertical) and fixed axis for each orientation.
struct AxisLayout {
  int horizontal;
  int vertical;
  int fixed;
};

AxisLayout layout(SliceAxis axis) {
  switch (axis) {
    case SliceAxis::axial: return {0, 1, 2};
    case SliceAxis::coronal: return {0, 2, 1};
    case SliceAxis::sagittal: return {1, 2, 0};
  }
  return {0, 1, 2};
}

template <typename Pixel>
void write_binary(const std::filesystem::path& path, const std::string& magic, std::size_t width,
                  std::size_t height, const std::vector<Pixel>& pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot create " + path.string());
  out << magic << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size() * sizeof(Pixel)));
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace

SliceAxis parse_axis(std::string_view name) {
  if (name == "axial" || name == "z") return SliceAxis::axial;
  if (name == "coronal" || name == "y") return SliceAxis::coronal;
  if (name == "sagittal" || name == "x") return SliceAxis::sagittal;
  fail(ErrorCode::invalid_argument, "unknown slice axis '" + std::string(name) + "'");
}

std::size_t axis_length(const Volume4D& volume, SliceAxis axis) {
  return volume.extents[static_cast<std::size_t>(layout(axis).fixed)];
}

SliceImage extract_slice(const Volume4D& volume, SliceAxis axis, std::size_t index, std::size_t frame) {
  const AxisLayout l = layout(axis);
  if (index >= axis_length(volume, axis))
    fail(ErrorCode::index_out_of_range, "slice " + std::to_string(index) + " outside [0, " +
                                            std::to_string(axis_length(volume, axis)) + ")");
  if (frame >= volume.frames())
    fail(ErrorCode::index_out_of_range, "frame " + std::to_string(frame) + " outside the volume");
  SliceImage image;
  image.width = volume.extents[static_cast<std::size_t>(l.horizontal)];
  image.height = volume.extents[static_cast<std::size_t>(l.vertical)];
  image.values.resize(image.width * image.height);
  for (std::size_t row = 0; row < image.height; ++row) {
    for (std::size_t col = 0; col < image.width; ++col) {
      std::array<std::size_t, 3> c{};
      c[static_cast<std::size_t>(l.horizontal)] = col;
      c[static_cast<std::size_t>(l.vertical)] = image.height - 1 - row;  // up is increasing index
      c[static_cast<std::size_t>(l.fixed)] = index;
      image.values[row * image.width + col] = volume.at(c[0], c[1], c[2], frame);
    }
  }
  return image;
}

std::vector<std::uint8_t> extract_mask_slice(const Volume4D& mask, SliceAxis axis, std::size_t index) {
  const SliceImage image = extract_slice(mask, axis, index, 0);
  std::vector<std::uint8_t> flags(image.values.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = image.values[i] != 0.0;
  return flags;
}

std::vector<std::uint8_t> to_gray(const std::vector<double>& values) {
  std::vector<std::uint8_t> out(values.size(), 128);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (values[i] - *lo) / span));
  return out;
}

std::vector<Rgb> to_diverging(const std::vector<double>& values) {
  std::vector<Rgb> out(values.size(), Rgb{255, 255, 255});
  double peak = 0.0;
  for (const double v : values) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = std::clamp(values[i] / peak, -1.0, 1.0);
    const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(a))));
    out[i] = a >= 0.0 ? Rgb{255, fade, fade} : Rgb{fade, fade, 255};
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<std::uint8_t>& pixels) {
  write_binary(path, "P5", width, height, pixels);
}

void write_ppm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<Rgb>& pixels) {
  static_assert(sizeof(Rgb) == 3);
  write_binary(path, "P6", width, height, pixels);
}

void write_slice(const std::filesystem::path& path, const SliceImage& image, bool diverging) {
  if (!diverging && image.overlay.empty()) {
    write_pgm(path, image.width, image.height, to_gray(image.values));
    return;
  }
  std::vector<Rgb> pixels;
  if (diverging) {
    pixels = to_diverging(image.values);
  } else {
    const auto gray = to_gray(image.values);
    pixels.reserve(gray.size());
    for (const auto g : gray) pixels.push_back({g, g, g});
  }
  for (std::size_t i = 0; i < image.overlay.size(); ++i)
    if (image.overlay[i]) pixels[i] = Rgb{255, 200, 0};
  write_ppm(path, image.width, image.height, pixels);
}

void write_plot(const std::filesystem::path& path, const Eigen::VectorXd& series, std::size_t width,
                std::size_t height) {
  if (series.size() < 2) fail(ErrorCode::invalid_argument, "plot needs at least 2 samples");
  std::vector<std::uint8_t> pixels(width * height, 255);
  const double lo = series.minCoeff();
  const double hi = series.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  const auto n = static_cast<double>(series.size() - 1);
  auto to_px = [&](Eigen::Index i) {
    const double x = static_cast<double>(i) / n * static_cast<double>(width - 1);
    const double y = (1.0 - (series(i) - lo) / span) * static_cast<double>(height - 1);
    return std::pair<long, long>{std::lround(x), std::lround(y)};
  };
  for (Eigen::Index i = 0; i + 1 < series.size(); ++i) {
    auto [x0, y0] = to_px(i);
    const auto [x1, y1] = to_px(i + 1);
    const long dx = std::abs(x1 - x0);
    const long dy = -std::abs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1;
    const long sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    while (true) {
      pixels[static_cast<std::size_t>(y0) * width + static_cast<std::size_t>(x0)] = 0;
      if (x0 == x1 && y0 == y1) break;
      const long e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  write_pgm(path, width, height, pixels);
}

}  // namespace tsica::cli
