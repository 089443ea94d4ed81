// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tsica/volume.hpp"

namespace tsica::cli {

enum class SliceAxis { axial, coronal, sagittal };

SliceAxis parse_axis(std::string_view name);
std::size_t axis_length(const Volume4D& volume, SliceAxis axis);

/// Row-major slice image; row 0 is the top of the picture.
struct SliceImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> overlay;  // empty, or one flag per pixel
};

SliceImage extract_slice(const Volume4D& volume, SliceAxis axis, std::size_t index, std::size_t frame);
std::vector<std::uint8_t> extract_mask_slice(const Volume4D& mask, SliceAxis axis, std::size_t index);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

/// Min-max grayscale; a constant image maps to mid gray.
std::vector<std::uint8_t> to_gray(const std::vector<double>& values);
/// Blue (negative) to white (zero) to red (positive), symmetric in max |v|.
std::vector<Rgb> to_diverging(const std::vector<double>& values);

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<std::uint8_t>& pixels);
void write_ppm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<Rgb>& pixels);

/// Writes the slice as PGM, or PPM when it is diverging or has an overlay.
void write_slice(const std::filesystem::path& path, const SliceImage& image, bool diverging);

/// Line plot of a series, black on white, min-max scaled vertically.
void write_plot(const std::filesystem::path& path, const Eigen::VectorXd& series,
                std::size_t width = 512, std::size_t height = 200);

}  // namespace tsica::cli
