// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tsica {

/// Tab-separated table with a header row of column names and one numeric
/// column per signal.
struct Table {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // rows x names.size()
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Round-trip exact decimal form of a double.
std::string format_double(double value);

/// Ordered `key=value` lines. Blank lines and lines starting with '#' are
/// skipped on read.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(const std::filesystem::path& path, const KeyValues& entries);
KeyValues read_key_values(const std::filesystem::path& path);
std::map<std::string, std::string> to_map(const KeyValues& entries);

}  // namespace tsica
