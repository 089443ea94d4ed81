// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tsica/error.hpp"

namespace tsica {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorCode::invalid_argument,
         path.string() + ":" + std::to_string(line) + ": not a number: '" + text + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  if (static_cast<Eigen::Index>(table.names.size()) != table.values.cols())
    fail(ErrorCode::shape_mismatch, "table header and column count differ");
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot create " + path.string());
  for (std::size_t j = 0; j < table.names.size(); ++j) out << (j ? "\t" : "") << table.names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j)
      out << (j ? "\t" : "") << format_double(table.values(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::invalid_argument, path.string() + " is empty");
  Table table;
  for (auto& name : split_tabs(line)) table.names.push_back(trim(name));

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != table.names.size())
      fail(ErrorCode::shape_mismatch, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                          std::to_string(table.names.size()) + " fields");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, line_no));
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot create " + path.string());
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  KeyValues entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": missing '='");
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return entries;
}

std::map<std::string, std::string> to_map(const KeyValues& entries) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : entries) out[k] = v;
  return out;
}

}  // namespace tsica
