// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsica {

enum class ErrorCode {
  invalid_argument,
  io_error,
  unrecognized_format,
  unsupported_datatype,
  truncated_header,
  truncated_data,
  size_mismatch,
  header_volume_mismatch,
  degenerate_input,
  numerical_failure,
  rank_deficient,
  no_component,
  not_whitened,
  shape_mismatch,
  extent_mismatch,
  empty_mask,
  index_out_of_range,
  no_dominant_bin,
  zero_variance,
  all_zero,
  both_all_zero,
  degenerate_threshold,
  singular_normal_equations,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// failure class occurred so the CLI can map it onto an exit status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tsica
