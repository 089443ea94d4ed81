// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/error.hpp"

namespace tsica {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::unrecognized_format: return "UnrecognizedFormat";
    case ErrorCode::unsupported_datatype: return "UnsupportedDatatype";
    case ErrorCode::truncated_header: return "TruncatedHeader";
    case ErrorCode::truncated_data: return "TruncatedData";
    case ErrorCode::size_mismatch: return "SizeMismatch";
    case ErrorCode::header_volume_mismatch: return "HeaderVolumeMismatch";
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::numerical_failure: return "NumericalFailure";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::no_component: return "NoComponent";
    case ErrorCode::not_whitened: return "NotWhitened";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::extent_mismatch: return "ExtentMismatch";
    case ErrorCode::empty_mask: return "EmptyMask";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::no_dominant_bin: return "NoDominantBin";
    case ErrorCode::zero_variance: return "ZeroVariance";
    case ErrorCode::all_zero: return "AllZero";
    case ErrorCode::both_all_zero: return "BothAllZero";
    case ErrorCode::degenerate_threshold: return "DegenerateThreshold";
    case ErrorCode::singular_normal_equations: return "SingularNormalEquations";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace tsica
