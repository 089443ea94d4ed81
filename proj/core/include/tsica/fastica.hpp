// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tsica/eigen_duality.hpp"
#include "tsica/volume.hpp"

namespace tsica {

enum class FastIcaScheme { deflation, symmetric };

struct FastIcaOptions {
  std::uint64_t seed = 0;
  int max_iterations = 1000;
  double tolerance = 1e-8;
  FastIcaScheme scheme = FastIcaScheme::deflation;
};

struct ComponentConvergence {
  int iterations = 0;
  double final_delta = 0.0;  // 1 - |<w_new, w_old>| at the last step
  bool converged = false;
};

struct UnmixingMatrix {
  Eigen::MatrixXd w;  // m x m, orthonormal rows
  std::vector<ComponentConvergence> convergence;
  std::uint64_t seed = 0;

  bool all_converged() const;
};

/// Kurtosis fixed-point FastICA on whitened data. Rows of the result are
/// ordered by descending |kurtosis| of the extracted sources. Components
/// that hit max_iterations are flagged, not rejected.
UnmixingMatrix fastica_kurtosis(const WhitenedData& white, const FastIcaOptions& options = {});

struct ExtractedSources {
  Eigen::MatrixXd s;  // n x m, unit-variance columns
  Eigen::MatrixXd a;  // m x m whitened-space mixing with source scales folded in
};

/// S = (W Z)^T with columns scaled to unit sample variance; A = W^T diag(sd).
ExtractedSources extract_sources(const WhitenedData& white, const Eigen::MatrixXd& w);

/// a^X = E_red Lambda_red^{1/2} A.
Eigen::MatrixXd mixing_in_data_space(const ReducedBasis& basis, const Eigen::MatrixXd& a);

/// Sum over j of the outer products a^X_j s_j^T.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& mixing, const Eigen::MatrixXd& sources);

/// Excess kurtosis of a zero-mean series (fourth moment over squared
/// variance, minus 3).
double excess_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& values);

struct IcaDecomposition {
  Eigen::MatrixXd sources;      // S, n x m
  Eigen::MatrixXd mixing;       // A, m x m
  Eigen::MatrixXd data_mixing;  // a^X
  ReducedBasis basis;
  Orientation orientation = Orientation::temporal;
  VoxelIndexMap voxel_map;
  std::uint64_t seed = 0;
  std::vector<ComponentConvergence> convergence;
  Eigen::VectorXd spectrum;  // eigenvalues used for the component count
  bool count_was_automatic = false;
  std::vector<std::string> warnings;

  Eigen::Index component_count() const { return sources.cols(); }
  Eigen::Index observations() const { return sources.rows(); }
};

}  // namespace tsica
