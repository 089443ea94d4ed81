// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace tsica {

/// Which index plays the role of observations. Spatial: rows are voxels
/// (v_l x t_l). Temporal: rows are time points (t_l x v_l).
enum class Orientation { spatial, temporal };

/// Column-centered (optionally standardized) data matrix.
struct CenteredMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_scales;  // 1 when not standardized or constant
  std::vector<std::uint8_t> constant_columns;
  Orientation orientation = Orientation::temporal;
  bool standardized = false;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  std::size_t constant_count() const;
};

/// Subtracts column means in place. Standardizing divides by the 1/n
/// standard deviation. Constant columns become zero columns and are flagged.
CenteredMatrix center_columns(Eigen::MatrixXd matrix, bool standardize,
                              Orientation orientation = Orientation::temporal);

/// Eigen-decomposition of the small Gram matrix X X^T.
struct GramEigens {
  Eigen::VectorXd squared_singular_values;  // d_k^2, descending, >= 0
  Eigen::MatrixXd vectors;                  // g_k as columns
};

inline constexpr Eigen::Index kDefaultGramRowCap = 4096;
inline constexpr double kDefaultRankTolerance = 1e-12;

GramEigens gram_eigens(const Eigen::MatrixXd& xdot, Eigen::Index row_cap = kDefaultGramRowCap);

/// Leading eigenpairs of the covariance X^T X / n. `lifted_vectors` holds
/// the variable-space eigenvectors; `small_vectors` holds the Gram
/// eigenvectors when they were obtained through the dual path.
struct DualEigens {
  Eigen::VectorXd eigenvalues;  // every eigenvalue above the rank threshold
  Eigen::MatrixXd small_vectors;
  Eigen::MatrixXd lifted_vectors;
  std::size_t dropped = 0;  // eigenvalues at or below the rank threshold
  bool dual_path = true;

  Eigen::Index rank() const { return eigenvalues.size(); }
};

/// f_k = X^T g_k / d_k for the first `max_vectors` retained pairs. Never
/// forms a variables x variables matrix.
DualEigens lift_eigenvectors(const Eigen::MatrixXd& xdot, const GramEigens& gram,
                             double rank_tolerance = kDefaultRankTolerance,
                             Eigen::Index max_vectors = std::numeric_limits<Eigen::Index>::max());

/// Dual path when variables outnumber observations, direct small
/// eigendecomposition of X^T X / n otherwise.
DualEigens covariance_eigens(const Eigen::MatrixXd& xdot,
                             Eigen::Index max_vectors = std::numeric_limits<Eigen::Index>::max(),
                             double rank_tolerance = kDefaultRankTolerance);

struct ComponentCountMode {
  bool automatic = true;
  std::size_t fixed = 0;

  static ComponentCountMode auto_rule() { return {true, 0}; }
  static ComponentCountMode fixed_count(std::size_t m) { return {false, m}; }
};

/// Auto: number of eigenvalues strictly above 1 (correlation spectrum
/// expected). Fixed: min(m, nonzero count).
std::size_t select_component_count(const Eigen::VectorXd& eigenvalues, ComponentCountMode mode);

/// Correlation spectrum used by the automatic count rule: eigenvalues of the
/// voxel-standardized small Gram matrix divided by the number of
/// non-constant voxels. Works on raw unrolled data in either orientation and
/// streams over voxel blocks, so no standardized copy of the data is made.
Eigen::VectorXd kaiser_spectrum(const Eigen::MatrixXd& data, Orientation orientation);

struct ReducedBasis {
  Eigen::MatrixXd vectors;      // E_red, variables x m
  Eigen::VectorXd eigenvalues;  // Lambda_red, m entries > 0

  Eigen::Index count() const { return eigenvalues.size(); }
};

struct WhitenedData {
  Eigen::MatrixXd z;  // m x n
};

struct Whitening {
  WhitenedData white;
  ReducedBasis basis;
};

/// Z = Lambda^{-1/2} E^T X^T from precomputed eigenpairs.
Whitening whiten(const Eigen::MatrixXd& xdot, const DualEigens& eigens, Eigen::Index m);

Whitening reduce_and_whiten(const Eigen::MatrixXd& xdot, Eigen::Index m);

/// Makes the largest-magnitude coordinate of each column positive (first
/// such coordinate on exact ties).
void canonicalize_signs(Eigen::MatrixXd& vectors);

}  // namespace tsica
