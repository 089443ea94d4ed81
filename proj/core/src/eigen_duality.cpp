// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/eigen_duality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsica/error.hpp"

namespace tsica {

namespace {

// Voxel block width for the streamed correlation Gram matrix.
constexpr Eigen::Index kKaiserBlock = 2048;

struct SortedEigens {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SortedEigens sorted_symmetric_eigens(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numerical_failure, "symmetric eigensolver did not converge");

  const Eigen::Index n = symmetric.rows();
  const double trace = std::max(symmetric.trace(), 0.0);
  SortedEigens out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  // Solver output is ascending; reverse it.
  for (Eigen::Index k = 0; k < n; ++k) {
    double value = solver.eigenvalues()(n - 1 - k);
    if (value < 0.0) {
      if (value < -1e-10 * trace)
        fail(ErrorCode::numerical_failure,
             "eigenvalue " + std::to_string(value) + " is negative beyond round-off");
      value = 0.0;
    }
    out.values(k) = value;
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  canonicalize_signs(out.vectors);
  return out;
}

Eigen::Index count_above(const Eigen::VectorXd& values, double tolerance) {
  if (values.size() == 0 || values(0) <= 0.0) return 0;
  const double floor = tolerance * values(0);
  Eigen::Index count = 0;
  while (count < values.size() && values(count) > floor) ++count;
  return count;
}

}  // namespace

std::size_t CenteredMatrix::constant_count() const {
  return static_cast<std::size_t>(std::count(constant_columns.begin(), constant_columns.end(), 1));
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, k));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors.rows() > 0 && vectors(best, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

CenteredMatrix center_columns(Eigen::MatrixXd matrix, bool standardize, Orientation orientation) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index p = matrix.cols();
  if (n < 2) fail(ErrorCode::invalid_argument, "centering needs at least 2 rows");
  if (!matrix.allFinite()) fail(ErrorCode::invalid_argument, "matrix has non-finite entries");

  CenteredMatrix out;
  out.orientation = orientation;
  out.standardized = standardize;
  out.column_means.resize(p);
  out.column_scales.setOnes(p);
  out.constant_columns.assign(static_cast<std::size_t>(p), 0);

  std::size_t constant = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto col = matrix.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    out.column_means(j) = mean;
    const double first = col(0);
    const bool is_constant = (col.array() == first).all();
    if (is_constant) {
      col.setZero();
      out.constant_columns[static_cast<std::size_t>(j)] = 1;
      ++constant;
      continue;
    }
    if (standardize) {
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
      col /= sd;
      out.column_scales(j) = sd;
    }
  }
  if (p > 0 && constant == static_cast<std::size_t>(p))
    fail(ErrorCode::degenerate_input, "every column has zero variance");
  out.values = std::move(matrix);
  return out;
}

GramEigens gram_eigens(const Eigen::MatrixXd& xdot, Eigen::Index row_cap) {
  if (xdot.rows() > row_cap)
    fail(ErrorCode::invalid_argument, "Gram path limited to " + std::to_string(row_cap) +
                                          " rows, got " + std::to_string(xdot.rows()));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(xdot.rows(), xdot.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xdot);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  auto sorted = sorted_symmetric_eigens(gram);
  return {std::move(sorted.values), std::move(sorted.vectors)};
}

DualEigens lift_eigenvectors(const Eigen::MatrixXd& xdot, const GramEigens& gram,
                             double rank_tolerance, Eigen::Index max_vectors) {
  const Eigen::Index rank = count_above(gram.squared_singular_values, rank_tolerance);
  if (rank == 0) fail(ErrorCode::rank_deficient, "no eigenvalue above the rank threshold");
  const Eigen::Index lifted = std::min(rank, std::max<Eigen::Index>(max_vectors, 0));
  const double n = static_cast<double>(xdot.rows());

  DualEigens out;
  out.dual_path = true;
  out.eigenvalues = gram.squared_singular_values.head(rank) / n;
  out.dropped = static_cast<std::size_t>(gram.squared_singular_values.size() - rank);
  out.small_vectors = gram.vectors.leftCols(lifted);
  out.lifted_vectors.resize(xdot.cols(), lifted);
  for (Eigen::Index k = 0; k < lifted; ++k) {
    const double d = std::sqrt(gram.squared_singular_values(k));
    out.lifted_vectors.col(k).noalias() = xdot.transpose() * gram.vectors.col(k);
    out.lifted_vectors.col(k) /= d;
  }
  return out;
}

DualEigens covariance_eigens(const Eigen::MatrixXd& xdot, Eigen::Index max_vectors,
                             double rank_tolerance) {
  if (xdot.cols() > xdot.rows())
    return lift_eigenvectors(xdot, gram_eigens(xdot), rank_tolerance, max_vectors);

  const double n = static_cast<double>(xdot.rows());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(xdot.cols(), xdot.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(xdot.transpose(), 1.0 / n);
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  auto sorted = sorted_symmetric_eigens(cov);

  const Eigen::Index rank = count_above(sorted.values, rank_tolerance);
  if (rank == 0) fail(ErrorCode::rank_deficient, "no eigenvalue above the rank threshold");
  const Eigen::Index kept = std::min(rank, std::max<Eigen::Index>(max_vectors, 0));

  DualEigens out;
  out.dual_path = false;
  out.eigenvalues = sorted.values.head(rank);
  out.dropped = static_cast<std::size_t>(sorted.values.size() - rank);
  out.lifted_vectors = sorted.vectors.leftCols(kept);
  return out;
}

std::size_t select_component_count(const Eigen::VectorXd& eigenvalues, ComponentCountMode mode) {
  if (mode.automatic) {
    const auto count = static_cast<std::size_t>((eigenvalues.array() > 1.0).count());
    if (count == 0) fail(ErrorCode::no_component, "no eigenvalue exceeds 1");
    return count;
  }
  if (mode.fixed < 1) fail(ErrorCode::invalid_argument, "fixed component count must be >= 1");
  const auto nonzero = static_cast<std::size_t>((eigenvalues.array() > 0.0).count());
  if (nonzero == 0) fail(ErrorCode::rank_deficient, "no nonzero eigenvalue");
  return std::min(mode.fixed, nonzero);
}

Eigen::VectorXd kaiser_spectrum(const Eigen::MatrixXd& data, Orientation orientation) {
  // Voxels are columns in the temporal layout and rows in the spatial one.
  const bool voxels_are_columns = orientation == Orientation::temporal;
  const Eigen::Index frames = voxels_are_columns ? data.rows() : data.cols();
  const Eigen::Index voxels = voxels_are_columns ? data.cols() : data.rows();
  if (frames < 2) fail(ErrorCode::invalid_argument, "need at least 2 time points");
  if (frames > kDefaultGramRowCap)
    fail(ErrorCode::invalid_argument, "too many time points for the correlation spectrum");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(frames, frames);
  Eigen::MatrixXd block(frames, std::min(kKaiserBlock, std::max<Eigen::Index>(voxels, 1)));
  Eigen::Index used = 0;
  for (Eigen::Index start = 0; start < voxels; start += kKaiserBlock) {
    const Eigen::Index width = std::min(kKaiserBlock, voxels - start);
    Eigen::Index filled = 0;
    for (Eigen::Index j = start; j < start + width; ++j) {
      auto col = block.col(filled);
      if (voxels_are_columns) {
        col = data.col(j);
      } else {
        col = data.row(j).transpose();
      }
      col.array() -= col.mean();
      const double ss = col.squaredNorm();
      if (!(ss > 0.0)) continue;
      col /= std::sqrt(ss / static_cast<double>(frames));
      ++filled;
    }
    if (filled == 0) continue;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(filled));
    used += filled;
  }
  if (used == 0) fail(ErrorCode::degenerate_input, "every voxel time course is constant");
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  auto sorted = sorted_symmetric_eigens(gram);
  return sorted.values / static_cast<double>(used);
}

Whitening whiten(const Eigen::MatrixXd& xdot, const DualEigens& eigens, Eigen::Index m) {
  if (m < 1) fail(ErrorCode::invalid_argument, "component count must be >= 1");
  if (m > eigens.rank())
    fail(ErrorCode::rank_deficient, "requested " + std::to_string(m) + " components but rank is " +
                                        std::to_string(eigens.rank()));
  if (m > eigens.lifted_vectors.cols())
    fail(ErrorCode::invalid_argument, "fewer eigenvectors available than requested components");

  Whitening out;
  out.basis.vectors = eigens.lifted_vectors.leftCols(m);
  out.basis.eigenvalues = eigens.eigenvalues.head(m);
  // (X E)^T is m x n; computed this way so X^T is never materialized.
  out.white.z.noalias() = (xdot * out.basis.vectors).transpose();
  for (Eigen::Index k = 0; k < m; ++k)
    out.white.z.row(k) /= std::sqrt(out.basis.eigenvalues(k));
  return out;
}

Whitening reduce_and_whiten(const Eigen::MatrixXd& xdot, Eigen::Index m) {
  return whiten(xdot, covariance_eigens(xdot, m), m);
}

}  // namespace tsica
