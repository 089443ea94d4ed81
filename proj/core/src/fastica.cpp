// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/fastica.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsica/error.hpp"
#include "tsica/random.hpp"

namespace tsica {

namespace {

constexpr double kWhitenessTolerance = 1e-4;

void check_whitened(const Eigen::MatrixXd& z) {
  const double n = static_cast<double>(z.cols());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(z.rows(), z.rows());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / n);
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  const double deviation = (cov - Eigen::MatrixXd::Identity(z.rows(), z.rows())).cwiseAbs().maxCoeff();
  if (!(deviation <= kWhitenessTolerance))
    fail(ErrorCode::not_whitened, "Z Z^T / n deviates from identity by " + std::to_string(deviation));
}

// (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_orthogonalize(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w * w.transpose());
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numerical_failure, "symmetric orthogonalization failed");
  const Eigen::VectorXd inv_sqrt = solver.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose() * w;
}

// E[z (w^T z)^3] - 3w
Eigen::VectorXd kurtosis_update(const Eigen::MatrixXd& z, const Eigen::VectorXd& w) {
  Eigen::VectorXd y = z.transpose() * w;
  y = y.array().cube();
  Eigen::VectorXd next = z * y;
  next /= static_cast<double>(z.cols());
  next -= 3.0 * w;
  return next;
}

Eigen::MatrixXd random_start(Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd w(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = rng.normal();
  return w;
}

void deflate(Eigen::VectorXd& w, const Eigen::MatrixXd& found, Eigen::Index count) {
  for (Eigen::Index r = 0; r < count; ++r) w -= found.row(r).dot(w) * found.row(r).transpose();
}

UnmixingMatrix run_deflation(const Eigen::MatrixXd& z, const FastIcaOptions& options) {
  const Eigen::Index m = z.rows();
  UnmixingMatrix out;
  out.w = Eigen::MatrixXd::Zero(m, m);
  out.convergence.resize(static_cast<std::size_t>(m));
  const Eigen::MatrixXd start = random_start(m, options.seed);

  for (Eigen::Index p = 0; p < m; ++p) {
    Eigen::VectorXd w = start.row(p).transpose();
    deflate(w, out.w, p);
    w.normalize();
    auto& conv = out.convergence[static_cast<std::size_t>(p)];
    for (int it = 1; it <= options.max_iterations; ++it) {
      Eigen::VectorXd next = kurtosis_update(z, w);
      deflate(next, out.w, p);
      const double norm = next.norm();
      if (!(norm > 0.0)) {
        // Degenerate step; restart from the orthogonal complement direction.
        next = start.row(p).transpose();
        deflate(next, out.w, p);
      }
      next.normalize();
      const double delta = 1.0 - std::abs(next.dot(w));
      w = next;
      conv.iterations = it;
      conv.final_delta = delta;
      if (delta <= options.tolerance) {
        conv.converged = true;
        break;
      }
    }
    out.w.row(p) = w.transpose();
  }
  return out;
}

UnmixingMatrix run_symmetric(const Eigen::MatrixXd& z, const FastIcaOptions& options) {
  const Eigen::Index m = z.rows();
  UnmixingMatrix out;
  out.convergence.resize(static_cast<std::size_t>(m));
  Eigen::MatrixXd w = symmetric_orthogonalize(random_start(m, options.seed));
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd next(m, m);
    for (Eigen::Index p = 0; p < m; ++p) next.row(p) = kurtosis_update(z, w.row(p).transpose()).transpose();
    next = symmetric_orthogonalize(next);
    bool all = true;
    for (Eigen::Index p = 0; p < m; ++p) {
      auto& conv = out.convergence[static_cast<std::size_t>(p)];
      if (conv.converged) continue;
      conv.iterations = it;
      conv.final_delta = 1.0 - std::abs(next.row(p).dot(w.row(p)));
      all = all && conv.final_delta <= options.tolerance;
    }
    w = next;
    if (all) {
      for (auto& conv : out.convergence) conv.converged = true;
      break;
    }
  }
  out.w = w;
  return out;
}

}  // namespace

bool UnmixingMatrix::all_converged() const {
  return std::all_of(convergence.begin(), convergence.end(),
                     [](const ComponentConvergence& c) { return c.converged; });
}

double excess_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const double n = static_cast<double>(values.size());
  const double m2 = values.squaredNorm() / n;
  if (!(m2 > 0.0)) return 0.0;
  const double m4 = values.array().square().square().sum() / n;
  return m4 / (m2 * m2) - 3.0;
}

UnmixingMatrix fastica_kurtosis(const WhitenedData& white, const FastIcaOptions& options) {
  const Eigen::MatrixXd& z = white.z;
  if (z.rows() < 1 || z.cols() < 2) fail(ErrorCode::invalid_argument, "whitened data is empty");
  if (options.max_iterations < 1) fail(ErrorCode::invalid_argument, "max_iterations must be >= 1");
  if (!(options.tolerance > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be > 0");
  check_whitened(z);

  UnmixingMatrix raw = options.scheme == FastIcaScheme::deflation ? run_deflation(z, options)
                                                                  : run_symmetric(z, options);
  raw.seed = options.seed;

  const Eigen::Index m = z.rows();
  std::vector<double> kurt(static_cast<std::size_t>(m));
  for (Eigen::Index p = 0; p < m; ++p) {
    const Eigen::VectorXd y = z.transpose() * raw.w.row(p).transpose();
    kurt[static_cast<std::size_t>(p)] = std::abs(excess_kurtosis(y));
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return kurt[a] > kurt[b]; });

  UnmixingMatrix out;
  out.seed = raw.seed;
  out.w.resize(m, m);
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.w.row(static_cast<Eigen::Index>(i)) = raw.w.row(static_cast<Eigen::Index>(order[i]));
    out.convergence.push_back(raw.convergence[order[i]]);
  }
  return out;
}

ExtractedSources extract_sources(const WhitenedData& white, const Eigen::MatrixXd& w) {
  if (w.cols() != white.z.rows())
    fail(ErrorCode::shape_mismatch, "unmixing matrix does not act on the whitened dimension");
  ExtractedSources out;
  out.s.noalias() = (w * white.z).transpose();
  const double n = static_cast<double>(out.s.rows());
  Eigen::VectorXd sd(out.s.cols());
  for (Eigen::Index j = 0; j < out.s.cols(); ++j) {
    auto col = out.s.col(j);
    col.array() -= col.mean();
    sd(j) = std::sqrt(col.squaredNorm() / n);
    if (sd(j) > 0.0) col /= sd(j);
  }
  out.a = w.transpose() * sd.asDiagonal();
  return out;
}

Eigen::MatrixXd mixing_in_data_space(const ReducedBasis& basis, const Eigen::MatrixXd& a) {
  if (basis.vectors.cols() != a.rows())
    fail(ErrorCode::shape_mismatch, "basis and mixing matrix disagree on m");
  return basis.vectors * basis.eigenvalues.cwiseSqrt().asDiagonal() * a;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& mixing, const Eigen::MatrixXd& sources) {
  if (mixing.cols() != sources.cols())
    fail(ErrorCode::shape_mismatch, "mixing and sources disagree on m");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mixing.rows(), sources.rows());
  for (Eigen::Index j = 0; j < mixing.cols(); ++j)
    out.noalias() += mixing.col(j) * sources.col(j).transpose();
  return out;
}

}  // namespace tsica
