// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace tsica {

struct FrequencyPhase {
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad, in [0, pi)
  double magnitude = 0.0;
  Eigen::Index bin = 0;
};

/// Dominant non-DC DFT bin of the mean-removed series (bins 1..T/2, lowest
/// bin wins ties). Phase is reported modulo pi because ICA cannot fix the
/// sign of a component.
FrequencyPhase dominant_frequency_phase(const Eigen::VectorXd& samples, double sample_period = 1.0);

/// Signed distance between two phases taken modulo pi, in [-pi/2, pi/2).
double phase_difference_mod_pi(double a, double b);

/// Quantile by linear interpolation between order statistics at
/// h = (n - 1) q (the "type 7" convention).
double empirical_quantile(std::vector<double> values, double q);

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct AssignmentPair {
  Eigen::Index component = 0;
  Eigen::Index source = 0;
  double score = 0.0;  // signed correlation
};

struct Assignment {
  std::vector<AssignmentPair> pairs;
  std::vector<Eigen::Index> unassigned;

  const AssignmentPair* for_component(Eigen::Index component) const;
  std::vector<Eigen::Index> components_for(Eigen::Index source) const;
};

/// Each column of `components` goes to the reference column with the
/// largest |Pearson correlation|. Several components may share a source.
Assignment pearson_assign(const Eigen::MatrixXd& components, const Eigen::MatrixXd& references);

struct ThresholdSpec {
  enum class Kind { two_sided, abs_quantile };
  Kind kind = Kind::two_sided;
  double q_high = 0.9;
  double q_low = 0.1;
  int sign = +1;      // two_sided: +1 keeps the upper tail, -1 the lower
  double q = 0.95;    // abs_quantile

  static ThresholdSpec two_sided(int sign, double q_high = 0.9, double q_low = 0.1) {
    return {Kind::two_sided, q_high, q_low, sign, 0.95};
  }
  static ThresholdSpec abs_quantile(double q) { return {Kind::abs_quantile, 0.9, 0.1, +1, q}; }
};

/// Strict inequalities against the empirical quantile, so a constant map
/// keeps nothing.
std::vector<std::uint8_t> threshold_map(const Eigen::VectorXd& values, const ThresholdSpec& spec);

struct SignedPart {
  Eigen::VectorXd values;  // opposite-sign samples zeroed
  int polarity = +1;
};

/// Keeps the part carrying the highest |peak|; a tie keeps the positive part.
SignedPart select_signed_part(const Eigen::VectorXd& samples);

using BinarySequence = std::vector<std::int8_t>;

/// sign(value) where |value| exceeds the q-quantile of |values|, else 0.
BinarySequence binarize_timecourse(const Eigen::VectorXd& part, double q);

/// {0, 1} or {-1, 0, 1} valued reference to a BinarySequence via sign().
BinarySequence to_binary(const Eigen::VectorXd& values);

double binary_correlation(const BinarySequence& u, const BinarySequence& v);

struct EnergyIndex {
  double e1 = 0.0;
  double e2 = 0.0;
  double threshold = 0.0;
  int winner = 0;  // 0 for the first input, 1 for the second
};

EnergyIndex energy_index(const Eigen::VectorXd& part1, const Eigen::VectorXd& part2, double q_src);

struct ConflictResolution {
  Eigen::Index source = 0;
  std::vector<Eigen::Index> candidates;
  Eigen::Index winner = 0;
  std::vector<EnergyIndex> rounds;
};

struct ResolvedAssignment {
  Assignment assignment;  // at most one component per source
  std::vector<ConflictResolution> conflicts;
};

/// Settles sources claimed by several components with energy_index: the
/// first candidate is champion and meets each later candidate in turn.
/// `parts` holds the signed part of every component, `q_src` the event
/// quantile of every source.
ResolvedAssignment resolve_conflicts(const Assignment& assignment, const std::vector<SignedPart>& parts,
                                     const std::vector<double>& q_src);

/// Assignment by binary correlation: each component's signed part is
/// binarized with every source's quantile and compared to the source's
/// event sequence.
Assignment binary_assign(const Eigen::MatrixXd& components, const Eigen::MatrixXd& references,
                         const std::vector<double>& q_src);

struct SinusoidMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double mean_xy = 0.0;
  double covariance = 0.0;
};

/// Moments of X = sin(phi1 + 2 pi f U), Y = sin(phi2 + 2 pi f U) for U
/// uniform on the integers a..b, in closed form.
SinusoidMoments sinusoid_moments(double f, double phi1, double phi2, long a, long b);

struct PhaseFit {
  double phase = 0.0;  // in [0, pi)
  Eigen::VectorXd coefficients;
  double residual = 0.0;  // sum of squared errors at the optimum
};

/// Minimizes sum_t (sin(2 pi f U_t + phi) - sum_j a_j X_j(t))^2 over a and
/// phi: normal equations for a, grid search plus golden-section refinement
/// for phi on [0, pi).
PhaseFit fit_phase_constrained(const Eigen::MatrixXd& observed, double f, const Eigen::VectorXd& times,
                               int grid = 1024);

/// One fit per source, each against that source's own observed signals.
std::vector<PhaseFit> phase_constrained_lsq(const std::vector<Eigen::MatrixXd>& observed, double f,
                                            const Eigen::VectorXd& times, int grid = 1024);

}  // namespace tsica
