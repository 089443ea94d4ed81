// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "tsica/component_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "tsica/error.hpp"

namespace tsica {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double wrap_pi(double phase) {
  double r = std::fmod(phase, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

// Sum over k = 0..n-1 of exp(i (alpha + k step)), in closed form unless the
// step is close to a multiple of 2 pi.
std::complex<double> geometric_sum(double alpha, double step, long n) {
  const double half = std::sin(step / 2.0);
  if (std::abs(half) < 1e-6) {
    std::complex<double> sum = 0.0;
    for (long k = 0; k < n; ++k) sum += std::polar(1.0, alpha + static_cast<double>(k) * step);
    return sum;
  }
  const double ratio = std::sin(static_cast<double>(n) * step / 2.0) / half;
  return std::polar(ratio, alpha + static_cast<double>(n - 1) * step / 2.0);
}

struct NormalSolution {
  Eigen::VectorXd coefficients;
  double residual = 0.0;
};

class PhaseObjective {
public:
  PhaseObjective(const Eigen::MatrixXd& x, double f, const Eigen::VectorXd& times) : x_(x) {
    const Eigen::MatrixXd gram = x.transpose() * x;
    ldlt_.compute(gram);
    const auto d = ldlt_.vectorD().cwiseAbs();
    if (ldlt_.info() != Eigen::Success || d.size() == 0 || !(d.minCoeff() > 1e-12 * d.maxCoeff()))
      fail(ErrorCode::singular_normal_equations, "observed signals are linearly dependent");
    const double omega = 2.0 * kPi * f;
    sin_part_ = (omega * times).array().sin();
    cos_part_ = (omega * times).array().cos();
  }

  NormalSolution solve(double phase) const {
    const Eigen::VectorXd target = std::cos(phase) * sin_part_ + std::sin(phase) * cos_part_;
    NormalSolution out;
    out.coefficients = ldlt_.solve(x_.transpose() * target);
    out.residual = (target - x_ * out.coefficients).squaredNorm();
    return out;
  }

  double operator()(double phase) const { return solve(phase).residual; }

private:
  const Eigen::MatrixXd& x_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd sin_part_;
  Eigen::VectorXd cos_part_;
};

}  // namespace

FrequencyPhase dominant_frequency_phase(const Eigen::VectorXd& samples, double sample_period) {
  const Eigen::Index n = samples.size();
  if (n < 4) fail(ErrorCode::invalid_argument, "need at least 4 samples");
  if (!(sample_period > 0.0)) fail(ErrorCode::invalid_argument, "sample period must be > 0");
  const Eigen::VectorXd centered = samples.array() - samples.mean();

  FrequencyPhase best;
  std::complex<double> best_value = 0.0;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    std::complex<double> sum = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      // Reduce k t modulo n first so the angle stays exact for long series.
      const double angle = -2.0 * kPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      sum += centered(t) * std::polar(1.0, angle);
    }
    const double magnitude = std::abs(sum);
    if (magnitude > best.magnitude) {
      best.magnitude = magnitude;
      best.bin = k;
      best_value = sum;
    }
  }
  if (best.bin == 0 || !(best.magnitude > 1e-12 * static_cast<double>(n)))
    fail(ErrorCode::no_dominant_bin, "no non-DC frequency carries energy");
  best.frequency = static_cast<double>(best.bin) / (static_cast<double>(n) * sample_period);
  best.phase = wrap_pi(std::arg(best_value));
  return best;
}

double phase_difference_mod_pi(double a, double b) {
  return wrap_pi(a - b + kPi / 2.0) - kPi / 2.0;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::invalid_argument, "quantile order outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) fail(ErrorCode::shape_mismatch, "series lengths differ");
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  const double na = ca.norm();
  const double nb = cb.norm();
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorCode::zero_variance, "series with zero variance");
  return ca.dot(cb) / (na * nb);
}

const AssignmentPair* Assignment::for_component(Eigen::Index component) const {
  for (const auto& p : pairs)
    if (p.component == component) return &p;
  return nullptr;
}

std::vector<Eigen::Index> Assignment::components_for(Eigen::Index source) const {
  std::vector<Eigen::Index> out;
  for (const auto& p : pairs)
    if (p.source == source) out.push_back(p.component);
  return out;
}

Assignment pearson_assign(const Eigen::MatrixXd& components, const Eigen::MatrixXd& references) {
  if (references.cols() < 1) fail(ErrorCode::invalid_argument, "no reference signal");
  if (components.rows() != references.rows()) fail(ErrorCode::shape_mismatch, "series lengths differ");
  Assignment out;
  for (Eigen::Index k = 0; k < components.cols(); ++k) {
    AssignmentPair best{k, 0, 0.0};
    for (Eigen::Index j = 0; j < references.cols(); ++j) {
      const double r = pearson_correlation(components.col(k), references.col(j));
      if (std::abs(r) > std::abs(best.score)) best = {k, j, r};
    }
    out.pairs.push_back(best);
  }
  return out;
}

std::vector<std::uint8_t> threshold_map(const Eigen::VectorXd& values, const ThresholdSpec& spec) {
  if (values.size() == 0) fail(ErrorCode::invalid_argument, "empty map");
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(values.size()), 0);
  if (spec.kind == ThresholdSpec::Kind::abs_quantile) {
    const Eigen::VectorXd mags = values.cwiseAbs();
    const double cut = empirical_quantile({mags.data(), mags.data() + mags.size()}, spec.q);
    for (Eigen::Index i = 0; i < values.size(); ++i) keep[static_cast<std::size_t>(i)] = mags(i) > cut;
    return keep;
  }
  const std::vector<double> all(values.data(), values.data() + values.size());
  if (spec.sign >= 0) {
    const double cut = empirical_quantile(all, spec.q_high);
    for (Eigen::Index i = 0; i < values.size(); ++i) keep[static_cast<std::size_t>(i)] = values(i) > cut;
  } else {
    const double cut = empirical_quantile(all, spec.q_low);
    for (Eigen::Index i = 0; i < values.size(); ++i) keep[static_cast<std::size_t>(i)] = values(i) < cut;
  }
  return keep;
}

SignedPart select_signed_part(const Eigen::VectorXd& samples) {
  if (samples.size() == 0 || (samples.array() == 0.0).all())
    fail(ErrorCode::all_zero, "signal is identically zero");
  const double hi = samples.maxCoeff();
  const double lo = samples.minCoeff();
  SignedPart out;
  out.polarity = hi >= -lo ? +1 : -1;
  if (out.polarity > 0) {
    out.values = samples.cwiseMax(0.0);
  } else {
    out.values = samples.cwiseMin(0.0);
  }
  return out;
}

BinarySequence binarize_timecourse(const Eigen::VectorXd& part, double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid_argument, "binarization quantile outside (0, 1)");
  const Eigen::VectorXd mags = part.cwiseAbs();
  const double cut = empirical_quantile({mags.data(), mags.data() + mags.size()}, q);
  BinarySequence out(static_cast<std::size_t>(part.size()), 0);
  for (Eigen::Index i = 0; i < part.size(); ++i)
    if (mags(i) > cut) out[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sign_of(part(i)));
  return out;
}

BinarySequence to_binary(const Eigen::VectorXd& values) {
  BinarySequence out(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    out[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sign_of(values(i)));
  return out;
}

double binary_correlation(const BinarySequence& u, const BinarySequence& v) {
  if (u.size() != v.size()) fail(ErrorCode::shape_mismatch, "sequence lengths differ");
  long numerator = 0;
  long denominator = 0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    const int a = sign_of(u[t]);
    const int b = sign_of(v[t]);
    numerator += a * b;
    denominator += std::abs(a) + std::abs(b) - std::abs(a * b);
  }
  if (denominator == 0) fail(ErrorCode::both_all_zero, "both sequences are all zero");
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

EnergyIndex energy_index(const Eigen::VectorXd& part1, const Eigen::VectorXd& part2, double q_src) {
  if (part1.size() != part2.size()) fail(ErrorCode::shape_mismatch, "series lengths differ");
  const double max1 = part1.cwiseAbs().maxCoeff();
  const double max2 = part2.cwiseAbs().maxCoeff();
  if (!(max1 > 0.0) || !(max2 > 0.0)) fail(ErrorCode::all_zero, "energy index needs nonzero parts");
  const Eigen::VectorXd n1 = part1.cwiseAbs() / max1;
  const Eigen::VectorXd n2 = part2.cwiseAbs() / max2;
  const Eigen::VectorXd both = n1 + n2;

  EnergyIndex out;
  out.threshold = 0.5 * empirical_quantile({both.data(), both.data() + both.size()}, q_src);
  if (!(out.threshold > 0.0)) fail(ErrorCode::degenerate_threshold, "energy threshold is zero");
  for (Eigen::Index t = 0; t < n1.size(); ++t) {
    if (n1(t) > out.threshold) out.e1 += n1(t);
    if (n2(t) > out.threshold) out.e2 += n2(t);
  }
  out.winner = out.e2 > out.e1 ? 1 : 0;
  return out;
}

ResolvedAssignment resolve_conflicts(const Assignment& assignment, const std::vector<SignedPart>& parts,
                                     const std::vector<double>& q_src) {
  ResolvedAssignment out;
  out.assignment.unassigned = assignment.unassigned;
  std::vector<Eigen::Index> sources;
  for (const auto& p : assignment.pairs)
    if (std::find(sources.begin(), sources.end(), p.source) == sources.end()) sources.push_back(p.source);
  std::sort(sources.begin(), sources.end());

  for (const Eigen::Index source : sources) {
    const auto candidates = assignment.components_for(source);
    Eigen::Index champion = candidates.front();
    if (candidates.size() > 1) {
      if (static_cast<std::size_t>(source) >= q_src.size())
        fail(ErrorCode::invalid_argument, "no event quantile for source " + std::to_string(source));
      ConflictResolution conflict;
      conflict.source = source;
      conflict.candidates = candidates;
      for (std::size_t i = 1; i < candidates.size(); ++i) {
        const Eigen::Index challenger = candidates[i];
        for (const Eigen::Index c : {champion, challenger})
          if (static_cast<std::size_t>(c) >= parts.size())
            fail(ErrorCode::invalid_argument, "no signed part for component " + std::to_string(c));
        const EnergyIndex round = energy_index(parts[static_cast<std::size_t>(champion)].values,
                                               parts[static_cast<std::size_t>(challenger)].values,
                                               q_src[static_cast<std::size_t>(source)]);
        conflict.rounds.push_back(round);
        if (round.winner == 1) champion = challenger;
      }
      conflict.winner = champion;
      out.conflicts.push_back(std::move(conflict));
    }
    for (const Eigen::Index c : candidates) {
      if (c == champion) {
        out.assignment.pairs.push_back(*assignment.for_component(c));
      } else {
        out.assignment.unassigned.push_back(c);
      }
    }
  }
  std::sort(out.assignment.pairs.begin(), out.assignment.pairs.end(),
            [](const AssignmentPair& a, const AssignmentPair& b) { return a.component < b.component; });
  std::sort(out.assignment.unassigned.begin(), out.assignment.unassigned.end());
  return out;
}

Assignment binary_assign(const Eigen::MatrixXd& components, const Eigen::MatrixXd& references,
                         const std::vector<double>& q_src) {
  if (references.cols() < 1) fail(ErrorCode::invalid_argument, "no reference signal");
  if (components.rows() != references.rows()) fail(ErrorCode::shape_mismatch, "series lengths differ");
  if (q_src.size() != static_cast<std::size_t>(references.cols()))
    fail(ErrorCode::shape_mismatch, "one event quantile per reference required");
  std::vector<BinarySequence> refs;
  for (Eigen::Index j = 0; j < references.cols(); ++j) refs.push_back(to_binary(references.col(j)));

  Assignment out;
  for (Eigen::Index k = 0; k < components.cols(); ++k) {
    const SignedPart part = select_signed_part(components.col(k));
    AssignmentPair best{k, 0, 0.0};
    bool any = false;
    for (Eigen::Index j = 0; j < references.cols(); ++j) {
      const BinarySequence b = binarize_timecourse(part.values, q_src[static_cast<std::size_t>(j)]);
      double score = 0.0;
      try {
        score = binary_correlation(b, refs[static_cast<std::size_t>(j)]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::both_all_zero) throw;
        continue;
      }
      if (!any || std::abs(score) > std::abs(best.score)) best = {k, j, score};
      any = true;
    }
    if (any) {
      out.pairs.push_back(best);
    } else {
      out.unassigned.push_back(k);
    }
  }
  return out;
}

SinusoidMoments sinusoid_moments(double f, double phi1, double phi2, long a, long b) {
  if (b < a) fail(ErrorCode::invalid_argument, "support bounds need b >= a");
  const long n = b - a + 1;
  const double omega = 2.0 * kPi * f;
  const double start = omega * static_cast<double>(a);
  const double inv_n = 1.0 / static_cast<double>(n);

  SinusoidMoments out;
  out.mean_x = geometric_sum(phi1 + start, omega, n).imag() * inv_n;
  out.mean_y = geometric_sum(phi2 + start, omega, n).imag() * inv_n;
  const double cross = geometric_sum(phi1 + phi2 + 2.0 * start, 2.0 * omega, n).real() * inv_n;
  out.mean_xy = 0.5 * (std::cos(phi1 - phi2) - cross);
  out.covariance = out.mean_xy - out.mean_x * out.mean_y;
  return out;
}

PhaseFit fit_phase_constrained(const Eigen::MatrixXd& observed, double f, const Eigen::VectorXd& times,
                               int grid) {
  if (observed.rows() != times.size()) fail(ErrorCode::shape_mismatch, "one time stamp per row required");
  if (observed.cols() < 1) fail(ErrorCode::invalid_argument, "no observed signal");
  if (observed.rows() < 2 * observed.cols())
    fail(ErrorCode::invalid_argument, "need at least two samples per observed signal");
  if (grid < 3) fail(ErrorCode::invalid_argument, "phase grid needs at least 3 points");

  const PhaseObjective objective(observed, f, times);
  const double step = kPi / grid;
  int best = 0;
  double best_value = objective(0.0);
  for (int i = 1; i < grid; ++i) {
    const double value = objective(step * i);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }

  // Golden-section search on the bracket around the best grid point. The
  // objective has period pi, so the bracket may cross 0.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = step * (best - 1);
  double hi = step * (best + 1);
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double phase = 0.5 * (lo + hi);
  NormalSolution solution = objective.solve(phase);
  if (solution.residual > best_value) {
    phase = step * best;
    solution = objective.solve(phase);
  }

  PhaseFit fit;
  fit.phase = wrap_pi(phase);
  if (fit.phase != phase) solution = objective.solve(fit.phase);
  fit.coefficients = std::move(solution.coefficients);
  fit.residual = solution.residual;
  return fit;
}

std::vector<PhaseFit> phase_constrained_lsq(const std::vector<Eigen::MatrixXd>& observed, double f,
                                            const Eigen::VectorXd& times, int grid) {
  std::vector<PhaseFit> fits;
  fits.reserve(observed.size());
  for (const auto& x : observed) fits.push_back(fit_phase_constrained(x, f, times, grid));
  return fits;
}

}  // namespace tsica
