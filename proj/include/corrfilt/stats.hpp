// Copyright 2026 the corrfilt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRFILT_STATS_HPP
#define CORRFILT_STATS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

/**
 * \file
 * \brief Small statistical helpers shared by the Monte Carlo modules:
 *        stable log-sum-exp, self-normalized importance-sampling standard
 *        errors, jackknife for log-normalizers, and least-squares line fits
 *        for rate studies.
 */

namespace corrfilt {

/// An estimate together with its standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// log(sum_i exp(v_i)), stabilized by the maximum entry.
inline double log_sum_exp(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw std::invalid_argument("log_sum_exp of empty vector");
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a non-finite entry
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
  return m + std::log(s);
}

/// Plain Monte Carlo mean with standard error sd/sqrt(M).
inline Estimate mc_mean(const Eigen::VectorXd& samples) {
  const auto m = static_cast<double>(samples.size());
  if (m < 2) throw std::invalid_argument("mc_mean needs at least 2 samples");
  const double mean = samples.mean();
  const double var = (samples.array() - mean).square().sum() / (m - 1.0);
  return {mean, std::sqrt(var / m)};
}

/// Self-normalized importance-sampling mean of phi with delta-method SE:
/// value = sum w_i phi_i, SE = sqrt(sum w_i^2 (phi_i - value)^2).
/// Weights must be normalized to sum 1.
inline Estimate sn_weighted_mean(const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& phi) {
  if (weights.size() != phi.size())
    throw std::invalid_argument("weights/values size mismatch");
  const double value = weights.dot(phi);
  const double se2 =
      (weights.array().square() * (phi.array() - value).square()).sum();
  return {value, std::sqrt(se2)};
}

/// Self-normalized weighted variance of phi with delta-method SE. The
/// influence of sample i on the variance estimate is
/// w_i ((phi_i - mean)^2 - variance), which folds in the noise of the
/// estimated mean.
inline Estimate sn_weighted_variance(const Eigen::VectorXd& weights,
                                     const Eigen::VectorXd& phi) {
  if (weights.size() != phi.size())
    throw std::invalid_argument("weights/values size mismatch");
  const double mean = weights.dot(phi);
  const Eigen::ArrayXd dev2 = (phi.array() - mean).square();
  const double variance = (weights.array() * dev2).sum();
  const double se2 = (weights.array().square() * (dev2 - variance).square()).sum();
  return {variance, std::sqrt(se2)};
}

/// log of the sample mean of exp(log_values), with a leave-one-out
/// jackknife standard error. O(M); each leave-one-out value reuses the
/// shared stabilized sum.
inline Estimate jackknife_log_mean_exp(const Eigen::VectorXd& log_values) {
  const Eigen::Index m = log_values.size();
  if (m < 2)
    throw std::invalid_argument("jackknife needs at least 2 samples");
  const double mx = log_values.maxCoeff();
  if (!std::isfinite(mx))
    throw std::invalid_argument("jackknife_log_mean_exp: non-finite inputs");
  Eigen::ArrayXd scaled = (log_values.array() - mx).exp();
  const double total = scaled.sum();
  const double log_mean = mx + std::log(total) - std::log(static_cast<double>(m));
  Eigen::ArrayXd loo(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    // Guard against catastrophic cancellation when one weight carries the
    // whole sum; the clamped value keeps the jackknife finite.
    const double rest = std::max(total - scaled(j),
                                 std::numeric_limits<double>::min());
    loo(j) = mx + std::log(rest) - std::log(static_cast<double>(m - 1));
  }
  const double loo_mean = loo.mean();
  const double ss = (loo - loo_mean).square().sum();
  const double se = std::sqrt(ss * (static_cast<double>(m - 1) /
                                    static_cast<double>(m)));
  return {log_mean, se};
}

/// Least-squares line fit y ~ intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

inline LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs >= 2 paired points");
  const double xm = x.mean(), ym = y.mean();
  const Eigen::ArrayXd dx = x.array() - xm;
  const Eigen::ArrayXd dy = y.array() - ym;
  const double sxx = dx.square().sum();
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x values");
  LinearFit fit;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = ym - fit.slope * xm;
  const double ss_tot = dy.square().sum();
  const double ss_res =
      (dy - fit.slope * dx).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

/// Excess kurtosis m4/m2^2 - 3 of a sample (0 for a Gaussian).
inline double excess_kurtosis(const Eigen::VectorXd& samples) {
  if (samples.size() < 4)
    throw std::invalid_argument("kurtosis needs >= 4 samples");
  const double mean = samples.mean();
  const Eigen::ArrayXd dev = samples.array() - mean;
  const double m2 = dev.square().mean();
  if (m2 == 0.0) return 0.0;
  const double m4 = dev.square().square().mean();
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace corrfilt

#endif  // CORRFILT_STATS_HPP
