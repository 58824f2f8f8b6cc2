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

#ifndef CORRFILT_TESTS_SUPPORT_STATS_SUPPORT_HPP
#define CORRFILT_TESTS_SUPPORT_STATS_SUPPORT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

/**
 * \file
 * \brief Independent statistical oracles: a two-sample KS statistic, a
 *        naive O(M^2) jackknife, and an exact quadratic-function probe.
 *
 * Everything here is written in the most obvious possible way so that it
 * can serve as ground truth for the optimized library versions.
 */

namespace corrfilt::testsupport {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F1(x) - F2(x)|.
inline double ks_statistic(Eigen::VectorXd a, Eigen::VectorXd b) {
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  Eigen::Index i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // Advance both samples past the smallest remaining value so that ties
    // never register a spurious gap (KS of a sample against itself is 0).
    const double x = std::min(a(i), b(j));
    while (i < a.size() && a(i) == x) ++i;
    while (j < b.size() && b(j) == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

/// Leave-one-out jackknife of log(mean(exp(v))), recomputed from scratch
/// for every left-out index. Quadratic cost; reference only.
struct NaiveJackknife {
  double value = 0.0;
  double standard_error = 0.0;
};

inline NaiveJackknife naive_jackknife_log_mean_exp(
    const Eigen::VectorXd& log_values) {
  const Eigen::Index m = log_values.size();
  const auto log_mean_of = [](const std::vector<double>& vals) {
    const double mx = *std::max_element(vals.begin(), vals.end());
    double s = 0.0;
    for (double v : vals) s += std::exp(v - mx);
    return mx + std::log(s) - std::log(static_cast<double>(vals.size()));
  };
  std::vector<double> all(log_values.data(), log_values.data() + m);
  NaiveJackknife out;
  out.value = log_mean_of(all);
  std::vector<double> loo;
  loo.reserve(static_cast<std::size_t>(m));
  std::vector<double> rest(static_cast<std::size_t>(m) - 1);
  for (Eigen::Index drop = 0; drop < m; ++drop) {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (i != drop) rest[k++] = log_values(i);
    loo.push_back(log_mean_of(rest));
  }
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.standard_error =
      std::sqrt(ss * (static_cast<double>(m - 1) / static_cast<double>(m)));
  return out;
}

/// Exact quadratic representation f(v) = 1/2 v^T Q v + b^T v + c of a
/// function that is known to be a quadratic polynomial, recovered from
/// function evaluations at 0, e_i, and e_i + e_j. Lets a closed-form
/// Gaussian expectation E[f] = 1/2 tr(Q S) + 1/2 mu^T Q mu + b^T mu + c
/// be computed for any function the test knows to be quadratic.
struct QuadraticForm {
  Eigen::MatrixXd Q;
  Eigen::VectorXd b;
  double c = 0.0;

  double expect_gaussian(const Eigen::VectorXd& mu,
                         const Eigen::MatrixXd& cov) const {
    return 0.5 * (Q * cov).trace() + 0.5 * mu.dot(Q * mu) + b.dot(mu) + c;
  }
};

inline QuadraticForm probe_quadratic(
    Eigen::Index dim, const std::function<double(const Eigen::VectorXd&)>& f) {
  QuadraticForm q;
  q.Q.resize(dim, dim);
  q.b.resize(dim);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  q.c = f(zero);
  Eigen::VectorXd unit(dim);
  std::vector<double> at_unit(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    unit = zero;
    unit(i) = 1.0;
    at_unit[static_cast<std::size_t>(i)] = f(unit);
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      unit = zero;
      unit(i) += 1.0;
      unit(j) += 1.0;
      const double fij = f(unit);
      if (i == j) {
        // f(2 e_i) = 2 Q_ii + 2 b_i + c and f(e_i) = Q_ii / 2 + b_i + c.
        q.Q(i, i) = fij - 2.0 * at_unit[static_cast<std::size_t>(i)] + q.c;
      } else {
        q.Q(i, j) = q.Q(j, i) = fij - at_unit[static_cast<std::size_t>(i)] -
                                at_unit[static_cast<std::size_t>(j)] + q.c;
      }
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i)
    q.b(i) = at_unit[static_cast<std::size_t>(i)] - q.c - 0.5 * q.Q(i, i);
  return q;
}

}  // namespace corrfilt::testsupport

#endif  // CORRFILT_TESTS_SUPPORT_STATS_SUPPORT_HPP
