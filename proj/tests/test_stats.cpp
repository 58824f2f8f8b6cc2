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

#include <cmath>
#include <limits>
#include <stdexcept>

#include "corrfilt/rng.hpp"
#include "corrfilt/stats.hpp"
#include "doctest.h"
#include "support/stats_support.hpp"

using namespace corrfilt;
using namespace corrfilt::testsupport;

TEST_SUITE("stats") {

TEST_CASE("log_sum_exp matches direct evaluation and survives offsets") {
  Eigen::VectorXd v(3);
  v << 0.0, std::log(2.0), std::log(3.0);
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  // A large common offset must cancel instead of overflowing.
  const Eigen::VectorXd shifted = v.array() + 1000.0;
  CHECK(log_sum_exp(shifted) ==
        doctest::Approx(1000.0 + std::log(6.0)).epsilon(1e-14));
  const Eigen::VectorXd neg_inf =
      Eigen::VectorXd::Constant(2, -std::numeric_limits<double>::infinity());
  CHECK(log_sum_exp(neg_inf) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_sum_exp(Eigen::VectorXd()), std::invalid_argument);
}

TEST_CASE("mc_mean reproduces hand-computed mean and standard error") {
  Eigen::VectorXd v(4);
  v << 1.0, 2.0, 3.0, 6.0;
  const auto est = mc_mean(v);
  CHECK(est.value == doctest::Approx(3.0));
  // Sample variance (14/3) over 4 samples.
  CHECK(est.standard_error == doctest::Approx(std::sqrt(14.0 / 3.0 / 4.0)));
  CHECK_THROWS_AS(mc_mean(Eigen::VectorXd::Constant(1, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("weighted mean with equal weights reduces to the plain mean") {
  Eigen::VectorXd phi(4);
  phi << 1.0, 2.0, 3.0, 6.0;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.25);
  const auto est = sn_weighted_mean(w, phi);
  CHECK(est.value == doctest::Approx(3.0));
  // Delta-method SE with equal weights is the population sd over sqrt(M).
  const double pop_var = (phi.array() - 3.0).square().mean();
  CHECK(est.standard_error == doctest::Approx(std::sqrt(pop_var / 4.0)));
}

TEST_CASE("weighted mean and variance on a degenerate one-hot weight") {
  Eigen::VectorXd phi(3);
  phi << 5.0, -1.0, 2.0;
  Eigen::VectorXd w(3);
  w << 0.0, 1.0, 0.0;
  const auto mean = sn_weighted_mean(w, phi);
  CHECK(mean.value == -1.0);
  CHECK(mean.standard_error == 0.0);
  const auto var = sn_weighted_variance(w, phi);
  CHECK(var.value == 0.0);
  CHECK_THROWS_AS(sn_weighted_mean(w, Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("weighted variance with equal weights is the population variance") {
  Eigen::VectorXd phi(4);
  phi << 1.0, 2.0, 3.0, 6.0;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.25);
  const auto est = sn_weighted_variance(w, phi);
  CHECK(est.value == doctest::Approx((phi.array() - 3.0).square().mean()));
}

TEST_CASE("fast jackknife equals the naive O(M^2) recomputation") {
  NormalStream s({314ull, 0ull});
  Eigen::VectorXd logv(200);
  for (int i = 0; i < 200; ++i) logv(i) = 2.0 * s.next_normal() - 1.0;
  const auto fast = jackknife_log_mean_exp(logv);
  const auto slow = naive_jackknife_log_mean_exp(logv);
  CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
  CHECK(fast.standard_error ==
        doctest::Approx(slow.standard_error).epsilon(1e-10));
  CHECK_THROWS_AS(jackknife_log_mean_exp(Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
}

TEST_CASE("line fitting recovers exact affine data") {
  Eigen::VectorXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y = 2.5 * x.array() - 1.0;
  const auto fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_line(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("excess kurtosis hits its closed-form extremes") {
  // Symmetric two-point mass has excess kurtosis -2.
  Eigen::VectorXd two_point(4);
  two_point << 1.0, -1.0, 1.0, -1.0;
  CHECK(excess_kurtosis(two_point) == doctest::Approx(-2.0));
  CHECK(excess_kurtosis(Eigen::VectorXd::Constant(8, 3.0)) == 0.0);
  NormalStream s({315ull, 0ull});
  Eigen::VectorXd z(100000);
  for (int i = 0; i < z.size(); ++i) z(i) = s.next_normal();
  // Gaussian kurtosis SE is sqrt(24/M).
  CHECK(std::abs(excess_kurtosis(z)) <
        5.0 * std::sqrt(24.0 / static_cast<double>(z.size())));
}

TEST_CASE("the quadratic probe reconstructs a known quadratic exactly") {
  Eigen::MatrixXd Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd b(2);
  b << -1.0, 3.0;
  const double c = 0.75;
  const auto f = [&](const Eigen::VectorXd& v) {
    return 0.5 * v.dot(Q * v) + b.dot(v) + c;
  };
  const auto probed = probe_quadratic(2, f);
  CHECK((probed.Q - Q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((probed.b - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(probed.c == doctest::Approx(c));
  // E[f] under N(mu, S) has the closed form used by the energy tests.
  Eigen::VectorXd mu(2);
  mu << 1.0, -2.0;
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 0.3, 0.3, 2.0;
  const double direct = 0.5 * (Q * S).trace() + 0.5 * mu.dot(Q * mu) +
                        b.dot(mu) + c;
  CHECK(probed.expect_gaussian(mu, S) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("the two-sample KS statistic separates what it should") {
  NormalStream s({316ull, 0ull});
  Eigen::VectorXd a(4000), b(4000), shifted(4000);
  for (int i = 0; i < 4000; ++i) {
    a(i) = s.next_normal();
    b(i) = s.next_normal();
    shifted(i) = s.next_normal() + 2.0;
  }
  CHECK(ks_statistic(a, b) < 0.05);
  CHECK(ks_statistic(a, shifted) > 0.5);
  CHECK(ks_statistic(a, a) == 0.0);
}

}  // TEST_SUITE
