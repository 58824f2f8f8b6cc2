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
#include <stdexcept>
#include <vector>

#include "corrfilt/csv.hpp"
#include "corrfilt/free_energy.hpp"
#include "corrfilt/gibbs.hpp"
#include "corrfilt/oracle.hpp"
#include "corrfilt/sampler.hpp"
#include "doctest.h"
#include "support/quadrature.hpp"
#include "support/stats_support.hpp"
#include "support/test_models.hpp"

using namespace corrfilt;
using namespace corrfilt::testsupport;

namespace {

Path fixture_y() {
  return read_path_csv(std::string(CORRFILT_TEST_DATA_DIR) +
                       "/benchmark_y_level6.csv");
}

GaussianLaw tiny_law(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  GaussianLaw law;
  law.grid = make_dyadic_grid(0, 1.0);
  law.layout.signal_dim = mean.size();
  law.layout.obs_dim = 0;
  law.layout.steps = 1;
  law.mean = mean;
  law.cov = cov;
  return law;
}

}  // namespace

TEST_SUITE("free_energy") {

TEST_CASE("the explicit reference law matches its closed form") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(3, 1.0);
  const Path y = simulate_joint(model, grid, {201ull, 0ull}).y;
  const auto law = reference_law(model, grid, y);
  REQUIRE(law.mean.size() == 8);
  for (Eigen::Index i = 1; i <= 8; ++i) {
    CHECK(law.mean(i - 1) ==
          doctest::Approx(1.0 + 0.5 * y.values(i, 0)).epsilon(1e-14));
    for (Eigen::Index j = 1; j <= 8; ++j)
      CHECK(law.cov(i - 1, j - 1) ==
            doctest::Approx(0.125 * double(std::min(i, j))).epsilon(1e-13));
  }
  // Against y = 0 the mean collapses to the initial condition.
  const auto law0 = reference_law(model, grid, zero_path(grid, 1));
  CHECK((law0.mean.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_WITH_AS(
      reference_law(model, make_dyadic_grid(13, 1.0),
                    zero_path(make_dyadic_grid(13, 1.0), 1)),
      doctest::Contains("grid cap"), std::invalid_argument);
}

TEST_CASE("Gaussian KL matches hand formulas and quadrature") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.3, 0.3, 0.8;
  const auto p = tiny_law(Eigen::VectorXd::Zero(2), cov);
  CHECK(kl_gaussian(p, p) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::VectorXd shift(2);
  shift << 0.7, -0.4;
  const auto p_shift = tiny_law(shift, cov);
  const double expected_shift =
      0.5 * shift.dot(cov.llt().solve(shift));
  CHECK(kl_gaussian(p_shift, p) ==
        doctest::Approx(expected_shift).epsilon(1e-12));

  // 1-D variance mismatch: KL(N(0,v) || N(0,w)) = (v/w - 1 + ln(w/v)) / 2.
  const auto pv = tiny_law(Eigen::VectorXd::Zero(1),
                           Eigen::MatrixXd::Constant(1, 1, 0.5));
  const auto qw = tiny_law(Eigen::VectorXd::Zero(1),
                           Eigen::MatrixXd::Constant(1, 1, 2.0));
  CHECK(kl_gaussian(pv, qw) ==
        doctest::Approx(0.5 * (0.25 - 1.0 + std::log(4.0))).epsilon(1e-12));

  // Full 2-D case against Gauss-Hermite quadrature of the log ratio.
  Eigen::MatrixXd cov_q(2, 2);
  cov_q << 1.5, -0.2, -0.2, 0.9;
  Eigen::VectorXd mean_q(2);
  mean_q << -0.3, 0.6;
  const auto q = tiny_law(mean_q, cov_q);
  const double quad = gauss_hermite_expect(
      p_shift.mean, p_shift.cov, 8, [&](const Eigen::VectorXd& z) {
        return log_density(p_shift, z) - log_density(q, z);
      });
  CHECK(kl_gaussian(p_shift, q) == doctest::Approx(quad).epsilon(1e-10));

  CHECK(kl_gaussian(p, q) >= 0.0);
  // A point mass is singular against any full-rank Gaussian.
  const auto point = tiny_law(Eigen::VectorXd::Zero(2),
                              Eigen::MatrixXd::Zero(2, 2));
  CHECK(std::isinf(kl_gaussian(point, p)));
  CHECK_THROWS_WITH_AS(kl_gaussian(p, point),
                       doctest::Contains("q covariance singular"),
                       std::runtime_error);
}

TEST_CASE("expected energy is exactly zero for a driftless unobserved "
          "model") {
  const auto model = scalar_model(0.0, 0.0, 1.0, 0.5, 1.0, 1.0);
  const auto grid = make_dyadic_grid(4, 1.0);
  const Path y = zero_path(grid, 1);
  const auto cand = posterior_candidate(model, grid, y);
  const Estimate est = expected_energy(cand, model, y, 500, {202ull, 0ull});
  CHECK(est.value == 0.0);
  CHECK(est.standard_error == 0.0);
}

TEST_CASE("expected energy agrees with the closed-form Gaussian "
          "expectation of the probed quadratic") {
  // The energy is quadratic in the signal path, so probing H on basis
  // points recovers it exactly, and E_P[H] then has a closed form.
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(4, 1.0);
  const Path y = restrict_to_level(fixture_y(), 4);
  const auto cand = posterior_candidate(model, grid, y);
  const auto f = [&](const Eigen::VectorXd& v) {
    Path x;
    x.grid = grid;
    x.values.resize(17, 1);
    x.values(0, 0) = model.x0(0);
    for (int i = 1; i <= 16; ++i) x.values(i, 0) = v(i - 1);
    return energy(model, x, y).total();
  };
  const QuadraticForm q = probe_quadratic(16, f);
  const double closed = q.expect_gaussian(cand.law.mean, cand.law.cov);
  const Estimate est = expected_energy(cand, model, y, 20000, {41ull, 0ull});
  CHECK(est.standard_error > 0.0);
  CHECK(std::abs(est.value - closed) < 3.0 * est.standard_error);
}

TEST_CASE("a near-point-mass candidate prices the full quadratic cost "
          "of standing still") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(5, 1.0);
  const Path y = zero_path(grid, 1);
  CandidateMeasure point;
  point.label = "point";
  point.law.grid = grid;
  point.law.layout.signal_dim = 1;
  point.law.layout.obs_dim = 0;
  point.law.layout.steps = 32;
  point.law.mean = Eigen::VectorXd::Constant(32, model.x0(0));
  point.law.cov = 1e-6 * Eigen::MatrixXd::Identity(32, 32);
  const Estimate est = expected_energy(point, model, y, 4000, {61ull, 0ull});
  // At x == x0 and y == 0 only the quadratic terms survive:
  // H = beta(x0)^2 T / 2 + (C x0)^2 T / 2 = 1.125 + 0.5.
  CHECK(std::abs(est.value - 1.625) < 1e-3);
}

TEST_CASE("heavy-tail sentinel replaces the estimate instead of "
          "reporting a blind mean") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(4, 1.0);
  const Path y = zero_path(grid, 1);
  const auto cand = posterior_candidate(model, grid, y);
  // Sample excess kurtosis is always above -2, so a guard of -3 must trip.
  const Estimate est =
      expected_energy(cand, model, y, 200, {203ull, 0ull}, 1, -3.0);
  CHECK(std::isinf(est.value));
}

TEST_CASE("free-energy gaps match the closed-form divergence to the "
          "posterior across a candidate family") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(6, 1.0);
  const Path y = fixture_y();
  const auto post = posterior_candidate(model, grid, y);
  CandidateMeasure ref{reference_law(model, grid, y), "reference"};
  const Eigen::VectorXd dir = Eigen::VectorXd::Ones(64);
  const auto shifts =
      make_mean_shift_family(model, grid, y, dir, {-0.5, 0.25, 0.5});
  std::vector<CandidateMeasure> family{post, ref, shifts[0], shifts[1],
                                       shifts[2]};
  const FamilyMinimum result =
      minimize_over_family(model, grid, y, family, 2000, {51ull, 0ull});
  REQUIRE(result.reports.size() == 5);
  for (const auto& r : result.reports) {
    CHECK(r.total ==
          doctest::Approx(r.kl_to_reference + r.expected_energy)
              .epsilon(1e-10));
    CHECK(r.kl_to_reference >= -1e-10);
    CHECK(r.mc_standard_error > 0.0);
    CHECK(std::abs(r.gibbs_gap - r.gap_predicted) <
          3.0 * r.mc_standard_error);
  }
  // The posterior is the known minimizer; its predicted excess is zero.
  CHECK(result.best_index == 0);
  CHECK(result.reports[0].gap_predicted ==
        doctest::Approx(0.0).epsilon(1e-8));
  CHECK(result.reports[1].label == "reference");
}

TEST_CASE("totals are convex in the shift with the posterior curvature") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(6, 1.0);
  const Path y = fixture_y();
  const Eigen::VectorXd dir = Eigen::VectorXd::Ones(64);
  const std::vector<double> ss{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto family = make_mean_shift_family(model, grid, y, dir, ss);
  const FamilyMinimum result =
      minimize_over_family(model, grid, y, family, 2000, {52ull, 0ull});
  CHECK(result.best_index == 2);  // the unshifted posterior mean
  Eigen::MatrixXd X(5, 3);
  Eigen::VectorXd t(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = ss[std::size_t(i)];
    X(i, 2) = ss[std::size_t(i)] * ss[std::size_t(i)];
    t(i) = result.reports[std::size_t(i)].total;
  }
  const Eigen::VectorXd coef =
      (X.transpose() * X).ldlt().solve(X.transpose() * t);
  const auto post = posterior_candidate(model, grid, y);
  const double curvature = dir.dot(post.law.cov.llt().solve(dir));
  // F(mean + s v) - F(mean) = s^2 v^T Sigma^{-1} v / 2, so the quadratic
  // coefficient of the fit must be half the posterior-precision form.
  CHECK(std::abs(2.0 * coef(2) - curvature) < 0.2 * curvature);
}

TEST_CASE("a singleton family returns its only candidate") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(6, 1.0);
  const Path y = fixture_y();
  CandidateMeasure ref{reference_law(model, grid, y), "reference"};
  const FamilyMinimum result =
      minimize_over_family(model, grid, y, {ref}, 500, {53ull, 0ull});
  CHECK(result.best_index == 0);
  CHECK(result.best.label == "reference");
  REQUIRE(result.reports.size() == 1);
  CHECK_THROWS_WITH_AS(minimize_over_family(model, grid, y, {}, 500,
                                            {53ull, 0ull}),
                       doctest::Contains("nonempty family"),
                       std::invalid_argument);
}

TEST_CASE("mean-shift families share the posterior covariance and "
          "displace the mean linearly") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(5, 1.0);
  const Path y = restrict_to_level(fixture_y(), 5);
  const Eigen::VectorXd dir = Eigen::VectorXd::LinSpaced(32, 0.0, 1.0);
  const auto family = make_mean_shift_family(model, grid, y, dir, {0.0, 2.0});
  REQUIRE(family.size() == 2);
  CHECK((family[1].law.mean - family[0].law.mean - 2.0 * dir)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((family[1].law.cov - family[0].law.cov).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_THROWS_WITH_AS(
      make_mean_shift_family(model, grid, y, Eigen::VectorXd::Ones(7), {0.0}),
      doctest::Contains("wrong length"), std::invalid_argument);
}

}  // TEST_SUITE
