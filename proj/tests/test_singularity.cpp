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

#include "corrfilt/sampler.hpp"
#include "corrfilt/singularity.hpp"
#include "corrfilt/stats.hpp"
#include "doctest.h"
#include "support/test_models.hpp"

using namespace corrfilt;
using namespace corrfilt::testsupport;

TEST_SUITE("singularity") {

TEST_CASE("the stacked toy covariances match their Kronecker forms") {
  {
    const auto cov = discrete_cov_matrices(1, 1.0);
    Eigen::MatrixXd joint(2, 2), prod(2, 2);
    joint << 2.0, 1.0, 1.0, 1.0;
    prod << 2.0, 0.0, 0.0, 1.0;
    CHECK((cov.cov_joint - joint).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cov.cov_prod - prod).cwiseAbs().maxCoeff() == 0.0);
  }
  {
    const auto cov = discrete_cov_matrices(2, 0.5);
    Eigen::MatrixXd walk(2, 2);
    walk << 0.5, 0.5, 0.5, 1.0;  // delta_t * min(i, j)
    CHECK((cov.cov_joint.topLeftCorner(2, 2) - 2.0 * walk)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((cov.cov_joint.topRightCorner(2, 2) - walk).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((cov.cov_joint.bottomRightCorner(2, 2) - walk)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(cov.cov_prod.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cov.cov_prod.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_WITH_AS(discrete_cov_matrices(0, 1.0),
                       doctest::Contains("N must be >= 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(discrete_cov_matrices(4097, 1.0),
                       doctest::Contains("dense guard"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(discrete_cov_matrices(4, 0.0),
                       doctest::Contains("delta_t must be positive"),
                       std::invalid_argument);
}

TEST_CASE("the log density ratio matches a hand inversion at N = 1") {
  // At z = 0 only the half log-determinant ratio survives.
  CHECK(discrete_log_rn(Eigen::VectorXd::Zero(2), 1, 0.25) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(discrete_log_rn(Eigen::VectorXd::Zero(16), 8, 0.125) ==
        doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-13));
  // N = 1 by explicit 2x2 inversion:
  //   joint^{-1} - prod^{-1} = [[1/(2 dt), -1/dt], [-1/dt, 1/dt]].
  const double dt = 0.5;
  for (const auto& [x, y] : std::vector<std::pair<double, double>>{
           {1.0, 0.0}, {0.3, -0.7}, {-1.2, 0.4}}) {
    const double quad =
        x * x / (2.0 * dt) - 2.0 * x * y / dt + y * y / dt;
    Eigen::VectorXd z(2);
    z << x, y;
    CHECK(discrete_log_rn(z, 1, dt) ==
          doctest::Approx(0.5 * std::log(2.0) - 0.5 * quad).epsilon(1e-12));
  }
  CHECK_THROWS_WITH_AS(discrete_log_rn(Eigen::VectorXd::Zero(3), 2, 0.5),
                       doctest::Contains("length 2N"), std::invalid_argument);
}

TEST_CASE("the density ratio integrates to one under the product law") {
  for (const Eigen::Index N : {Eigen::Index{1}, Eigen::Index{2},
                               Eigen::Index{4}, Eigen::Index{8}}) {
    const double dt = 1.0 / double(N);
    const auto cov = discrete_cov_matrices(N, dt);
    const Eigen::LLT<Eigen::MatrixXd> llt(cov.cov_prod);
    REQUIRE(llt.info() == Eigen::Success);
    const Eigen::MatrixXd chol = llt.matrixL();
    const int M = 100000;
    Eigen::VectorXd vals(M);
    NormalStream stream({71ull, std::uint64_t(N)});
    Eigen::VectorXd zn(2 * N);
    for (int k = 0; k < M; ++k) {
      for (Eigen::Index i = 0; i < 2 * N; ++i) zn(i) = stream.next_normal();
      vals(k) = std::exp(discrete_log_rn(chol * zn, N, dt));
    }
    const Estimate est = mc_mean(vals);
    CHECK(std::abs(est.value - 1.0) < 4.0 * est.standard_error);
  }
}

TEST_CASE("the mean log ratio drifts linearly in N, down under product "
          "and up under joint sampling") {
  // Drift rates per step for this toy system: ln(2)/2 - 1 under product
  // sampling and ln(2)/2 under joint sampling.
  const double down = 0.5 * std::log(2.0) - 1.0;  // -0.6534
  const double up = 0.5 * std::log(2.0);          // +0.3466
  for (const Coupling measure : {Coupling::product, Coupling::joint}) {
    const auto rows = rn_degeneration_experiment(1.0, {8, 16, 32, 64}, 2000,
                                                 measure, {72ull, 0ull});
    REQUIRE(rows.size() == 4);
    Eigen::VectorXd N(4), mean_log(4);
    for (int i = 0; i < 4; ++i) {
      CHECK(rows[std::size_t(i)].delta_t ==
            doctest::Approx(1.0 / rows[std::size_t(i)].N));
      CHECK(rows[std::size_t(i)].sampling_measure == measure);
      N(i) = rows[std::size_t(i)].N;
      mean_log(i) = rows[std::size_t(i)].mean_log_rn;
    }
    const LinearFit fit = fit_line(N, mean_log);
    const double target = measure == Coupling::product ? down : up;
    CHECK(std::abs(fit.slope - target) < 0.25 * std::abs(target));
    CHECK(fit.r_squared > 0.99);
    // Per-step rate stabilizes between N = 32 and N = 64.
    const double r32 = rows[2].mean_log_rn / 32.0;
    const double r64 = rows[3].mean_log_rn / 64.0;
    CHECK(std::abs(r64 - r32) < 0.25 * std::abs(r32));
    // Monotone drift, with 3-SE slack for the sample means.
    for (int i = 0; i + 1 < 4; ++i) {
      const double se = std::sqrt(
          std::pow(rows[std::size_t(i)].sd_log_rn, 2) / 2000.0 +
          std::pow(rows[std::size_t(i + 1)].sd_log_rn, 2) / 2000.0);
      const double diff =
          rows[std::size_t(i + 1)].mean_log_rn - rows[std::size_t(i)].mean_log_rn;
      if (measure == Coupling::product)
        CHECK(diff < 3.0 * se);
      else
        CHECK(diff > -3.0 * se);
    }
  }
}

TEST_CASE("realized covariation is linear in each argument and zero for "
          "frozen paths") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(8, 1.0);
  const PathPair pair = simulate_joint(model, grid, {301ull, 0ull});
  const CovariationStat base = quadratic_covariation(pair, 1.0, model);
  PathPair doubled = pair;
  doubled.x.values *= 2.0;
  const CovariationStat twice = quadratic_covariation(doubled, 1.0, model);
  CHECK((twice.value - 2.0 * base.value).cwiseAbs().maxCoeff() == 0.0);

  PathPair frozen = pair;
  frozen.x = constant_path(grid, model.x0);
  const CovariationStat none = quadratic_covariation(frozen, 1.0, model);
  CHECK(none.value.cwiseAbs().maxCoeff() == 0.0);
  // The joint-sampling target is the sigma1 integral, not the realization.
  CHECK(none.target_joint(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(quadratic_covariation(pair, 0.3, model),
                       doctest::Contains("not a grid point"),
                       std::invalid_argument);
}

TEST_CASE("a path against itself realizes its own quadratic variation") {
  const auto model = scalar_model(0.0, 0.0, 1.0, 0.5, 1.0, 1.0);
  const auto grid = make_dyadic_grid(12, 1.0);
  const int M = 50;
  Eigen::VectorXd qv(M);
  for (int k = 0; k < M; ++k) {
    const PathPair p = simulate_joint(model, grid, {80ull, std::uint64_t(k)});
    const PathPair same{p.y, p.y, Coupling::joint};
    qv(k) = quadratic_covariation(same, 1.0, model).value(0, 0);
  }
  // y is a standard random walk: its realized [y, y]_1 concentrates at 1.
  const Estimate est = mc_mean(qv);
  CHECK(std::abs(est.value - 1.0) < 4.0 * est.standard_error);
}

TEST_CASE("covariation concentrates on the shared loading under joint "
          "sampling and dies under product sampling") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(12, 1.0);
  const int M = 1000;
  Eigen::VectorXd qj(M), qp(M);
  for (int k = 0; k < M; ++k) {
    qj(k) = quadratic_covariation(
                simulate_joint(model, grid, {73ull, std::uint64_t(k)}), 1.0,
                model)
                .value(0, 0);
    qp(k) = quadratic_covariation(
                simulate_product(model, grid, {74ull, std::uint64_t(k)}), 1.0,
                model)
                .value(0, 0);
  }
  const Estimate joint_est = mc_mean(qj);
  const Estimate prod_est = mc_mean(qp);
  CHECK(std::abs(joint_est.value - 0.5) < 4.0 * joint_est.standard_error);
  CHECK(std::abs(prod_est.value) < 4.0 * prod_est.standard_error);
}

TEST_CASE("the product-sampling covariation variance halves per level") {
  const auto model = benchmark_model();
  const std::vector<int> levels{6, 7, 8, 9, 10, 11, 12};
  const auto rows =
      covariation_decay_study(model, 1.0, levels, 200, {75ull, 0ull});
  REQUIRE(rows.size() == levels.size());
  Eigen::VectorXd lv(7), log_var(7);
  for (int i = 0; i < 7; ++i) {
    CHECK(rows[std::size_t(i)].level == levels[std::size_t(i)]);
    CHECK(rows[std::size_t(i)].var > 0.0);
    lv(i) = rows[std::size_t(i)].level;
    log_var(i) = std::log2(rows[std::size_t(i)].var);
  }
  const LinearFit fit = fit_line(lv, log_var);
  CHECK(fit.slope > -1.3);
  CHECK(fit.slope < -0.7);
  CHECK(fit.r_squared > 0.8);
}

TEST_CASE("drift plays no role in the product-sampling collapse") {
  // Pure-noise model under product sampling vs the benchmark under joint
  // sampling, across three refinement levels.
  const auto driftless = scalar_model(0.0, 0.0, 1.0, 0.5, 1.0, 1.0);
  const auto model = benchmark_model();
  for (const int level : {6, 9, 12}) {
    const auto grid = make_dyadic_grid(level, 1.0);
    const int M = 300;
    Eigen::VectorXd qp(M), qj(M);
    for (int k = 0; k < M; ++k) {
      qp(k) = quadratic_covariation(
                  simulate_product(driftless, grid, {76ull, std::uint64_t(k)}),
                  1.0, driftless)
                  .value(0, 0);
      qj(k) = quadratic_covariation(
                  simulate_joint(model, grid, {77ull, std::uint64_t(k)}), 1.0,
                  model)
                  .value(0, 0);
    }
    const Estimate prod_est = mc_mean(qp);
    const Estimate joint_est = mc_mean(qj);
    CHECK(std::abs(prod_est.value) < 4.0 * prod_est.standard_error);
    CHECK(std::abs(joint_est.value - 0.5) < 4.0 * joint_est.standard_error);
  }
}

TEST_CASE("the covariation distance classifies couplings reliably from "
          "level 8 up") {
  const auto model = benchmark_model();
  for (const int level : {8, 10, 12}) {
    const auto grid = make_dyadic_grid(level, 1.0);
    const int M = 200;
    int joint_errors = 0, prod_errors = 0;
    for (int k = 0; k < M; ++k) {
      if (classify_coupling(
              simulate_joint(model, grid, {78ull, std::uint64_t(k)}), model) !=
          Coupling::joint)
        ++joint_errors;
      if (classify_coupling(
              simulate_product(model, grid, {79ull, std::uint64_t(k)}),
              model) != Coupling::product)
        ++prod_errors;
    }
    CHECK(joint_errors <= 2);  // <= 1% at M = 200
    CHECK(prod_errors <= 2);
  }
}

TEST_CASE("the classifier refuses models and grids it cannot separate") {
  const auto grid = make_dyadic_grid(8, 1.0);
  const auto no_shared = uncorrelated_benchmark();
  const PathPair p = simulate_joint(no_shared, grid, {302ull, 0ull});
  CHECK_THROWS_WITH_AS(classify_coupling(p, no_shared),
                       doctest::Contains("model violates separation"),
                       std::invalid_argument);
  const auto model = benchmark_model();
  const PathPair coarse =
      simulate_joint(model, make_dyadic_grid(7, 1.0), {303ull, 0ull});
  CHECK_THROWS_WITH_AS(classify_coupling(coarse, model),
                       doctest::Contains("level >= 8"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      classify_coupling(simulate_joint(model, grid, {304ull, 0ull}), model,
                        1.5),
      doctest::Contains("threshold_fraction"), std::invalid_argument);
}

TEST_CASE("stacked quadratic-variation blocks expose the noise geometry") {
  const auto model = benchmark_model();
  const auto grid = make_dyadic_grid(8, 1.0);
  const int M = 400;
  Eigen::MatrixXd sum_j = Eigen::MatrixXd::Zero(2, 2), sum2_j = sum_j;
  Eigen::MatrixXd sum_p = sum_j, sum2_p = sum_j;
  for (int k = 0; k < M; ++k) {
    const Eigen::MatrixXd bj = empirical_qv_blocks(
        simulate_joint(model, grid, {81ull, std::uint64_t(k)}), model);
    const Eigen::MatrixXd bp = empirical_qv_blocks(
        simulate_product(model, grid, {82ull, std::uint64_t(k)}), model);
    CHECK((bj - bj.transpose()).cwiseAbs().maxCoeff() == 0.0);
    sum_j += bj;
    sum2_j += bj.cwiseProduct(bj);
    sum_p += bp;
    sum2_p += bp.cwiseProduct(bp);
  }
  const Eigen::MatrixXd mean_j = sum_j / M, mean_p = sum_p / M;
  const Eigen::MatrixXd se_j =
      ((sum2_j / M - mean_j.cwiseProduct(mean_j)) / (M - 1.0)).cwiseSqrt();
  const Eigen::MatrixXd se_p =
      ((sum2_p / M - mean_p.cwiseProduct(mean_p)) / (M - 1.0)).cwiseSqrt();
  Eigen::MatrixXd target(2, 2);
  target << 1.25, 0.5, 0.5, 1.0;  // [s0 s0^T + s1 s1^T, s1; s1^T, I]
  CHECK(((mean_j - target).cwiseQuotient(se_j)).cwiseAbs().maxCoeff() < 4.0);
  CHECK(std::abs(mean_p(0, 1) / se_p(0, 1)) < 4.0);
  CHECK(std::abs(mean_p(1, 0) / se_p(1, 0)) < 4.0);
  // The marginal diagonal blocks are coupling-invariant.
  CHECK(std::abs(mean_p(0, 0) - 1.25) < 4.0 * se_p(0, 0));
  CHECK(std::abs(mean_p(1, 1) - 1.0) < 4.0 * se_p(1, 1));
}

}  // TEST_SUITE
