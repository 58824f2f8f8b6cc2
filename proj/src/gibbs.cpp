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

#include "corrfilt/gibbs.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "corrfilt/parallel.hpp"
#include "corrfilt/sampler.hpp"

namespace corrfilt {

namespace {

void check_same_grid(const Path& x, const Path& y) {
  if (!x.grid || !y.grid || x.grid->level != y.grid->level ||
      x.grid->T != y.grid->T)
    throw std::invalid_argument("signal/observation grid mismatch");
  if (x.values.rows() != y.values.rows())
    throw std::invalid_argument("signal/observation row count mismatch");
}

}  // namespace

EnergyBreakdown energy(const LinearModel& model, const Path& x, const Path& y) {
  check_same_grid(x, y);
  if (x.dim() != model.signal_dim() || y.dim() != model.obs_dim())
    throw std::invalid_argument("path dimension mismatch with model");
  const Eigen::Index steps = x.values.rows() - 1;
  const double dt = x.grid->dt();

  const Eigen::MatrixXd S = model.sigma0 * model.sigma0.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sigma0 sigma0^T factorization failed");
  const Eigen::MatrixXd beta_map = model.A - model.sigma1 * model.C;

  EnergyBreakdown out;
  for (Eigen::Index i = 0; i < steps; ++i) {
    const Eigen::VectorXd xi = x.values.row(i).transpose();
    const Eigen::VectorXd dx =
        (x.values.row(i + 1) - x.values.row(i)).transpose();
    const Eigen::VectorXd dy =
        (y.values.row(i + 1) - y.values.row(i)).transpose();
    const Eigen::VectorXd beta = beta_map * xi;
    const Eigen::VectorXd s_inv_beta = llt.solve(beta);
    out.drift_stochastic += s_inv_beta.dot(dx - model.sigma1 * dy);
    out.drift_quadratic += 0.5 * s_inv_beta.dot(beta) * dt;
    const Eigen::VectorXd obs = model.C * xi;
    out.obs_stochastic += obs.dot(dy);
    out.obs_quadratic += 0.5 * obs.squaredNorm() * dt;
  }
  return out;
}

double mn_energy_uncorrelated(const LinearModel& model, const Path& x,
                              const Path& y, bool robust) {
  if (model.sigma1.size() > 0 && model.sigma1.cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument(
        "uncorrelated energy undefined under shared noise");
  check_same_grid(x, y);
  if (x.dim() != model.signal_dim() || y.dim() != model.obs_dim())
    throw std::invalid_argument("path dimension mismatch with model");
  const Eigen::Index steps = x.values.rows() - 1;
  const double dt = x.grid->dt();

  double quadratic = 0.0;
  for (Eigen::Index i = 0; i < steps; ++i)
    quadratic += 0.5 * (model.C * x.values.row(i).transpose()).squaredNorm() * dt;

  double stochastic = 0.0;
  if (!robust) {
    for (Eigen::Index i = 0; i < steps; ++i) {
      const Eigen::VectorXd dy =
          (y.values.row(i + 1) - y.values.row(i)).transpose();
      stochastic += (model.C * x.values.row(i).transpose()).dot(dy);
    }
  } else {
    // Discrete summation by parts: no y increments appear, so the robust
    // form stays evaluable for rough observation records.
    stochastic =
        y.values.row(steps).dot((model.C * x.values.row(steps).transpose())) -
        y.values.row(0).dot((model.C * x.values.row(0).transpose()));
    for (Eigen::Index i = 0; i < steps; ++i) {
      const Eigen::VectorXd dh =
          model.C *
          (x.values.row(i + 1) - x.values.row(i)).transpose();
      stochastic -= y.values.row(i + 1).dot(dh);
    }
  }
  return -(stochastic - quadratic);
}

void WeightedEnsemble::normalize() {
  if (log_weights.size() == 0)
    throw std::invalid_argument("cannot normalize an empty ensemble");
  const double mx = log_weights.maxCoeff();
  if (!std::isfinite(mx)) {
    std::ostringstream msg;
    msg << "importance weights degenerate: max log-weight " << mx
        << ", min log-weight " << log_weights.minCoeff();
    throw std::runtime_error(msg.str());
  }
  const double lse = log_sum_exp(log_weights);
  weights = (log_weights.array() - lse).exp();
  normalized = true;
}

double WeightedEnsemble::ess() const {
  if (!normalized)
    throw std::logic_error("ess requires a normalized ensemble");
  return 1.0 / weights.squaredNorm();
}

namespace {

WeightedEnsemble draw_weighted_ensemble(const LinearModel& model,
                                        const std::shared_ptr<const TimeGrid>& grid,
                                        const Path& y, std::size_t M,
                                        const SeedSpec& seed, int threads) {
  if (M < 2) throw std::invalid_argument("ensemble size M must be >= 2");
  WeightedEnsemble ensemble;
  ensemble.paths.resize(M);
  ensemble.log_weights.resize(static_cast<Eigen::Index>(M));
  parallel_for(M, threads, [&](std::size_t i) {
    const SeedSpec path_seed{seed.master_seed, seed.stream_id + i};
    ensemble.paths[i] = sample_reference(model, grid, y, path_seed);
    ensemble.log_weights(static_cast<Eigen::Index>(i)) =
        -energy(model, ensemble.paths[i], y).total();
  });
  return ensemble;
}

}  // namespace

ImportancePosterior importance_posterior(const LinearModel& model,
                                         const std::shared_ptr<const TimeGrid>& grid,
                                         const Path& y, std::size_t M,
                                         const SeedSpec& seed, int threads) {
  ImportancePosterior result;
  result.ensemble = draw_weighted_ensemble(model, grid, y, M, seed, threads);
  result.ensemble.normalize();
  const Eigen::VectorXd& w = result.ensemble.weights;
  const Eigen::Index d = model.signal_dim();
  const auto rows = static_cast<Eigen::Index>(grid->size());

  result.moments.times = grid->times;
  result.moments.means.resize(rows, d);
  result.moments.covs.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index t = 0; t < rows; ++t) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < M; ++i)
      mean += w(static_cast<Eigen::Index>(i)) *
              result.ensemble.paths[i].values.row(t).transpose();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < M; ++i) {
      const Eigen::VectorXd dev =
          result.ensemble.paths[i].values.row(t).transpose() - mean;
      cov += w(static_cast<Eigen::Index>(i)) * dev * dev.transpose();
    }
    result.moments.means.row(t) = mean.transpose();
    result.moments.covs[static_cast<std::size_t>(t)] = cov;
  }
  return result;
}

Estimate estimate_log_normalizer(const LinearModel& model,
                                 const std::shared_ptr<const TimeGrid>& grid,
                                 const Path& y, std::size_t M,
                                 const SeedSpec& seed, int threads) {
  WeightedEnsemble ensemble =
      draw_weighted_ensemble(model, grid, y, M, seed, threads);
  const double mx = ensemble.log_weights.maxCoeff();
  if (!std::isfinite(mx)) {
    std::ostringstream msg;
    msg << "importance weights degenerate: max log-weight " << mx
        << ", min log-weight " << ensemble.log_weights.minCoeff();
    throw std::runtime_error(msg.str());
  }
  return jackknife_log_mean_exp(ensemble.log_weights);
}

}  // namespace corrfilt
