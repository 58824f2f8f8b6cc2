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

#ifndef CORRFILT_ORACLE_HPP
#define CORRFILT_ORACLE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrfilt/csv.hpp"
#include "corrfilt/model.hpp"

/**
 * \file
 * \brief Exact finite-dimensional Gaussian ground truth for the linear
 *        Euler chain: its stacked joint law, brute-force conditioning on
 *        the observation block (the posterior oracle), and a discretized
 *        correlated-noise Kalman-Bucy recursion.
 */

namespace corrfilt {

/// Index map for flattened laws. Time index i runs 1..steps (the
/// deterministic t = 0 state is excluded from the flat vector); signal
/// coordinates come first, then observation coordinates:
///   signal  (i, k) -> (i-1) * signal_dim + k
///   obs     (i, k) -> steps * signal_dim + (i-1) * obs_dim + k
/// Marginal laws keep the retained block in the "signal" slot and set
/// obs_dim = 0.
struct LawLayout {
  Eigen::Index signal_dim = 0;
  Eigen::Index obs_dim = 0;
  Eigen::Index steps = 0;

  Eigen::Index size() const { return steps * (signal_dim + obs_dim); }
  Eigen::Index signal_size() const { return steps * signal_dim; }
  Eigen::Index obs_size() const { return steps * obs_dim; }
  Eigen::Index signal_index(Eigen::Index i, Eigen::Index k) const {
    return (i - 1) * signal_dim + k;
  }
  Eigen::Index obs_index(Eigen::Index i, Eigen::Index k) const {
    return signal_size() + (i - 1) * obs_dim + k;
  }
};

/// A multivariate Gaussian over a flattened grid vector.
struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  LawLayout layout;
  std::shared_ptr<const TimeGrid> grid;
};

/// Per-time filtering means and covariances, including the t = 0 point.
struct FilterTrack {
  std::vector<double> times;
  Eigen::MatrixXd means;               // (2^level + 1) x d
  std::vector<Eigen::MatrixXd> covs;   // one d x d matrix per time
};

/// Stacks rows 1..N of a path into the flat layout order (t = 0 dropped).
Eigen::VectorXd flatten_path(const Path& path);

/// Exact mean/covariance of the stacked vector (x_1..x_N, y_1..y_N) of
/// the Euler chain, by linear-Gaussian propagation of the step map.
/// \throws std::invalid_argument for grid level > 12 (dense guard).
GaussianLaw build_discrete_joint_law(const LinearModel& model,
                                     const std::shared_ptr<const TimeGrid>& grid);

/// Marginal law of the signal block (obs_dim = 0 layout).
GaussianLaw signal_marginal(const GaussianLaw& law);

/// Marginal law of the observation block (retained block moves to the
/// signal slot of the layout).
GaussianLaw observation_marginal(const GaussianLaw& law);

/// Exact discrete posterior of the full signal trajectory given the
/// observation trajectory, by Schur-complement conditioning.
///
/// PSD repair policy: eigenvalues of the conditioned covariance in
/// (-1e-10 * lambda_max, 0) are clamped to 0 (roundoff); anything more
/// negative is a hard error (bug, not noise).
/// \throws std::runtime_error "degenerate observation law" if the
///         observation block is numerically singular.
GaussianLaw condition_on_observations(const GaussianLaw& law, const Path& y);

/// Log-density of the law at a flat vector (covariance must be positive
/// definite).
double log_density(const GaussianLaw& law, const Eigen::VectorXd& z);

/// Discretized correlated-noise Kalman-Bucy recursion:
///   K_i = P_i C^T + sigma1
///   m_{i+1} = m_i + A m_i dt + K_i (dy_i - C m_i dt)
///   P_{i+1} = P_i + dt (A P_i + P_i A^T + sigma0 sigma0^T
///                       + sigma1 sigma1^T - K_i K_i^T)
/// started from m_0 = x0, P_0 = 0.
///
/// This is a first-order (Euler) discretization of the continuous-time
/// recursion, deliberately NOT the exact chain posterior: its terminal
/// mean/covariance converge to condition_on_observations at rate O(dt)
/// as the grid refines, and that rate is part of the test surface.
FilterTrack kalman_correlated(const LinearModel& model,
                              const std::shared_ptr<const TimeGrid>& grid,
                              const Path& y);

/// Marginal per-time track of a signal-block law, with the deterministic
/// x0 row prepended at t = 0.
FilterTrack track_from_signal_law(const GaussianLaw& law,
                                  const Eigen::VectorXd& x0);

/// Track serialization: columns t, mean_1..mean_d, then the covariance
/// entries cov_11..cov_dd in row-major order.
CsvTable filter_track_to_table(const FilterTrack& track,
                               const std::vector<std::string>& comments);
FilterTrack filter_track_from_table(const CsvTable& table);

}  // namespace corrfilt

#endif  // CORRFILT_ORACLE_HPP
