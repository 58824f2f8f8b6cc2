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

#ifndef CORRFILT_SINGULARITY_HPP
#define CORRFILT_SINGULARITY_HPP

#include <string>
#include <vector>

#include "corrfilt/model.hpp"
#include "corrfilt/rng.hpp"

/**
 * \file
 * \brief Failure-mode experiments for joint vs product path measures.
 *
 * Two diagnostics expose the mutual singularity that appears when the
 * observation noise also drives the signal:
 *
 *   - A two-random-walk toy system (x driven by w + b, y by w alone)
 *     whose joint and product covariances have explicit Kronecker forms.
 *     The density ratio between them degenerates as the grid refines:
 *     its log mean drifts linearly in the step count, downward under
 *     product sampling, upward under joint sampling.
 *
 *   - The dyadic quadratic covariation Q_n = sum dx dy^T, which
 *     concentrates on the integrated shared loading under joint sampling
 *     and collapses to zero (variance O(2^-n)) under product sampling.
 *     A threshold on those two distances classifies unlabeled pairs.
 */

namespace corrfilt {

/// Realized dyadic covariation over [0, t] with its joint-sampling target
/// (trapezoidal integral of sigma1 along the stored signal path).
struct CovariationStat {
  int level = 0;
  double t = 0.0;
  Eigen::MatrixXd value;         // d x n
  Eigen::MatrixXd target_joint;  // d x n
};

/// One row of the density-ratio degeneration sweep.
struct RnExperimentRow {
  int N = 0;
  double delta_t = 0.0;
  double mean_log_rn = 0.0;
  double sd_log_rn = 0.0;
  Coupling sampling_measure = Coupling::product;
};

/// Joint and product covariances of the stacked toy vector
/// (x_1..x_N, y_1..y_N), assembled from A_ij = delta_t * min(i, j):
///   cov_joint = [[2, 1], [1, 1]] (x) A,  cov_prod = [[2, 0], [0, 1]] (x) A.
struct DiscreteCovPair {
  Eigen::MatrixXd cov_joint;  // 2N x 2N
  Eigen::MatrixXd cov_prod;   // 2N x 2N
};

/// \throws std::invalid_argument if N < 1, N > 4096 (dense guard), or
///         delta_t <= 0.
DiscreteCovPair discrete_cov_matrices(Eigen::Index N, double delta_t);

/// Log of the joint-to-product Gaussian density ratio at a stacked vector:
/// (N/2) ln 2 - (1/2) z^T (cov_joint^{-1} - cov_prod^{-1}) z.
/// The (N/2) ln 2 prefactor is the half log-determinant ratio of the two
/// covariances.
double discrete_log_rn(const Eigen::VectorXd& z, Eigen::Index N,
                       double delta_t);

/// For each N: draws M stacked vectors from the chosen measure and records
/// mean and standard deviation of the log ratio (sweep row r uses stream
/// base seed.stream_id + r * kStreamBlock).
std::vector<RnExperimentRow> rn_degeneration_experiment(
    double T, const std::vector<Eigen::Index>& N_list, std::size_t M,
    Coupling measure, const SeedSpec& seed, int threads = 1);

/// Q_n over [0, t] at the pair's native level, plus the target integral.
/// \throws std::invalid_argument if t is not a grid point.
CovariationStat quadratic_covariation(const PathPair& pair, double t,
                                      const LinearModel& model);
CovariationStat quadratic_covariation(const PathPair& pair, double t,
                                      const NonlinearModel& model);

/// One row of the product-measure decay study. For matrix-valued Q the
/// var column is the total variance (mean squared Frobenius deviation
/// from the entrywise mean).
struct DecayRow {
  int level = 0;
  double mean_norm = 0.0;
  double var = 0.0;
};

/// Samples M product-coupled pairs per level and summarizes Q_n over
/// [0, t]. The variance column halves per level (rate O(2^-n)).
std::vector<DecayRow> covariation_decay_study(
    const LinearModel& model, double t, const std::vector<int>& levels,
    std::size_t M, const SeedSpec& seed, int threads = 1);

/// Labels a pair joint or product by comparing |Q_n - target| against
/// |Q_n| (Frobenius): joint iff
///   |Q_n - target| < threshold_fraction * (|Q_n - target| + |Q_n|).
/// threshold_fraction = 0.5 is the midpoint rule.
/// \throws std::invalid_argument "model violates separation" when the
///         target integral is below 1e-8, or if the pair's level is < 8.
Coupling classify_coupling(const PathPair& pair, const LinearModel& model,
                           double threshold_fraction = 0.5);

/// Realized per-unit-time quadratic variation of the stacked process
/// (x; y): sum of dz dz^T over the grid divided by T. Joint sampling
/// concentrates on [[s0 s0^T + s1 s1^T, s1], [s1^T, I]]; product sampling
/// zeroes the off-diagonal blocks.
Eigen::MatrixXd empirical_qv_blocks(const PathPair& pair,
                                    const LinearModel& model);

/// Writes sweep rows as CSV with columns
/// N, delta_t, mean_log_rn, sd_log_rn, sampling_measure.
void write_rn_rows_csv(const std::string& file,
                       const std::vector<RnExperimentRow>& rows,
                       const std::vector<std::string>& comments);

}  // namespace corrfilt

#endif  // CORRFILT_SINGULARITY_HPP
