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

#ifndef CORRFILT_GIBBS_HPP
#define CORRFILT_GIBBS_HPP

#include <vector>

#include "corrfilt/model.hpp"
#include "corrfilt/oracle.hpp"
#include "corrfilt/rng.hpp"
#include "corrfilt/stats.hpp"

/**
 * \file
 * \brief Energy of the filtering distribution relative to the conditional
 *        reference measure, and its Monte Carlo Gibbs representation.
 *
 * With beta(x) = (A - sigma1 C) x and S = sigma0 sigma0^T, the discrete
 * energy of a signal path x given an observation path y is
 *
 *   H(x, y) = - sum_i beta(x_i)^T S^{-1} (dx_i - sigma1 dy_i)
 *             + 1/2 sum_i beta(x_i)^T S^{-1} beta(x_i) dt      (drift part)
 *             - sum_i (C x_i)^T dy_i
 *             + 1/2 sum_i |C x_i|^2 dt                         (obs part)
 *
 * all sums left-endpoint (Ito). The drift part is the Girsanov cost of
 * moving the reference signal onto the model drift; the observation part
 * is the negative log-likelihood ratio of the y increments given the
 * signal. Together they make exp(-H) dmu_y / Z equal, exactly at every
 * grid level, to the discrete posterior obtained by Gaussian conditioning
 * (the Schur oracle), with Z the ratio of the observation-marginal
 * densities of the model chain and the driftless chain. Dropping the
 * observation part would tilt mu_y by the drift cost only and the
 * reweighted ensemble would NOT converge to the posterior; the split is
 * kept visible in EnergyBreakdown so both contributions are testable.
 */

namespace corrfilt {

/// The four accumulated pieces of the energy, plus the assembled views.
/// Invariant on every evaluation:
///   total() == -stochastic_term() + quadratic_term().
struct EnergyBreakdown {
  double drift_stochastic = 0.0;  ///< sum beta^T S^{-1} (dx - sigma1 dy)
  double drift_quadratic = 0.0;   ///< 1/2 sum beta^T S^{-1} beta dt
  double obs_stochastic = 0.0;    ///< sum (C x)^T dy
  double obs_quadratic = 0.0;     ///< 1/2 sum |C x|^2 dt

  double stochastic_term() const { return drift_stochastic + obs_stochastic; }
  double quadratic_term() const { return drift_quadratic + obs_quadratic; }
  double total() const { return -stochastic_term() + quadratic_term(); }
};

/// Evaluates the energy of a signal path against an observation path.
/// \throws std::invalid_argument on grid/dimension mismatch,
///         std::runtime_error if sigma0 sigma0^T cannot be factorized.
EnergyBreakdown energy(const LinearModel& model, const Path& x, const Path& y);

/// Negative log Girsanov density for the uncorrelated (sigma1 = 0) system,
/// observation part only:
///   -( sum_i h(x_i)^T dy_i - 1/2 sum_i |h(x_i)|^2 dt ),  h(x) = C x.
///
/// robust = true replaces the stochastic sum by its exact discrete
/// summation-by-parts image
///   y_N^T h(x_N) - y_0^T h(x_0) - sum_i y_{i+1}^T (h(x_{i+1}) - h(x_i)),
/// which involves no y increments; the two forms agree to roundoff.
/// \throws std::invalid_argument "uncorrelated energy undefined under
///         shared noise" when sigma1 != 0.
double mn_energy_uncorrelated(const LinearModel& model, const Path& x,
                              const Path& y, bool robust);

/// Reference-measure sample paths with importance log-weights -H.
struct WeightedEnsemble {
  std::vector<Path> paths;
  Eigen::VectorXd log_weights;
  Eigen::VectorXd weights;  ///< filled by normalize(); sums to 1
  bool normalized = false;

  /// Log-sum-exp self-normalization.
  /// \throws std::runtime_error with max/min log-weight diagnostics if
  ///         every weight underflowed.
  void normalize();

  /// Effective sample size 1 / sum w_i^2, in [1, M].
  double ess() const;
};

/// Importance-sampling representation of the filtering distribution.
struct ImportancePosterior {
  WeightedEnsemble ensemble;
  FilterTrack moments;  ///< weighted mean/cov of x_t at every grid time
};

/// Draws M paths from the conditional reference measure (path i on stream
/// seed.stream_id + i), weights each by exp(-H), and returns the
/// normalized ensemble with its weighted moment track.
/// threads affects speed only, never values.
ImportancePosterior importance_posterior(const LinearModel& model,
                                         const std::shared_ptr<const TimeGrid>& grid,
                                         const Path& y, std::size_t M,
                                         const SeedSpec& seed, int threads = 1);

/// log Z(y) = log of the sample mean of exp(-H) over reference draws,
/// with a leave-one-out jackknife standard error. Uses the same draw
/// streams as importance_posterior, so the two agree path-for-path at a
/// given seed.
Estimate estimate_log_normalizer(const LinearModel& model,
                                 const std::shared_ptr<const TimeGrid>& grid,
                                 const Path& y, std::size_t M,
                                 const SeedSpec& seed, int threads = 1);

}  // namespace corrfilt

#endif  // CORRFILT_GIBBS_HPP
