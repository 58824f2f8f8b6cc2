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

#ifndef CORRFILT_FREE_ENERGY_HPP
#define CORRFILT_FREE_ENERGY_HPP

#include <string>
#include <vector>

#include "corrfilt/model.hpp"
#include "corrfilt/oracle.hpp"
#include "corrfilt/rng.hpp"
#include "corrfilt/stats.hpp"

/**
 * \file
 * \brief The free-energy functional over Gaussian candidate measures.
 *
 * For a candidate law P on signal trajectories, the free energy given the
 * observation path y is
 *
 *   F(P) = KL(P || mu_y) + E_P[H(., y)]
 *
 * with mu_y the conditional reference measure and H the energy of the
 * gibbs module. F is minimized exactly by the filtering distribution, the
 * minimum value is -log Z(y), and for any candidate the excess
 * F(P) - F(posterior) equals KL(P || posterior). Reports carry Monte
 * Carlo standard errors so each of those identities can be checked to a
 * stated resolution.
 *
 * Candidates are finite-dimensional Gaussians on the grid. Since the
 * exact posterior is itself Gaussian, this family contains the true
 * minimizer and the restriction costs nothing for verification.
 */

namespace corrfilt {

/// A labeled Gaussian candidate over the signal grid (signal-only layout,
/// t = 0 excluded as deterministic).
struct CandidateMeasure {
  GaussianLaw law;
  std::string label;
};

/// Evaluated free energy of one candidate.
/// Invariants: total = kl_to_reference + expected_energy;
/// kl_to_reference >= -1e-10.
struct FreeEnergyReport {
  std::string label;
  double kl_to_reference = 0.0;
  double expected_energy = 0.0;
  double total = 0.0;
  double gibbs_gap = 0.0;       ///< total - total(posterior as candidate)
  double gap_predicted = 0.0;   ///< closed-form KL(candidate || posterior)
  double mc_standard_error = 0.0;  ///< combined SE of gibbs_gap
};

/// The discretized conditional reference measure as an explicit Gaussian:
/// mean_i = x0 + sigma1 y_i, Cov(x_i, x_j) = sigma0 sigma0^T min(t_i, t_j).
/// \throws std::invalid_argument for grid level > 12 (dense guard).
GaussianLaw reference_law(const LinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const Path& y);

/// Closed-form KL divergence between finite-dimensional Gaussians.
/// Returns +infinity when p is singular against a nonsingular q.
/// \throws std::runtime_error when q's covariance is singular.
double kl_gaussian(const GaussianLaw& p, const GaussianLaw& q);

/// Monte Carlo estimate of E_P[H(., y)] over M exact Cholesky draws from
/// the candidate (draw i on stream seed.stream_id + i). Returns a
/// +infinity sentinel when the sampled energies look heavy-tailed
/// (excess kurtosis above kurtosis_guard): the expectation is then not
/// certified to exist at this sample size.
Estimate expected_energy(const CandidateMeasure& candidate,
                         const LinearModel& model, const Path& y,
                         std::size_t M, const SeedSpec& seed, int threads = 1,
                         double kurtosis_guard = 100.0);

/// The Schur-oracle posterior packaged as a candidate (the known
/// minimizer of the free energy).
CandidateMeasure posterior_candidate(const LinearModel& model,
                                     const std::shared_ptr<const TimeGrid>& grid,
                                     const Path& y);

/// Full report for one candidate. The posterior side of the gap is
/// evaluated with an independent ensemble on stream base
/// seed.stream_id + kStreamBlock; mc_standard_error combines both sides.
FreeEnergyReport free_energy(const CandidateMeasure& candidate,
                             const LinearModel& model,
                             const std::shared_ptr<const TimeGrid>& grid,
                             const Path& y, std::size_t M,
                             const SeedSpec& seed, int threads = 1);

/// Candidates with the posterior covariance and mean = (flattened
/// correlated-Kalman mean) + s * direction, one per entry of s_values.
/// direction has length signal_dim * steps.
std::vector<CandidateMeasure> make_mean_shift_family(
    const LinearModel& model, const std::shared_ptr<const TimeGrid>& grid,
    const Path& y, const Eigen::VectorXd& direction,
    const std::vector<double>& s_values);

/// Result of a family sweep: reports in candidate order and the argmin
/// of the total free energy.
struct FamilyMinimum {
  std::size_t best_index = 0;
  CandidateMeasure best;
  std::vector<FreeEnergyReport> reports;
};

/// Evaluates free_energy for every candidate (candidate j uses stream
/// base seed.stream_id + 2 j kStreamBlock) and returns the minimizer of
/// the reported totals.
FamilyMinimum minimize_over_family(const LinearModel& model,
                                   const std::shared_ptr<const TimeGrid>& grid,
                                   const Path& y,
                                   const std::vector<CandidateMeasure>& family,
                                   std::size_t M, const SeedSpec& seed,
                                   int threads = 1);

/// Writes reports as CSV with columns label, kl_to_reference,
/// expected_energy, total, gibbs_gap, gap_predicted, mc_se.
void write_reports_csv(const std::string& file,
                       const std::vector<FreeEnergyReport>& reports,
                       const std::vector<std::string>& comments);

}  // namespace corrfilt

#endif  // CORRFILT_FREE_ENERGY_HPP
