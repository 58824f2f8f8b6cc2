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

#ifndef CORRFILT_SAMPLER_HPP
#define CORRFILT_SAMPLER_HPP

#include "corrfilt/model.hpp"
#include "corrfilt/rng.hpp"

/**
 * \file
 * \brief Reproducible Euler-Maruyama path simulation.
 *
 * Scheme: left-endpoint (Ito) Euler steps
 *   x_{i+1} = x_i + b(t_i, x_i) dt + sigma0 dB_i + sigma1 dW_i
 *   y_{i+1} = y_i + h(x_i) dt + dW_i
 * with dB_i, dW_i independent N(0, dt I) and the SAME dW_i entering both
 * equations. The discrete chain above is the ground-truth model for every
 * oracle in this library; continuum statements are only ever checked as
 * grid-refinement trends.
 *
 * Draw-order contract (part of reproducibility): a path consumes its
 * stream as, per step, first d normals for dB then n normals for dW. A
 * nonlinear initial sampler consumes its draws before the first step.
 * Increments at different grid levels are independent draws; refinement
 * comparisons are in law, not pathwise.
 */

namespace corrfilt {

/// Simulates one coupled signal/observation pair (coupling_tag = joint).
/// \throws std::runtime_error if the state leaves the finite range
///         (message carries the step index).
PathPair simulate_joint(const LinearModel& model,
                        const std::shared_ptr<const TimeGrid>& grid,
                        const SeedSpec& seed);

/// Nonlinear variant; x0 is drawn from model.x0_sampler.
PathPair simulate_joint(const NonlinearModel& model,
                        const std::shared_ptr<const TimeGrid>& grid,
                        const SeedSpec& seed);

/// Simulates under the product of the marginals: two independent joint
/// pairs are drawn on sub-streams derive_substream(seed, 0) and
/// derive_substream(seed, 1), and (x of the first, y of the second) is
/// returned. Both marginal laws are exactly preserved; the coupling is
/// destroyed.
PathPair simulate_product(const LinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const SeedSpec& seed);

/// Nonlinear variant of simulate_product.
PathPair simulate_product(const NonlinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const SeedSpec& seed);

/// Draws a signal path from the discretized conditional reference measure
/// given the observation path y:
///   x_i = x0 + sigma0 * (sum_{j<i} dB_j) + sigma1 * y_i,
/// a Gaussian with mean x0 + sigma1 y_t and covariance
/// sigma0 sigma0^T min(s, t).
/// \throws std::invalid_argument on grid mismatch or y not starting at 0.
Path sample_reference(const LinearModel& model,
                      const std::shared_ptr<const TimeGrid>& grid,
                      const Path& y, const SeedSpec& seed);

}  // namespace corrfilt

#endif  // CORRFILT_SAMPLER_HPP
