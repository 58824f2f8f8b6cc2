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

#ifndef CORRFILT_TESTS_SUPPORT_KB_EULER_UNCORRELATED_HPP
#define CORRFILT_TESTS_SUPPORT_KB_EULER_UNCORRELATED_HPP

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>

#include "corrfilt/model.hpp"
#include "corrfilt/oracle.hpp"

/**
 * \file
 * \brief Textbook Kalman-Bucy filter for independent noises, transcribed
 *        directly from the continuous-time equations
 *
 *   dm = A m dt + P C^T (dy - C m dt)
 *   dP = (A P + P A^T + sigma0 sigma0^T - P C^T C P) dt
 *
 * and Euler-discretized on the grid. Only valid for sigma1 = 0; used to
 * cross-check the library's correlated recursion in that regime, where
 * the two transcriptions must agree to machine precision.
 */

namespace corrfilt::testsupport {

inline FilterTrack kb_euler_uncorrelated(const LinearModel& model,
                                         const std::shared_ptr<const TimeGrid>& grid,
                                         const Path& y) {
  if (!model.sigma1.isZero(0.0))
    throw std::invalid_argument("kb_euler_uncorrelated requires sigma1 = 0");
  if (!y.grid || y.grid->level != grid->level || y.grid->T != grid->T)
    throw std::invalid_argument("grid mismatch");
  const Eigen::Index d = model.signal_dim();
  const double dt = grid->dt();
  const Eigen::MatrixXd noise = model.sigma0 * model.sigma0.transpose();

  FilterTrack track;
  track.times = grid->times;
  const auto rows = static_cast<Eigen::Index>(grid->size());
  track.means.resize(rows, d);
  track.covs.resize(static_cast<std::size_t>(rows));

  Eigen::VectorXd m = model.x0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d, d);
  track.means.row(0) = m.transpose();
  track.covs[0] = P;

  for (std::size_t i = 0; i < grid->steps(); ++i) {
    const Eigen::VectorXd dy =
        (y.values.row(i + 1) - y.values.row(i)).transpose();
    const Eigen::MatrixXd gain = P * model.C.transpose();
    const Eigen::VectorXd m_next =
        m + dt * model.A * m + gain * (dy - dt * model.C * m);
    const Eigen::MatrixXd p_next =
        P + dt * (model.A * P + P * model.A.transpose() + noise -
                  gain * gain.transpose());
    m = m_next;
    P = p_next;
    const auto r = static_cast<Eigen::Index>(i) + 1;
    track.means.row(r) = m.transpose();
    track.covs[static_cast<std::size_t>(r)] = 0.5 * (P + P.transpose());
  }
  return track;
}

}  // namespace corrfilt::testsupport

#endif  // CORRFILT_TESTS_SUPPORT_KB_EULER_UNCORRELATED_HPP
