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

#ifndef CORRFILT_MODEL_HPP
#define CORRFILT_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corrfilt/rng.hpp"

/**
 * \file
 * \brief Model specifications, dyadic time grids, and validation.
 *
 * Two signal/observation systems are supported:
 *   - LinearModel: dx = Ax dt + sigma0 dB + sigma1 dW, dy = Cx dt + dW,
 *     deterministic x0. All quantitative machinery (oracles, filters,
 *     free-energy reports) targets this class.
 *   - NonlinearModel: user-supplied drift/observation/loading callables
 *     with a declared linear-growth bound; simulation only.
 *
 * All types are immutable after construction and safe to share across
 * threads.
 */

namespace corrfilt {

/// Uniform dyadic partition of [0, T] with 2^level + 1 points.
///
/// Grids are always dyadic: refining by one level inserts exactly the
/// midpoints, and coarse times are a bit-exact subset of fine times
/// whenever T is a binary-representable real.
struct TimeGrid {
  int level = 0;
  double T = 1.0;
  std::vector<double> times;

  /// Number of steps N = 2^level.
  std::size_t steps() const { return times.size() - 1; }
  /// Number of grid points N + 1.
  std::size_t size() const { return times.size(); }
  /// Uniform spacing T / 2^level.
  double dt() const { return std::ldexp(T, -level); }
};

/// Builds the dyadic grid {i * T / 2^level : i = 0..2^level}.
///
/// \throws std::invalid_argument if level is negative, level > 24
///         (memory guard), or T <= 0.
std::shared_ptr<const TimeGrid> make_dyadic_grid(int level, double T);

/// A sampled trajectory on a grid: values.row(i) is the state at times[i].
struct Path {
  std::shared_ptr<const TimeGrid> grid;
  Eigen::MatrixXd values;  // (2^level + 1) x dim

  Eigen::Index dim() const { return values.cols(); }
};

/// How a signal/observation pair was coupled at sampling time.
enum class Coupling { joint, product, reference };

/// A signal path x and an observation path y on a shared grid.
///
/// Invariant: y starts at zero (observations are increments-from-zero by
/// convention).
struct PathPair {
  Path x;
  Path y;
  Coupling coupling_tag = Coupling::joint;
};

/// Constant-coefficient linear signal/observation system on [0, T]:
///
///   x_{i+1} = x_i + A x_i dt + sigma0 dB_i + sigma1 dW_i
///   y_{i+1} = y_i + C x_i dt + dW_i
///
/// with dB, dW independent N(0, dt I) increments shared between the two
/// equations, and deterministic initial state x0.
struct LinearModel {
  Eigen::MatrixXd A;       // d x d drift
  Eigen::MatrixXd C;       // n x d observation map
  Eigen::MatrixXd sigma0;  // d x d private-noise loading, invertible
  Eigen::MatrixXd sigma1;  // d x n shared-noise loading
  Eigen::VectorXd x0;      // length d
  double T = 1.0;

  Eigen::Index signal_dim() const { return A.rows(); }
  Eigen::Index obs_dim() const { return C.rows(); }
};

/// Nonlinear system with user-supplied coefficient callables.
///
/// The declared growth_bound asserts
///   |b(t,x)| + |h(x)| + |sigma0(t,x)| + |sigma1(t,x)| <=
///       growth_bound * (1 + |x|)
/// which validate_nonlinear spot-checks on random inputs; it is an
/// assumption, not a proof.
struct NonlinearModel {
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> b;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> sigma0;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> sigma1;
  std::function<Eigen::VectorXd(NormalStream&)> x0_sampler;
  double T = 1.0;
  double growth_bound = 1.0;
  Eigen::Index d = 1;  // signal dimension
  Eigen::Index n = 1;  // observation dimension
};

/// Outcome of model validation. Failures are human-readable and stable;
/// callers match on substrings such as "sigma0 singular".
struct ValidationReport {
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

/// Checks dimensional consistency, finiteness, T > 0, and sigma0
/// conditioning (smallest singular value > 1e-10 x largest).
ValidationReport validate_linear(const LinearModel& model);

/// Spot-checks finiteness and the declared linear-growth bound on a fixed
/// internal batch of random inputs. Pure: same model spec, same report.
ValidationReport validate_nonlinear(const NonlinearModel& model);

/// Scalar bounded-coefficient preset: b(x) = a tanh(x), h(x) = c tanh(x),
/// constant noise loadings, deterministic start. Satisfies the growth
/// bound with constant |a| + |c| + |s0| + |s1|.
NonlinearModel make_tanh_model(double a, double c, double s0, double s1,
                               double x0, double T);

/// FNV-1a hash of the model's dimensions and coefficient bytes. Stable
/// across runs on IEEE-754 platforms; used to stamp golden posterior
/// files so stale fixtures are detectable.
std::uint64_t model_hash(const LinearModel& model);

}  // namespace corrfilt

#endif  // CORRFILT_MODEL_HPP
