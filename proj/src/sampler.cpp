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

#include "corrfilt/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace corrfilt {

namespace {

void check_grid(const std::shared_ptr<const TimeGrid>& grid) {
  if (!grid || grid->times.size() < 2)
    throw std::invalid_argument("simulation requires a non-empty grid");
}

[[noreturn]] void throw_nonfinite(std::size_t step) {
  throw std::runtime_error("non-finite state at step " + std::to_string(step));
}

void draw_scaled_normals(NormalStream& stream, double scale,
                         Eigen::VectorXd& out) {
  for (Eigen::Index k = 0; k < out.size(); ++k)
    out(k) = scale * stream.next_normal();
}

}  // namespace

PathPair simulate_joint(const LinearModel& model,
                        const std::shared_ptr<const TimeGrid>& grid,
                        const SeedSpec& seed) {
  check_grid(grid);
  const Eigen::Index d = model.signal_dim();
  const Eigen::Index n = model.obs_dim();
  const std::size_t steps = grid->steps();
  const double dt = grid->dt();
  const double root_dt = std::sqrt(dt);

  PathPair pair;
  pair.coupling_tag = Coupling::joint;
  pair.x.grid = grid;
  pair.y.grid = grid;
  pair.x.values.resize(static_cast<Eigen::Index>(steps) + 1, d);
  pair.y.values.resize(static_cast<Eigen::Index>(steps) + 1, n);
  pair.x.values.row(0) = model.x0.transpose();
  pair.y.values.row(0).setZero();

  NormalStream stream(seed);
  Eigen::VectorXd x = model.x0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd db(d), dw(n);
  for (std::size_t i = 0; i < steps; ++i) {
    draw_scaled_normals(stream, root_dt, db);
    draw_scaled_normals(stream, root_dt, dw);
    y += model.C * x * dt + dw;  // left endpoint: h(x_i) before x moves
    x += model.A * x * dt + model.sigma0 * db + model.sigma1 * dw;
    if (!x.allFinite() || !y.allFinite()) throw_nonfinite(i);
    pair.x.values.row(static_cast<Eigen::Index>(i) + 1) = x.transpose();
    pair.y.values.row(static_cast<Eigen::Index>(i) + 1) = y.transpose();
  }
  return pair;
}

PathPair simulate_joint(const NonlinearModel& model,
                        const std::shared_ptr<const TimeGrid>& grid,
                        const SeedSpec& seed) {
  check_grid(grid);
  const Eigen::Index d = model.d;
  const Eigen::Index n = model.n;
  const std::size_t steps = grid->steps();
  const double dt = grid->dt();
  const double root_dt = std::sqrt(dt);

  PathPair pair;
  pair.coupling_tag = Coupling::joint;
  pair.x.grid = grid;
  pair.y.grid = grid;
  pair.x.values.resize(static_cast<Eigen::Index>(steps) + 1, d);
  pair.y.values.resize(static_cast<Eigen::Index>(steps) + 1, n);

  NormalStream stream(seed);
  Eigen::VectorXd x = model.x0_sampler(stream);
  if (x.size() != d) throw std::invalid_argument("x0_sampler dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  pair.x.values.row(0) = x.transpose();
  pair.y.values.row(0).setZero();

  Eigen::VectorXd db(d), dw(n);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = grid->times[i];
    draw_scaled_normals(stream, root_dt, db);
    draw_scaled_normals(stream, root_dt, dw);
    const Eigen::VectorXd drift = model.b(t, x);
    const Eigen::VectorXd obs = model.h(x);
    y += obs * dt + dw;
    x += drift * dt + model.sigma0(t, x) * db + model.sigma1(t, x) * dw;
    if (!x.allFinite() || !y.allFinite()) throw_nonfinite(i);
    pair.x.values.row(static_cast<Eigen::Index>(i) + 1) = x.transpose();
    pair.y.values.row(static_cast<Eigen::Index>(i) + 1) = y.transpose();
  }
  return pair;
}

namespace {

template <typename Model>
PathPair product_impl(const Model& model,
                      const std::shared_ptr<const TimeGrid>& grid,
                      const SeedSpec& seed) {
  // Two full joint simulations keep both marginals exact; dropping the
  // cross pairing is what destroys the coupling.
  PathPair first = simulate_joint(model, grid, derive_substream(seed, 0));
  PathPair second = simulate_joint(model, grid, derive_substream(seed, 1));
  PathPair pair;
  pair.x = std::move(first.x);
  pair.y = std::move(second.y);
  pair.coupling_tag = Coupling::product;
  return pair;
}

}  // namespace

PathPair simulate_product(const LinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const SeedSpec& seed) {
  return product_impl(model, grid, seed);
}

PathPair simulate_product(const NonlinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const SeedSpec& seed) {
  return product_impl(model, grid, seed);
}

Path sample_reference(const LinearModel& model,
                      const std::shared_ptr<const TimeGrid>& grid,
                      const Path& y, const SeedSpec& seed) {
  check_grid(grid);
  if (!y.grid || y.grid->level != grid->level || y.grid->T != grid->T)
    throw std::invalid_argument("observation path grid mismatch");
  if (y.values.rows() != static_cast<Eigen::Index>(grid->size()))
    throw std::invalid_argument("observation path row count mismatch");
  if (y.values.row(0).norm() != 0.0)
    throw std::invalid_argument("observation path must start at zero");
  if (y.dim() != model.obs_dim())
    throw std::invalid_argument("observation path dimension mismatch");

  const Eigen::Index d = model.signal_dim();
  const std::size_t steps = grid->steps();
  const double root_dt = std::sqrt(grid->dt());

  Path x;
  x.grid = grid;
  x.values.resize(static_cast<Eigen::Index>(steps) + 1, d);
  x.values.row(0) = (model.x0 + model.sigma1 * y.values.row(0).transpose()).transpose();

  NormalStream stream(seed);
  Eigen::VectorXd brownian = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd db(d);
  for (std::size_t i = 0; i < steps; ++i) {
    draw_scaled_normals(stream, root_dt, db);
    brownian += db;
    x.values.row(static_cast<Eigen::Index>(i) + 1) =
        (model.x0 + model.sigma0 * brownian +
         model.sigma1 * y.values.row(static_cast<Eigen::Index>(i) + 1).transpose())
            .transpose();
  }
  return x;
}

}  // namespace corrfilt
