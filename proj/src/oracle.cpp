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

#include "corrfilt/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace corrfilt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_path_against_grid(const Path& y,
                             const std::shared_ptr<const TimeGrid>& grid,
                             Eigen::Index expected_dim) {
  if (!y.grid || y.grid->level != grid->level || y.grid->T != grid->T)
    throw std::invalid_argument("observation path grid mismatch");
  if (y.values.rows() != static_cast<Eigen::Index>(grid->size()))
    throw std::invalid_argument("observation path row count mismatch");
  if (y.dim() != expected_dim)
    throw std::invalid_argument("observation path dimension mismatch");
}

}  // namespace

Eigen::VectorXd flatten_path(const Path& path) {
  const Eigen::Index steps = path.values.rows() - 1;
  const Eigen::Index dim = path.dim();
  Eigen::VectorXd flat(steps * dim);
  for (Eigen::Index i = 1; i <= steps; ++i)
    flat.segment((i - 1) * dim, dim) = path.values.row(i).transpose();
  return flat;
}

GaussianLaw build_discrete_joint_law(const LinearModel& model,
                                     const std::shared_ptr<const TimeGrid>& grid) {
  if (!grid) throw std::invalid_argument("null grid");
  if (grid->level > 12)
    throw std::invalid_argument(
        "grid cap: dense joint law requires level <= 12");
  const Eigen::Index d = model.signal_dim();
  const Eigen::Index n = model.obs_dim();
  const Eigen::Index p = d + n;
  const auto N = static_cast<Eigen::Index>(grid->steps());
  const double dt = grid->dt();

  // One Euler step of the stacked state z = (x; y): z_{i+1} = F z_i + noise
  // with per-step noise covariance Q = dt * G G^T.
  Eigen::MatrixXd F = Eigen::MatrixXd::Identity(p, p);
  F.topLeftCorner(d, d) += dt * model.A;
  F.bottomLeftCorner(n, d) = dt * model.C;
  Eigen::MatrixXd Q(p, p);
  Q.topLeftCorner(d, d) =
      model.sigma0 * model.sigma0.transpose() + model.sigma1 * model.sigma1.transpose();
  Q.topRightCorner(d, n) = model.sigma1;
  Q.bottomLeftCorner(n, d) = model.sigma1.transpose();
  Q.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  Q *= dt;

  // Chronological block propagation: Cov(z_{i+1}, z_j) = F Cov(z_i, z_j)
  // for j <= i, and the diagonal picks up the fresh noise.
  std::vector<Eigen::VectorXd> mean_z(static_cast<std::size_t>(N) + 1);
  mean_z[0] = Eigen::VectorXd::Zero(p);
  mean_z[0].head(d) = model.x0;
  std::vector<std::vector<Eigen::MatrixXd>> cov_z(static_cast<std::size_t>(N) + 1);
  cov_z[0] = {Eigen::MatrixXd::Zero(p, p)};
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    mean_z[ui + 1] = F * mean_z[ui];
    cov_z[ui + 1].resize(ui + 2);
    for (Eigen::Index j = 1; j <= i; ++j)
      cov_z[ui + 1][static_cast<std::size_t>(j)] =
          F * cov_z[ui][static_cast<std::size_t>(j)];
    cov_z[ui + 1][0] = Eigen::MatrixXd::Zero(p, p);
    cov_z[ui + 1][ui + 1] = F * cov_z[ui][ui] * F.transpose() + Q;
  }

  // Permute from chronological z-blocks into the flat layout (all signal
  // coordinates first, then all observation coordinates).
  GaussianLaw law;
  law.grid = grid;
  law.layout = LawLayout{d, n, N};
  const Eigen::Index m = law.layout.size();
  law.mean.resize(m);
  law.cov.resize(m, m);
  std::vector<Eigen::Index> flat(static_cast<std::size_t>(N) * p);
  for (Eigen::Index i = 1; i <= N; ++i)
    for (Eigen::Index k = 0; k < p; ++k)
      flat[static_cast<std::size_t>((i - 1) * p + k)] =
          k < d ? law.layout.signal_index(i, k)
                : law.layout.obs_index(i, k - d);
  for (Eigen::Index i = 1; i <= N; ++i)
    for (Eigen::Index k = 0; k < p; ++k)
      law.mean(flat[static_cast<std::size_t>((i - 1) * p + k)]) =
          mean_z[static_cast<std::size_t>(i)](k);
  for (Eigen::Index i = 1; i <= N; ++i)
    for (Eigen::Index j = 1; j <= i; ++j) {
      const Eigen::MatrixXd& block = cov_z[static_cast<std::size_t>(i)]
                                          [static_cast<std::size_t>(j)];
      for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = 0; b < p; ++b) {
          const Eigen::Index r = flat[static_cast<std::size_t>((i - 1) * p + a)];
          const Eigen::Index c = flat[static_cast<std::size_t>((j - 1) * p + b)];
          law.cov(r, c) = block(a, b);  // block = Cov(z_i, z_j)
          law.cov(c, r) = block(a, b);
        }
    }
  return law;
}

GaussianLaw signal_marginal(const GaussianLaw& law) {
  const Eigen::Index s = law.layout.signal_size();
  GaussianLaw out;
  out.grid = law.grid;
  out.layout = LawLayout{law.layout.signal_dim, 0, law.layout.steps};
  out.mean = law.mean.head(s);
  out.cov = law.cov.topLeftCorner(s, s);
  return out;
}

GaussianLaw observation_marginal(const GaussianLaw& law) {
  const Eigen::Index s = law.layout.signal_size();
  const Eigen::Index o = law.layout.obs_size();
  if (o == 0) throw std::invalid_argument("law has no observation block");
  GaussianLaw out;
  out.grid = law.grid;
  out.layout = LawLayout{law.layout.obs_dim, 0, law.layout.steps};
  out.mean = law.mean.segment(s, o);
  out.cov = law.cov.block(s, s, o, o);
  return out;
}

GaussianLaw condition_on_observations(const GaussianLaw& law, const Path& y) {
  if (law.layout.obs_dim == 0)
    throw std::invalid_argument("law has no observation block to condition on");
  check_path_against_grid(y, law.grid, law.layout.obs_dim);
  const Eigen::Index s = law.layout.signal_size();
  const Eigen::Index o = law.layout.obs_size();
  const Eigen::VectorXd y_flat = flatten_path(y);

  const auto cov_ss = law.cov.topLeftCorner(s, s);
  const auto cov_so = law.cov.topRightCorner(s, o);
  const auto cov_oo = law.cov.bottomRightCorner(o, o);

  Eigen::LLT<Eigen::MatrixXd> llt(cov_oo);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("degenerate observation law");

  GaussianLaw post;
  post.grid = law.grid;
  post.layout = LawLayout{law.layout.signal_dim, 0, law.layout.steps};
  post.mean = law.mean.head(s) +
              cov_so * llt.solve(y_flat - law.mean.segment(s, o));
  Eigen::MatrixXd cov = cov_ss - cov_so * llt.solve(cov_so.transpose());
  cov = 0.5 * (cov + cov.transpose());

  // Roundoff from the Schur complement can push eigenvalues slightly
  // negative; clamp within the floor, fail hard beyond it.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed in conditioning");
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double floor = -1e-10 * std::max(lambda_max, 0.0);
  Eigen::VectorXd lambda = eig.eigenvalues();
  bool repaired = false;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor) {
      std::ostringstream msg;
      msg << "conditioning produced an indefinite covariance: eigenvalue "
          << lambda(i) << " below floor " << floor;
      throw std::runtime_error(msg.str());
    }
    if (lambda(i) < 0.0) {
      lambda(i) = 0.0;
      repaired = true;
    }
  }
  if (repaired) {
    cov = eig.eigenvectors() * lambda.asDiagonal() *
          eig.eigenvectors().transpose();
    cov = 0.5 * (cov + cov.transpose());
  }
  post.cov = std::move(cov);
  return post;
}

double log_density(const GaussianLaw& law, const Eigen::VectorXd& z) {
  if (z.size() != law.mean.size())
    throw std::invalid_argument("log_density dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(law.cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("singular covariance in log_density");
  const Eigen::VectorXd dev = z - law.mean;
  const double quad = dev.dot(llt.solve(dev));
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < law.cov.rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
  return -0.5 * (quad + log_det +
                 static_cast<double>(z.size()) * std::log(kTwoPi));
}

FilterTrack kalman_correlated(const LinearModel& model,
                              const std::shared_ptr<const TimeGrid>& grid,
                              const Path& y) {
  if (!grid) throw std::invalid_argument("null grid");
  check_path_against_grid(y, grid, model.obs_dim());
  const Eigen::Index d = model.signal_dim();
  const auto N = static_cast<Eigen::Index>(grid->steps());
  const double dt = grid->dt();
  const Eigen::MatrixXd noise_cov =
      model.sigma0 * model.sigma0.transpose() +
      model.sigma1 * model.sigma1.transpose();

  FilterTrack track;
  track.times = grid->times;
  track.means.resize(N + 1, d);
  track.covs.resize(static_cast<std::size_t>(N) + 1);
  Eigen::VectorXd m = model.x0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d, d);
  track.means.row(0) = m.transpose();
  track.covs[0] = P;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::VectorXd dy =
        (y.values.row(i + 1) - y.values.row(i)).transpose();
    const Eigen::MatrixXd K = P * model.C.transpose() + model.sigma1;
    m += model.A * m * dt + K * (dy - model.C * m * dt);
    P += dt * (model.A * P + P * model.A.transpose() + noise_cov -
               K * K.transpose());
    P = 0.5 * (P + P.transpose());
    track.means.row(i + 1) = m.transpose();
    track.covs[static_cast<std::size_t>(i) + 1] = P;
  }
  return track;
}

FilterTrack track_from_signal_law(const GaussianLaw& law,
                                  const Eigen::VectorXd& x0) {
  if (law.layout.obs_dim != 0)
    throw std::invalid_argument("track_from_signal_law needs a marginal law");
  const Eigen::Index d = law.layout.signal_dim;
  const Eigen::Index N = law.layout.steps;
  FilterTrack track;
  track.times = law.grid->times;
  track.means.resize(N + 1, d);
  track.covs.resize(static_cast<std::size_t>(N) + 1);
  track.means.row(0) = x0.transpose();
  track.covs[0] = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 1; i <= N; ++i) {
    const Eigen::Index base = law.layout.signal_index(i, 0);
    track.means.row(i) = law.mean.segment(base, d).transpose();
    track.covs[static_cast<std::size_t>(i)] = law.cov.block(base, base, d, d);
  }
  return track;
}

CsvTable filter_track_to_table(const FilterTrack& track,
                               const std::vector<std::string>& comments) {
  const Eigen::Index d = track.means.cols();
  CsvTable table;
  table.comments = comments;
  table.columns.push_back("t");
  for (Eigen::Index k = 0; k < d; ++k)
    table.columns.push_back("mean_" + std::to_string(k + 1));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      table.columns.push_back("cov_" + std::to_string(a + 1) +
                              std::to_string(b + 1));
  const auto rows = static_cast<Eigen::Index>(track.times.size());
  table.rows.resize(rows, 1 + d + d * d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    table.rows(i, 0) = track.times[static_cast<std::size_t>(i)];
    table.rows.block(i, 1, 1, d) = track.means.row(i);
    const Eigen::MatrixXd& cov = track.covs[static_cast<std::size_t>(i)];
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        table.rows(i, 1 + d + a * d + b) = cov(a, b);
  }
  return table;
}

FilterTrack filter_track_from_table(const CsvTable& table) {
  const Eigen::Index cols = table.rows.cols();
  // Columns: 1 (time) + d (means) + d^2 (covariance entries).
  Eigen::Index d = 1;
  while (1 + d + d * d < cols) ++d;
  if (1 + d + d * d != cols)
    throw std::invalid_argument("filter track csv has unexpected column count");
  FilterTrack track;
  const Eigen::Index rows = table.rows.rows();
  track.times.resize(static_cast<std::size_t>(rows));
  track.means.resize(rows, d);
  track.covs.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    track.times[static_cast<std::size_t>(i)] = table.rows(i, 0);
    track.means.row(i) = table.rows.block(i, 1, 1, d);
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        cov(a, b) = table.rows(i, 1 + d + a * d + b);
    track.covs[static_cast<std::size_t>(i)] = cov;
  }
  return track;
}

}  // namespace corrfilt
