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

#include "corrfilt/singularity.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "corrfilt/csv.hpp"
#include "corrfilt/parallel.hpp"
#include "corrfilt/sampler.hpp"

namespace corrfilt {

DiscreteCovPair discrete_cov_matrices(Eigen::Index N, double delta_t) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (N > 4096) throw std::invalid_argument("N > 4096 rejected (dense guard)");
  if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
  Eigen::MatrixXd walk(N, N);  // A_ij = delta_t * min(i, j), 1-indexed
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      walk(i, j) = delta_t * static_cast<double>(std::min(i, j) + 1);
  DiscreteCovPair pair;
  pair.cov_joint.resize(2 * N, 2 * N);
  pair.cov_joint.topLeftCorner(N, N) = 2.0 * walk;
  pair.cov_joint.topRightCorner(N, N) = walk;
  pair.cov_joint.bottomLeftCorner(N, N) = walk;
  pair.cov_joint.bottomRightCorner(N, N) = walk;
  pair.cov_prod = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  pair.cov_prod.topLeftCorner(N, N) = 2.0 * walk;
  pair.cov_prod.bottomRightCorner(N, N) = walk;
  return pair;
}

namespace {

double log_rn_with(const Eigen::LLT<Eigen::MatrixXd>& joint,
                   const Eigen::LLT<Eigen::MatrixXd>& prod, Eigen::Index N,
                   const Eigen::VectorXd& z) {
  const double quad_joint = z.dot(joint.solve(z));
  const double quad_prod = z.dot(prod.solve(z));
  return 0.5 * static_cast<double>(N) * std::log(2.0) -
         0.5 * (quad_joint - quad_prod);
}

}  // namespace

double discrete_log_rn(const Eigen::VectorXd& z, Eigen::Index N,
                       double delta_t) {
  if (z.size() != 2 * N)
    throw std::invalid_argument("z must have length 2N");
  const DiscreteCovPair cov = discrete_cov_matrices(N, delta_t);
  Eigen::LLT<Eigen::MatrixXd> joint(cov.cov_joint);
  Eigen::LLT<Eigen::MatrixXd> prod(cov.cov_prod);
  if (joint.info() != Eigen::Success || prod.info() != Eigen::Success)
    throw std::runtime_error("covariance factorization failed");
  return log_rn_with(joint, prod, N, z);
}

std::vector<RnExperimentRow> rn_degeneration_experiment(
    double T, const std::vector<Eigen::Index>& N_list, std::size_t M,
    Coupling measure, const SeedSpec& seed, int threads) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (M < 2) throw std::invalid_argument("sample count M must be >= 2");
  if (measure != Coupling::joint && measure != Coupling::product)
    throw std::invalid_argument("sampling measure must be joint or product");

  std::vector<RnExperimentRow> rows;
  rows.reserve(N_list.size());
  for (std::size_t r = 0; r < N_list.size(); ++r) {
    const Eigen::Index N = N_list[r];
    const double delta_t = T / static_cast<double>(N);
    const DiscreteCovPair cov = discrete_cov_matrices(N, delta_t);
    Eigen::LLT<Eigen::MatrixXd> joint(cov.cov_joint);
    Eigen::LLT<Eigen::MatrixXd> prod(cov.cov_prod);
    if (joint.info() != Eigen::Success || prod.info() != Eigen::Success)
      throw std::runtime_error("covariance factorization failed");
    const Eigen::MatrixXd factor =
        measure == Coupling::joint ? Eigen::MatrixXd(joint.matrixL())
                                   : Eigen::MatrixXd(prod.matrixL());
    const std::uint64_t base = seed.stream_id + r * kStreamBlock;

    Eigen::VectorXd values(static_cast<Eigen::Index>(M));
    parallel_for(M, threads, [&](std::size_t i) {
      NormalStream stream(SeedSpec{seed.master_seed, base + i});
      Eigen::VectorXd xi(2 * N);
      for (Eigen::Index k = 0; k < 2 * N; ++k) xi(k) = stream.next_normal();
      values(static_cast<Eigen::Index>(i)) =
          log_rn_with(joint, prod, N, factor * xi);
    });

    RnExperimentRow row;
    row.N = static_cast<int>(N);
    row.delta_t = delta_t;
    row.sampling_measure = measure;
    row.mean_log_rn = values.mean();
    row.sd_log_rn = std::sqrt((values.array() - row.mean_log_rn).square().sum() /
                              static_cast<double>(M - 1));
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::size_t grid_index_of(const Path& path, double t) {
  const auto& times = path.grid->times;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] == t) return i;
  throw std::invalid_argument("t is not a grid point");
}

template <typename Sigma1Fn>
CovariationStat covariation_impl(const PathPair& pair, double t,
                                 Sigma1Fn&& sigma1_at) {
  if (!pair.x.grid || !pair.y.grid ||
      pair.x.grid->level != pair.y.grid->level ||
      pair.x.grid->T != pair.y.grid->T)
    throw std::invalid_argument("pair grids mismatch");
  const std::size_t stop = grid_index_of(pair.x, t);
  const Eigen::Index d = pair.x.dim();
  const Eigen::Index n = pair.y.dim();

  CovariationStat stat;
  stat.level = pair.x.grid->level;
  stat.t = t;
  stat.value = Eigen::MatrixXd::Zero(d, n);
  stat.target_joint = Eigen::MatrixXd::Zero(d, n);
  const double dt = pair.x.grid->dt();
  for (std::size_t i = 0; i < stop; ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd dx =
        (pair.x.values.row(ei + 1) - pair.x.values.row(ei)).transpose();
    const Eigen::VectorXd dy =
        (pair.y.values.row(ei + 1) - pair.y.values.row(ei)).transpose();
    stat.value += dx * dy.transpose();
    // Trapezoidal quadrature of sigma1 along the stored signal path.
    stat.target_joint +=
        0.5 * dt *
        (sigma1_at(pair.x.grid->times[i], pair.x.values.row(ei)) +
         sigma1_at(pair.x.grid->times[i + 1], pair.x.values.row(ei + 1)));
  }
  return stat;
}

}  // namespace

CovariationStat quadratic_covariation(const PathPair& pair, double t,
                                      const LinearModel& model) {
  return covariation_impl(pair, t, [&](double, const auto&) -> Eigen::MatrixXd {
    return model.sigma1;
  });
}

CovariationStat quadratic_covariation(const PathPair& pair, double t,
                                      const NonlinearModel& model) {
  return covariation_impl(
      pair, t, [&](double s, const auto& x_row) -> Eigen::MatrixXd {
        return model.sigma1(s, x_row.transpose());
      });
}

std::vector<DecayRow> covariation_decay_study(
    const LinearModel& model, double t, const std::vector<int>& levels,
    std::size_t M, const SeedSpec& seed, int threads) {
  if (M < 2) throw std::invalid_argument("sample count M must be >= 2");
  std::vector<DecayRow> rows;
  rows.reserve(levels.size());
  for (std::size_t r = 0; r < levels.size(); ++r) {
    const auto grid = make_dyadic_grid(levels[r], model.T);
    const std::uint64_t base = seed.stream_id + r * kStreamBlock;
    std::vector<Eigen::MatrixXd> qs(M);
    parallel_for(M, threads, [&](std::size_t i) {
      const PathPair pair =
          simulate_product(model, grid, SeedSpec{seed.master_seed, base + i});
      qs[i] = quadratic_covariation(pair, t, model).value;
    });
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(qs[0].rows(), qs[0].cols());
    for (const auto& q : qs) mean += q;
    mean /= static_cast<double>(M);
    double mean_norm = 0.0;
    double total_var = 0.0;
    for (const auto& q : qs) {
      mean_norm += q.norm();
      total_var += (q - mean).squaredNorm();
    }
    DecayRow row;
    row.level = levels[r];
    row.mean_norm = mean_norm / static_cast<double>(M);
    row.var = total_var / static_cast<double>(M - 1);
    rows.push_back(row);
  }
  return rows;
}

Coupling classify_coupling(const PathPair& pair, const LinearModel& model,
                           double threshold_fraction) {
  if (!pair.x.grid || pair.x.grid->level < 8)
    throw std::invalid_argument("classifier requires grid level >= 8");
  if (!(threshold_fraction > 0.0) || !(threshold_fraction < 1.0))
    throw std::invalid_argument("threshold_fraction must lie in (0, 1)");
  const CovariationStat stat =
      quadratic_covariation(pair, pair.x.grid->T, model);
  if (stat.target_joint.norm() < 1e-8)
    throw std::invalid_argument("model violates separation");
  const double dist_joint = (stat.value - stat.target_joint).norm();
  const double dist_prod = stat.value.norm();
  return dist_joint < threshold_fraction * (dist_joint + dist_prod)
             ? Coupling::joint
             : Coupling::product;
}

Eigen::MatrixXd empirical_qv_blocks(const PathPair& pair,
                                    const LinearModel& model) {
  const Eigen::Index d = model.signal_dim();
  const Eigen::Index n = model.obs_dim();
  if (pair.x.dim() != d || pair.y.dim() != n)
    throw std::invalid_argument("pair dimension mismatch with model");
  const Eigen::Index steps = pair.x.values.rows() - 1;
  Eigen::MatrixXd qv = Eigen::MatrixXd::Zero(d + n, d + n);
  Eigen::VectorXd dz(d + n);
  for (Eigen::Index i = 0; i < steps; ++i) {
    dz.head(d) = (pair.x.values.row(i + 1) - pair.x.values.row(i)).transpose();
    dz.tail(n) = (pair.y.values.row(i + 1) - pair.y.values.row(i)).transpose();
    qv += dz * dz.transpose();
  }
  return qv / pair.x.grid->T;
}

void write_rn_rows_csv(const std::string& file,
                       const std::vector<RnExperimentRow>& rows,
                       const std::vector<std::string>& comments) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file);
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "N,delta_t,mean_log_rn,sd_log_rn,sampling_measure\n";
  for (const auto& row : rows) {
    out << row.N << "," << format_double(row.delta_t) << ","
        << format_double(row.mean_log_rn) << ","
        << format_double(row.sd_log_rn) << ","
        << (row.sampling_measure == Coupling::joint ? "joint" : "product")
        << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

}  // namespace corrfilt
