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

#include "corrfilt/free_energy.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "corrfilt/csv.hpp"
#include "corrfilt/gibbs.hpp"
#include "corrfilt/parallel.hpp"

namespace corrfilt {

GaussianLaw reference_law(const LinearModel& model,
                          const std::shared_ptr<const TimeGrid>& grid,
                          const Path& y) {
  if (!grid) throw std::invalid_argument("null grid");
  if (grid->level > 12)
    throw std::invalid_argument(
        "grid cap: dense reference law requires level <= 12");
  if (!y.grid || y.grid->level != grid->level || y.grid->T != grid->T)
    throw std::invalid_argument("observation path grid mismatch");
  if (y.dim() != model.obs_dim())
    throw std::invalid_argument("observation path dimension mismatch");

  const Eigen::Index d = model.signal_dim();
  const auto N = static_cast<Eigen::Index>(grid->steps());
  const Eigen::MatrixXd S = model.sigma0 * model.sigma0.transpose();

  GaussianLaw law;
  law.grid = grid;
  law.layout = LawLayout{d, 0, N};
  law.mean.resize(N * d);
  law.cov.resize(N * d, N * d);
  for (Eigen::Index i = 1; i <= N; ++i) {
    law.mean.segment((i - 1) * d, d) =
        model.x0 + model.sigma1 * y.values.row(i).transpose();
    for (Eigen::Index j = 1; j <= N; ++j) {
      const double t_min = grid->times[static_cast<std::size_t>(std::min(i, j))];
      law.cov.block((i - 1) * d, (j - 1) * d, d, d) = S * t_min;
    }
  }
  return law;
}

namespace {

/// Log-determinant via Cholesky; returns false when the matrix is not
/// numerically positive definite.
bool log_det_pd(const Eigen::MatrixXd& m, double* out) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
  *out = log_det;
  return true;
}

}  // namespace

double kl_gaussian(const GaussianLaw& p, const GaussianLaw& q) {
  if (p.mean.size() != q.mean.size())
    throw std::invalid_argument("kl_gaussian dimension mismatch");
  const auto m = static_cast<double>(p.mean.size());
  Eigen::LLT<Eigen::MatrixXd> llt_q(q.cov);
  if (llt_q.info() != Eigen::Success)
    throw std::runtime_error("kl_gaussian: q covariance singular");
  double log_det_q = 0.0;
  for (Eigen::Index i = 0; i < q.cov.rows(); ++i)
    log_det_q += 2.0 * std::log(llt_q.matrixLLT()(i, i));
  double log_det_p = 0.0;
  if (!log_det_pd(p.cov, &log_det_p))
    return std::numeric_limits<double>::infinity();  // p singular vs full q
  const double trace = llt_q.solve(p.cov).trace();
  const Eigen::VectorXd dev = q.mean - p.mean;
  const double quad = dev.dot(llt_q.solve(dev));
  return 0.5 * (trace + quad - m + log_det_q - log_det_p);
}

namespace {

/// Square root factor for sampling: Cholesky when positive definite,
/// otherwise an eigenvalue square root with the oracle-module clamp
/// policy (tiny negatives to zero, real negatives are errors).
Eigen::MatrixXd sampling_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("candidate covariance factorization failed");
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double floor = -1e-10 * std::max(lambda_max, 0.0);
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor)
      throw std::runtime_error("candidate covariance is indefinite");
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  return eig.eigenvectors() * lambda.asDiagonal();
}

}  // namespace

Estimate expected_energy(const CandidateMeasure& candidate,
                         const LinearModel& model, const Path& y,
                         std::size_t M, const SeedSpec& seed, int threads,
                         double kurtosis_guard) {
  if (M < 2) throw std::invalid_argument("ensemble size M must be >= 2");
  const GaussianLaw& law = candidate.law;
  if (law.layout.obs_dim != 0)
    throw std::invalid_argument("candidate must be a signal-block law");
  if (!law.grid || !y.grid || law.grid->level != y.grid->level ||
      law.grid->T != y.grid->T)
    throw std::invalid_argument("candidate/observation grid mismatch");
  const Eigen::Index d = law.layout.signal_dim;
  const Eigen::Index N = law.layout.steps;
  if (d != model.signal_dim())
    throw std::invalid_argument("candidate dimension mismatch with model");

  const Eigen::MatrixXd factor = sampling_factor(law.cov);
  Eigen::VectorXd energies(static_cast<Eigen::Index>(M));
  parallel_for(M, threads, [&](std::size_t i) {
    NormalStream stream(SeedSpec{seed.master_seed, seed.stream_id + i});
    Eigen::VectorXd xi(law.mean.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = stream.next_normal();
    const Eigen::VectorXd flat = law.mean + factor * xi;
    Path x;
    x.grid = law.grid;
    x.values.resize(N + 1, d);
    x.values.row(0) = model.x0.transpose();
    for (Eigen::Index t = 1; t <= N; ++t)
      x.values.row(t) = flat.segment((t - 1) * d, d).transpose();
    energies(static_cast<Eigen::Index>(i)) = energy(model, x, y).total();
  });

  if (excess_kurtosis(energies) > kurtosis_guard) {
    // Heavy-tailed energies: the integral is not certified to exist at
    // this sample size, so surface the +infinity convention.
    return {std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  return mc_mean(energies);
}

CandidateMeasure posterior_candidate(const LinearModel& model,
                                     const std::shared_ptr<const TimeGrid>& grid,
                                     const Path& y) {
  CandidateMeasure candidate;
  candidate.law =
      condition_on_observations(build_discrete_joint_law(model, grid), y);
  candidate.label = "posterior";
  return candidate;
}

FreeEnergyReport free_energy(const CandidateMeasure& candidate,
                             const LinearModel& model,
                             const std::shared_ptr<const TimeGrid>& grid,
                             const Path& y, std::size_t M,
                             const SeedSpec& seed, int threads) {
  const GaussianLaw ref = reference_law(model, grid, y);
  const CandidateMeasure posterior = posterior_candidate(model, grid, y);

  const Estimate ee =
      expected_energy(candidate, model, y, M, seed, threads);
  const SeedSpec posterior_seed{seed.master_seed, seed.stream_id + kStreamBlock};
  const Estimate ee_post =
      expected_energy(posterior, model, y, M, posterior_seed, threads);

  FreeEnergyReport report;
  report.label = candidate.label;
  report.kl_to_reference = kl_gaussian(candidate.law, ref);
  report.expected_energy = ee.value;
  report.total = report.kl_to_reference + report.expected_energy;
  const double total_post = kl_gaussian(posterior.law, ref) + ee_post.value;
  report.gibbs_gap = report.total - total_post;
  report.gap_predicted = kl_gaussian(candidate.law, posterior.law);
  report.mc_standard_error =
      std::sqrt(ee.standard_error * ee.standard_error +
                ee_post.standard_error * ee_post.standard_error);
  return report;
}

std::vector<CandidateMeasure> make_mean_shift_family(
    const LinearModel& model, const std::shared_ptr<const TimeGrid>& grid,
    const Path& y, const Eigen::VectorXd& direction,
    const std::vector<double>& s_values) {
  const CandidateMeasure posterior = posterior_candidate(model, grid, y);
  const FilterTrack kalman = kalman_correlated(model, grid, y);
  const Eigen::Index d = model.signal_dim();
  const auto N = static_cast<Eigen::Index>(grid->steps());
  if (direction.size() != d * N)
    throw std::invalid_argument("mean-shift direction has wrong length");
  Eigen::VectorXd kalman_mean(d * N);
  for (Eigen::Index i = 1; i <= N; ++i)
    kalman_mean.segment((i - 1) * d, d) = kalman.means.row(i).transpose();

  std::vector<CandidateMeasure> family;
  family.reserve(s_values.size());
  for (double s : s_values) {
    CandidateMeasure c;
    c.law = posterior.law;
    c.law.mean = kalman_mean + s * direction;
    std::ostringstream label;
    label << "shift_s=" << s;
    c.label = label.str();
    family.push_back(std::move(c));
  }
  return family;
}

FamilyMinimum minimize_over_family(const LinearModel& model,
                                   const std::shared_ptr<const TimeGrid>& grid,
                                   const Path& y,
                                   const std::vector<CandidateMeasure>& family,
                                   std::size_t M, const SeedSpec& seed,
                                   int threads) {
  if (family.empty())
    throw std::invalid_argument("minimize_over_family needs a nonempty family");
  FamilyMinimum result;
  result.reports.reserve(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    const SeedSpec candidate_seed{seed.master_seed,
                                  seed.stream_id + 2 * j * kStreamBlock};
    result.reports.push_back(
        free_energy(family[j], model, grid, y, M, candidate_seed, threads));
    if (result.reports[j].total < result.reports[result.best_index].total)
      result.best_index = j;
  }
  result.best = family[result.best_index];
  return result;
}

void write_reports_csv(const std::string& file,
                       const std::vector<FreeEnergyReport>& reports,
                       const std::vector<std::string>& comments) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file);
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "label,kl_to_reference,expected_energy,total,gibbs_gap,"
         "gap_predicted,mc_se\n";
  for (const auto& r : reports) {
    out << r.label << "," << format_double(r.kl_to_reference) << ","
        << format_double(r.expected_energy) << "," << format_double(r.total)
        << "," << format_double(r.gibbs_gap) << ","
        << format_double(r.gap_predicted) << ","
        << format_double(r.mc_standard_error) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

}  // namespace corrfilt
