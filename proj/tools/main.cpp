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

/**
 * @file main.cpp
 * @brief Batch experiment harness for the corrfilt library.
 *
 * Subcommands: simulate, filter, free-energy, singularity, validate.
 * Every run is fully determined by (config bytes, master seed); thread
 * count changes speed only, never output bytes. Exit codes are a stable
 * contract: 0 success, 2 config or validation error, 3 numerical failure.
 */

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "corrfilt/config.hpp"
#include "corrfilt/csv.hpp"
#include "corrfilt/free_energy.hpp"
#include "corrfilt/gibbs.hpp"
#include "corrfilt/model.hpp"
#include "corrfilt/oracle.hpp"
#include "corrfilt/rng.hpp"
#include "corrfilt/sampler.hpp"
#include "corrfilt/singularity.hpp"
#include "corrfilt/stats.hpp"
#include "corrfilt/version.hpp"

namespace fs = std::filesystem;

namespace {

using namespace corrfilt;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

struct Workspace {
  ParsedConfig config;
  std::shared_ptr<const TimeGrid> grid;
  ModelSpec model;
  RunSpec run;
  fs::path out_dir;
  std::vector<std::string> header;
  std::vector<std::string> manifest;
};

std::string hash_hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setfill('0') << std::setw(16) << h;
  return s.str();
}

/// Parses the config, applies CLI overrides, validates the model, and
/// prepares the output directory plus the per-file comment header.
Workspace open_workspace(const CommonArgs& args,
                         const std::set<std::string>& allowed_sections) {
  Workspace ws;
  ws.config = parse_config_file(args.config_path);
  check_sections(ws.config, allowed_sections);
  ws.grid = load_grid(ws.config);
  ws.model = load_model(ws.config, ws.grid->T);
  ws.run = load_run(ws.config);
  if (args.seed) ws.run.master_seed = *args.seed;
  if (args.out) ws.run.out_dir = *args.out;
  if (args.threads) ws.run.threads = *args.threads;
  if (ws.run.threads < 1)
    throw std::invalid_argument("threads must be >= 1");

  const ValidationReport report = ws.model.is_linear
                                      ? validate_linear(ws.model.linear)
                                      : validate_nonlinear(ws.model.nonlinear);
  if (!report.ok()) throw std::invalid_argument(report.summary());

  ws.out_dir = fs::path(ws.run.out_dir);
  fs::create_directories(ws.out_dir);
  std::ostringstream head;
  head << "corrfilt " << kVersion << " config_hash=" << hash_hex(ws.config.hash)
       << " master_seed=" << ws.run.master_seed;
  ws.header = {head.str()};
  return ws;
}

std::string note(Workspace& ws, const std::string& name) {
  const std::string path = (ws.out_dir / name).string();
  ws.manifest.push_back(path);
  return path;
}

void print_manifest(const Workspace& ws) {
  for (const auto& file : ws.manifest) std::cout << file << "\n";
}

/// Observation path used by filter / free-energy: read from a CSV when
/// configured, otherwise simulated on stream 0 of the master seed.
Path load_observation(Workspace& ws, const std::string& obs_file) {
  const LinearModel& model = ws.model.linear;
  if (obs_file.empty()) {
    PathPair pair =
        simulate_joint(model, ws.grid, SeedSpec{ws.run.master_seed, 0});
    return pair.y;
  }
  Path y = read_path_csv(obs_file);
  if (y.grid->level != ws.grid->level || y.grid->T != ws.grid->T)
    throw std::invalid_argument("observation file grid mismatch with config");
  if (y.dim() != model.obs_dim())
    throw std::invalid_argument("observation path dimension mismatch");
  return y;
}

void require_linear(const Workspace& ws, const std::string& what) {
  if (!ws.model.is_linear)
    throw std::invalid_argument(what + " requires a linear model");
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const CommonArgs& args) {
  Workspace ws =
      open_workspace(args, {"grid", "model", "run", "simulate"});
  SectionReader sim(ws.config, "simulate");
  const std::string kind = sim.get_string("kind", "joint");
  const std::int64_t count = sim.get_int("count", 1);
  sim.finish();
  if (count < 1) throw std::invalid_argument("simulate count must be >= 1");
  if (kind != "joint" && kind != "product" && kind != "reference")
    throw std::invalid_argument(
        "simulate kind must be joint, product, or reference");

  for (std::int64_t k = 0; k < count; ++k) {
    const std::string tag = kind + "_";
    const std::string suffix = "_" + std::to_string(k) + ".csv";
    if (kind == "reference") {
      // The reference draw conditions on a freshly simulated observation:
      // y on one stream, the conditioned signal on the next.
      require_linear(ws, "reference sampling");
      const std::uint64_t base =
          2 * kStreamBlock + 2 * static_cast<std::uint64_t>(k);
      PathPair pair = simulate_joint(ws.model.linear, ws.grid,
                                     SeedSpec{ws.run.master_seed, base});
      Path x = sample_reference(ws.model.linear, ws.grid, pair.y,
                                SeedSpec{ws.run.master_seed, base + 1});
      write_path_csv(note(ws, tag + "y" + suffix), pair.y, "y", ws.header);
      write_path_csv(note(ws, tag + "x" + suffix), x, "x", ws.header);
      continue;
    }
    const std::uint64_t block = kind == "joint" ? 0 : 1;
    const SeedSpec seed{ws.run.master_seed,
                        block * kStreamBlock + static_cast<std::uint64_t>(k)};
    PathPair pair;
    if (ws.model.is_linear)
      pair = kind == "joint" ? simulate_joint(ws.model.linear, ws.grid, seed)
                             : simulate_product(ws.model.linear, ws.grid, seed);
    else
      pair = kind == "joint"
                 ? simulate_joint(ws.model.nonlinear, ws.grid, seed)
                 : simulate_product(ws.model.nonlinear, ws.grid, seed);
    write_path_csv(note(ws, tag + "x" + suffix), pair.x, "x", ws.header);
    write_path_csv(note(ws, tag + "y" + suffix), pair.y, "y", ws.header);
  }
  print_manifest(ws);
  return 0;
}

// ---------------------------------------------------------------------------
// filter

/// |estimate - oracle| in units of the estimate's standard error.
/// Deterministic slots (the t = 0 row) carry only round-off in both the
/// difference and the SE; agreement at that scale counts as exact.
double deviation_in_se(double estimate, double oracle, double se) {
  const double diff = std::abs(estimate - oracle);
  if (diff <= 1e-10 * (1.0 + std::abs(oracle))) return 0.0;
  if (se > 0.0) return diff / se;
  return std::numeric_limits<double>::infinity();
}

int cmd_filter(const CommonArgs& args) {
  Workspace ws = open_workspace(args, {"grid", "model", "run", "filter"});
  SectionReader fsec(ws.config, "filter");
  const std::string obs_file = fsec.get_string("observation", "");
  fsec.finish();
  require_linear(ws, "filter");
  const LinearModel& model = ws.model.linear;

  Path y = load_observation(ws, obs_file);
  write_path_csv(note(ws, "observation.csv"), y, "y", ws.header);

  // Dense Schur oracle; rejects level > 12 with the grid-cap message.
  GaussianLaw joint_law = build_discrete_joint_law(model, ws.grid);
  GaussianLaw posterior_law = condition_on_observations(joint_law, y);
  FilterTrack oracle = track_from_signal_law(posterior_law, model.x0);
  write_numeric_csv(note(ws, "oracle_posterior.csv"),
                    filter_track_to_table(oracle, ws.header));

  FilterTrack kalman = kalman_correlated(model, ws.grid, y);
  write_numeric_csv(note(ws, "kalman_posterior.csv"),
                    filter_track_to_table(kalman, ws.header));

  const SeedSpec ens_seed{ws.run.master_seed, kStreamBlock};
  ImportancePosterior gibbs = importance_posterior(
      model, ws.grid, y, ws.run.M, ens_seed, ws.run.threads);
  write_numeric_csv(note(ws, "gibbs_posterior.csv"),
                    filter_track_to_table(gibbs.moments, ws.header));
  const Estimate log_z = estimate_log_normalizer(model, ws.grid, y, ws.run.M,
                                                 ens_seed, ws.run.threads);

  const Eigen::Index d = model.signal_dim();
  const auto M = static_cast<Eigen::Index>(ws.run.M);
  const auto last = static_cast<Eigen::Index>(ws.grid->steps());

  CsvTable ens;
  ens.comments = ws.header;
  ens.columns = {"stream_id", "log_weight"};
  for (Eigen::Index k = 0; k < d; ++k)
    ens.columns.push_back("x_T_" + std::to_string(k + 1));
  ens.rows.resize(M, 2 + d);
  for (Eigen::Index i = 0; i < M; ++i) {
    ens.rows(i, 0) =
        static_cast<double>(ens_seed.stream_id + static_cast<std::uint64_t>(i));
    ens.rows(i, 1) = gibbs.ensemble.log_weights(i);
    ens.rows.row(i).segment(2, d) = gibbs.ensemble.paths[i].values.row(last);
  }
  write_numeric_csv(note(ws, "ensemble.csv"), ens);

  // Agreement report: worst per-time mean / variance deviation from the
  // Schur oracle, in self-normalized-IS standard errors.
  double max_mean_dev = 0.0;
  double max_var_dev = 0.0;
  Eigen::VectorXd slot(M);
  for (Eigen::Index t = 0; t <= last; ++t) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index i = 0; i < M; ++i)
        slot(i) = gibbs.ensemble.paths[i].values(t, k);
      const Estimate mean = sn_weighted_mean(gibbs.ensemble.weights, slot);
      const Estimate var = sn_weighted_variance(gibbs.ensemble.weights, slot);
      max_mean_dev = std::max(
          max_mean_dev,
          deviation_in_se(mean.value, oracle.means(t, k), mean.standard_error));
      max_var_dev = std::max(
          max_var_dev, deviation_in_se(var.value, oracle.covs[t](k, k),
                                       var.standard_error));
    }
  }

  // With sigma1 = 0 the energy must match the classical uncorrelated form
  // in both its direct and robust (integrated-by-parts) evaluations.
  double mn_gap = std::numeric_limits<double>::quiet_NaN();
  if (model.sigma1.isZero(0.0)) {
    mn_gap = 0.0;
    const Eigen::Index probe = std::min<Eigen::Index>(M, 16);
    for (Eigen::Index i = 0; i < probe; ++i) {
      const double direct =
          mn_energy_uncorrelated(model, gibbs.ensemble.paths[i], y, false);
      const double robust =
          mn_energy_uncorrelated(model, gibbs.ensemble.paths[i], y, true);
      mn_gap = std::max(mn_gap, std::abs(direct - robust));
    }
  }

  CsvTable summary;
  summary.comments = ws.header;
  summary.columns = {"M",
                     "ess",
                     "log_z",
                     "log_z_se",
                     "max_mean_dev_se",
                     "max_var_dev_se",
                     "mn_identity_max_abs"};
  summary.rows.resize(1, 7);
  summary.rows << static_cast<double>(ws.run.M), gibbs.ensemble.ess(),
      log_z.value, log_z.standard_error, max_mean_dev, max_var_dev, mn_gap;
  write_numeric_csv(note(ws, "summary.csv"), summary);

  print_manifest(ws);
  return 0;
}

// ---------------------------------------------------------------------------
// free-energy

int cmd_free_energy(const CommonArgs& args) {
  Workspace ws =
      open_workspace(args, {"grid", "model", "run", "free_energy"});
  if (!ws.config.sections.count("free_energy"))
    throw std::invalid_argument("missing [free_energy] section");
  SectionReader fe(ws.config, "free_energy");
  const std::vector<double> shifts =
      fe.get_double_list("shifts", {-0.2, 0.1, 0.2});
  const bool include_reference = fe.get_bool("include_reference", true);
  const std::string obs_file = fe.get_string("observation", "");
  fe.finish();
  require_linear(ws, "free-energy");
  const LinearModel& model = ws.model.linear;

  Path y = load_observation(ws, obs_file);
  write_path_csv(note(ws, "observation.csv"), y, "y", ws.header);

  std::vector<CandidateMeasure> family;
  family.push_back(posterior_candidate(model, ws.grid, y));
  if (include_reference)
    family.push_back({reference_law(model, ws.grid, y), "reference"});
  if (!shifts.empty()) {
    const Eigen::Index len =
        model.signal_dim() * static_cast<Eigen::Index>(ws.grid->steps());
    const Eigen::VectorXd direction = Eigen::VectorXd::Ones(len);
    for (auto& cand :
         make_mean_shift_family(model, ws.grid, y, direction, shifts))
      family.push_back(std::move(cand));
  }

  FamilyMinimum result =
      minimize_over_family(model, ws.grid, y, family, ws.run.M,
                           SeedSpec{ws.run.master_seed, kStreamBlock},
                           ws.run.threads);
  write_reports_csv(note(ws, "free_energy.csv"), result.reports, ws.header);

  print_manifest(ws);
  std::cout << "minimum=" << result.best.label << " total="
            << format_double(result.reports[result.best_index].total) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// singularity

void write_plot_data(Workspace& ws, const std::string& name,
                     const std::vector<double>& x,
                     const std::vector<double>& y) {
  CsvTable table;
  table.comments = ws.header;
  table.columns = {"x", "y"};
  table.rows.resize(static_cast<Eigen::Index>(x.size()), 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    table.rows(static_cast<Eigen::Index>(i), 0) = x[i];
    table.rows(static_cast<Eigen::Index>(i), 1) = y[i];
  }
  write_numeric_csv(note(ws, name), table);
}

int cmd_singularity(const CommonArgs& args) {
  Workspace ws =
      open_workspace(args, {"grid", "model", "run", "singularity"});
  SectionReader sing(ws.config, "singularity");
  const bool run_rn = sing.get_bool("rn", true);
  std::vector<std::int64_t> rn_n =
      sing.get_int_list("rn_N", {8, 16, 32, 64});
  const std::int64_t rn_m = sing.get_int("rn_M", 10000);
  const bool run_decay = sing.get_bool("decay", true);
  std::vector<std::int64_t> decay_levels_raw =
      sing.get_int_list("decay_levels", {4, 5, 6, 7, 8, 9, 10});
  const std::int64_t decay_m = sing.get_int("decay_M", 256);
  const bool run_qv = sing.get_bool("qv", true);
  const std::int64_t qv_m = sing.get_int("qv_M", 1000);
  const bool run_classifier = sing.get_bool("classifier", false);
  const std::int64_t cls_m = sing.get_int("classifier_M", 200);
  const double threshold = sing.get_double("threshold_fraction", 0.5);
  sing.finish();
  if (rn_m < 2 || decay_m < 2 || qv_m < 2 || cls_m < 1)
    throw std::invalid_argument("singularity sample counts too small");
  if (run_decay || run_qv || run_classifier)
    require_linear(ws, "path-level singularity experiments");

  // Fail before writing anything if the classifier cannot separate.
  if (run_classifier) {
    if (ws.grid->level < 8)
      throw std::invalid_argument("classifier requires grid level >= 8");
    if ((ws.model.linear.sigma1 * ws.grid->T).norm() < 1e-8)
      throw std::invalid_argument("model violates separation");
  }

  const std::uint64_t base = ws.run.master_seed;
  const double T = ws.grid->T;

  if (run_rn) {
    std::vector<Eigen::Index> n_list;
    for (auto n : rn_n) n_list.push_back(static_cast<Eigen::Index>(n));
    const auto product_rows = rn_degeneration_experiment(
        T, n_list, static_cast<std::size_t>(rn_m), Coupling::product,
        SeedSpec{base, 0}, ws.run.threads);
    const auto joint_rows = rn_degeneration_experiment(
        T, n_list, static_cast<std::size_t>(rn_m), Coupling::joint,
        SeedSpec{base, n_list.size() * kStreamBlock}, ws.run.threads);
    write_rn_rows_csv(note(ws, "rn_product.csv"), product_rows, ws.header);
    write_rn_rows_csv(note(ws, "rn_joint.csv"), joint_rows, ws.header);
    std::vector<double> xs, yp, yj;
    for (std::size_t i = 0; i < product_rows.size(); ++i) {
      xs.push_back(static_cast<double>(product_rows[i].N));
      yp.push_back(product_rows[i].mean_log_rn);
      yj.push_back(joint_rows[i].mean_log_rn);
    }
    write_plot_data(ws, "rn_product_plot.csv", xs, yp);
    write_plot_data(ws, "rn_joint_plot.csv", xs, yj);
  }

  if (run_decay) {
    std::vector<int> levels;
    for (auto l : decay_levels_raw) levels.push_back(static_cast<int>(l));
    const auto rows = covariation_decay_study(
        ws.model.linear, T, levels, static_cast<std::size_t>(decay_m),
        SeedSpec{base, 64 * kStreamBlock}, ws.run.threads);
    CsvTable table;
    table.comments = ws.header;
    table.columns = {"level", "mean_norm", "var"};
    table.rows.resize(static_cast<Eigen::Index>(rows.size()), 3);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      table.rows(static_cast<Eigen::Index>(i), 0) = rows[i].level;
      table.rows(static_cast<Eigen::Index>(i), 1) = rows[i].mean_norm;
      table.rows(static_cast<Eigen::Index>(i), 2) = rows[i].var;
      xs.push_back(rows[i].level);
      ys.push_back(std::log2(rows[i].var));
    }
    write_numeric_csv(note(ws, "decay.csv"), table);
    write_plot_data(ws, "decay_plot.csv", xs, ys);
  }

  if (run_qv) {
    const LinearModel& model = ws.model.linear;
    const Eigen::Index p = model.signal_dim() + model.obs_dim();
    Eigen::MatrixXd joint_sum = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd joint_sq = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd prod_sum = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd prod_sq = Eigen::MatrixXd::Zero(p, p);
    for (std::int64_t k = 0; k < qv_m; ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      const Eigen::MatrixXd qj = empirical_qv_blocks(
          simulate_joint(model, ws.grid,
                         SeedSpec{base, 128 * kStreamBlock + uk}),
          model);
      const Eigen::MatrixXd qp = empirical_qv_blocks(
          simulate_product(model, ws.grid,
                           SeedSpec{base, 160 * kStreamBlock + uk}),
          model);
      joint_sum += qj;
      joint_sq += qj.cwiseProduct(qj);
      prod_sum += qp;
      prod_sq += qp.cwiseProduct(qp);
    }
    const double m = static_cast<double>(qv_m);
    Eigen::MatrixXd target(p, p);
    const Eigen::Index d = model.signal_dim();
    const Eigen::Index n = model.obs_dim();
    target.topLeftCorner(d, d) =
        model.sigma0 * model.sigma0.transpose() +
        model.sigma1 * model.sigma1.transpose();
    target.topRightCorner(d, n) = model.sigma1;
    target.bottomLeftCorner(n, d) = model.sigma1.transpose();
    target.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);

    CsvTable table;
    table.comments = ws.header;
    table.columns = {"row",      "col",      "joint_mean", "joint_se",
                     "prod_mean", "prod_se", "target_joint"};
    table.rows.resize(p * p, 7);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::Index r = i * p + j;
        const double jm = joint_sum(i, j) / m;
        const double pm = prod_sum(i, j) / m;
        const double jv = std::max(0.0, joint_sq(i, j) / m - jm * jm);
        const double pv = std::max(0.0, prod_sq(i, j) / m - pm * pm);
        table.rows(r, 0) = static_cast<double>(i + 1);
        table.rows(r, 1) = static_cast<double>(j + 1);
        table.rows(r, 2) = jm;
        table.rows(r, 3) = std::sqrt(jv / m);
        table.rows(r, 4) = pm;
        table.rows(r, 5) = std::sqrt(pv / m);
        table.rows(r, 6) = target(i, j);
      }
    write_numeric_csv(note(ws, "qv_blocks.csv"), table);
  }

  if (run_classifier) {
    const LinearModel& model = ws.model.linear;
    std::int64_t joint_errors = 0;
    std::int64_t prod_errors = 0;
    for (std::int64_t k = 0; k < cls_m; ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      PathPair pj = simulate_joint(model, ws.grid,
                                   SeedSpec{base, 192 * kStreamBlock + uk});
      PathPair pp = simulate_product(model, ws.grid,
                                     SeedSpec{base, 224 * kStreamBlock + uk});
      if (classify_coupling(pj, model, threshold) != Coupling::joint)
        ++joint_errors;
      if (classify_coupling(pp, model, threshold) != Coupling::product)
        ++prod_errors;
    }
    CsvTable table;
    table.comments = ws.header;
    table.columns = {"is_joint", "pairs", "errors", "error_rate"};
    table.rows.resize(2, 4);
    table.rows << 1.0, static_cast<double>(cls_m),
        static_cast<double>(joint_errors),
        static_cast<double>(joint_errors) / static_cast<double>(cls_m), 0.0,
        static_cast<double>(cls_m), static_cast<double>(prod_errors),
        static_cast<double>(prod_errors) / static_cast<double>(cls_m);
    write_numeric_csv(note(ws, "classifier.csv"), table);
  }

  print_manifest(ws);
  return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const CommonArgs& args) {
  const std::set<std::string> known = {"grid",        "model",      "run",
                                      "simulate",    "filter",     "free_energy",
                                      "singularity"};
  ParsedConfig config = parse_config_file(args.config_path);
  check_sections(config, known);
  auto grid = load_grid(config);
  ModelSpec model = load_model(config, grid->T);
  RunSpec run = load_run(config);

  std::cout << "config_hash=" << hash_hex(config.hash) << "\n";
  std::cout << "grid: level=" << grid->level << " T=" << format_double(grid->T)
            << " dt=" << format_double(grid->dt()) << "\n";
  if (model.is_linear)
    std::cout << "model: linear d=" << model.linear.signal_dim()
              << " n=" << model.linear.obs_dim()
              << " hash=" << hash_hex(model_hash(model.linear)) << "\n";
  else
    std::cout << "model: nonlinear d=" << model.nonlinear.d
              << " n=" << model.nonlinear.n << "\n";
  std::cout << "run: M=" << run.M << " master_seed=" << run.master_seed
            << " threads=" << run.threads << "\n";

  const ValidationReport report = model.is_linear
                                      ? validate_linear(model.linear)
                                      : validate_nonlinear(model.nonlinear);
  if (!report.ok()) {
    std::cout << report.summary() << "\n";
    std::cout << "validation: failed\n";
    return 2;
  }
  std::cout << "validation: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlated-noise filtering and singularity experiments"};
  app.set_version_flag("--version", std::string("corrfilt ") + kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "experiment config file")
      ->required();
  app.add_option("--seed", args.seed, "override [run] master_seed");
  app.add_option("--out", args.out, "override [run] out_dir");
  app.add_option("--threads", args.threads,
                 "worker threads (speed only, never results)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "write sampled path CSVs");
  CLI::App* filter = app.add_subcommand(
      "filter", "oracle / Kalman / Gibbs posterior tracks and summary");
  CLI::App* free_energy = app.add_subcommand(
      "free-energy", "candidate-family free-energy report");
  CLI::App* singularity = app.add_subcommand(
      "singularity", "measure-degeneration experiment tables");
  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a config");
  for (CLI::App* sub :
       {simulate, filter, free_energy, singularity, validate})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(args);
    if (app.got_subcommand(filter)) return cmd_filter(args);
    if (app.got_subcommand(free_energy)) return cmd_free_energy(args);
    if (app.got_subcommand(singularity)) return cmd_singularity(args);
    return cmd_validate(args);
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
