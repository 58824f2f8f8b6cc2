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
 * @file corrfilt_module.cpp
 * @brief Python bindings for the corrfilt core: samplers, the Gibbs
 *        (energy-weighted) posterior, Gaussian oracles, free-energy
 *        reports, and the measure-degeneration experiments.
 *
 * Seeds are passed as (seed, stream) integer pairs; every operation is
 * deterministic in them. Matrices cross the boundary as numpy arrays.
 */

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "corrfilt/free_energy.hpp"
#include "corrfilt/gibbs.hpp"
#include "corrfilt/model.hpp"
#include "corrfilt/oracle.hpp"
#include "corrfilt/rng.hpp"
#include "corrfilt/sampler.hpp"
#include "corrfilt/singularity.hpp"
#include "corrfilt/stats.hpp"
#include "corrfilt/version.hpp"

namespace py = pybind11;
using namespace corrfilt;

namespace {

/// Python-facing handle for the immutable shared grid.
struct PyGrid {
  std::shared_ptr<const TimeGrid> ptr;
};

SeedSpec seed_spec(std::uint64_t seed, std::uint64_t stream) {
  return SeedSpec{seed, stream};
}

Path make_path(const PyGrid& grid, const Eigen::MatrixXd& values) {
  if (!grid.ptr) throw std::invalid_argument("null grid");
  if (values.rows() != static_cast<Eigen::Index>(grid.ptr->size()))
    throw std::invalid_argument("path rows must equal grid size");
  if (values.cols() < 1)
    throw std::invalid_argument("path needs at least one coordinate");
  return Path{grid.ptr, values};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Correlated-noise filtering laboratory: path samplers, Gibbs "
      "posterior, Gaussian oracles, free-energy reports, and "
      "joint-vs-product measure experiments.";
  m.attr("__version__") = kVersion;
  m.attr("STREAM_BLOCK") = kStreamBlock;

  py::enum_<Coupling>(m, "Coupling")
      .value("joint", Coupling::joint)
      .value("product", Coupling::product)
      .value("reference", Coupling::reference);

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int level, double T) {
             return PyGrid{make_dyadic_grid(level, T)};
           }),
           py::arg("level"), py::arg("T"))
      .def_property_readonly("level",
                             [](const PyGrid& g) { return g.ptr->level; })
      .def_property_readonly("T", [](const PyGrid& g) { return g.ptr->T; })
      .def_property_readonly("dt", [](const PyGrid& g) { return g.ptr->dt(); })
      .def_property_readonly("steps",
                             [](const PyGrid& g) { return g.ptr->steps(); })
      .def_property_readonly("times",
                             [](const PyGrid& g) { return g.ptr->times; })
      .def("__repr__", [](const PyGrid& g) {
        return "Grid(level=" + std::to_string(g.ptr->level) +
               ", T=" + std::to_string(g.ptr->T) + ")";
      });

  py::class_<Path>(m, "Path")
      .def(py::init(&make_path), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid",
                             [](const Path& p) { return PyGrid{p.grid}; })
      .def_readonly("values", &Path::values)
      .def_property_readonly("dim", &Path::dim);

  py::class_<PathPair>(m, "PathPair")
      .def_readonly("x", &PathPair::x)
      .def_readonly("y", &PathPair::y)
      .def_readonly("coupling", &PathPair::coupling_tag);

  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init([](const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                       const Eigen::MatrixXd& sigma0,
                       const Eigen::MatrixXd& sigma1, const Eigen::VectorXd& x0,
                       double T) {
             LinearModel model{A, C, sigma0, sigma1, x0, T};
             return model;
           }),
           py::arg("A"), py::arg("C"), py::arg("sigma0"), py::arg("sigma1"),
           py::arg("x0"), py::arg("T"))
      .def_readonly("A", &LinearModel::A)
      .def_readonly("C", &LinearModel::C)
      .def_readonly("sigma0", &LinearModel::sigma0)
      .def_readonly("sigma1", &LinearModel::sigma1)
      .def_readonly("x0", &LinearModel::x0)
      .def_readonly("T", &LinearModel::T)
      .def_property_readonly("signal_dim", &LinearModel::signal_dim)
      .def_property_readonly("obs_dim", &LinearModel::obs_dim);

  py::class_<NonlinearModel>(m, "NonlinearModel")
      .def_readonly("d", &NonlinearModel::d)
      .def_readonly("n", &NonlinearModel::n)
      .def_readonly("T", &NonlinearModel::T)
      .def_readonly("growth_bound", &NonlinearModel::growth_bound);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("failures", &ValidationReport::failures)
      .def("ok", &ValidationReport::ok)
      .def("summary", &ValidationReport::summary);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("standard_error", &Estimate::standard_error)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(value=" + std::to_string(e.value) +
               ", standard_error=" + std::to_string(e.standard_error) + ")";
      });

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("drift_stochastic", &EnergyBreakdown::drift_stochastic)
      .def_readonly("drift_quadratic", &EnergyBreakdown::drift_quadratic)
      .def_readonly("obs_stochastic", &EnergyBreakdown::obs_stochastic)
      .def_readonly("obs_quadratic", &EnergyBreakdown::obs_quadratic)
      .def("stochastic_term", &EnergyBreakdown::stochastic_term)
      .def("quadratic_term", &EnergyBreakdown::quadratic_term)
      .def("total", &EnergyBreakdown::total);

  py::class_<GaussianLaw>(m, "GaussianLaw")
      .def_readonly("mean", &GaussianLaw::mean)
      .def_readonly("cov", &GaussianLaw::cov)
      .def_property_readonly(
          "signal_dim", [](const GaussianLaw& l) { return l.layout.signal_dim; })
      .def_property_readonly(
          "obs_dim", [](const GaussianLaw& l) { return l.layout.obs_dim; })
      .def_property_readonly("steps",
                             [](const GaussianLaw& l) { return l.layout.steps; });

  py::class_<FilterTrack>(m, "FilterTrack")
      .def_readonly("times", &FilterTrack::times)
      .def_readonly("means", &FilterTrack::means)
      .def_readonly("covs", &FilterTrack::covs);

  py::class_<ImportancePosterior>(m, "ImportancePosterior")
      .def_readonly("moments", &ImportancePosterior::moments)
      .def_property_readonly(
          "log_weights",
          [](const ImportancePosterior& p) { return p.ensemble.log_weights; })
      .def_property_readonly(
          "weights",
          [](const ImportancePosterior& p) { return p.ensemble.weights; })
      .def_property_readonly(
          "ess", [](const ImportancePosterior& p) { return p.ensemble.ess(); })
      .def("terminal_values", [](const ImportancePosterior& p) {
        const auto M = static_cast<Eigen::Index>(p.ensemble.paths.size());
        if (M == 0) return Eigen::MatrixXd();
        const Eigen::Index d = p.ensemble.paths[0].dim();
        const Eigen::Index last = p.ensemble.paths[0].values.rows() - 1;
        Eigen::MatrixXd out(M, d);
        for (Eigen::Index i = 0; i < M; ++i)
          out.row(i) = p.ensemble.paths[i].values.row(last);
        return out;
      });

  py::class_<CandidateMeasure>(m, "CandidateMeasure")
      .def_readonly("law", &CandidateMeasure::law)
      .def_readonly("label", &CandidateMeasure::label);

  py::class_<FreeEnergyReport>(m, "FreeEnergyReport")
      .def_readonly("label", &FreeEnergyReport::label)
      .def_readonly("kl_to_reference", &FreeEnergyReport::kl_to_reference)
      .def_readonly("expected_energy", &FreeEnergyReport::expected_energy)
      .def_readonly("total", &FreeEnergyReport::total)
      .def_readonly("gibbs_gap", &FreeEnergyReport::gibbs_gap)
      .def_readonly("gap_predicted", &FreeEnergyReport::gap_predicted)
      .def_readonly("mc_standard_error", &FreeEnergyReport::mc_standard_error);

  py::class_<FamilyMinimum>(m, "FamilyMinimum")
      .def_readonly("best_index", &FamilyMinimum::best_index)
      .def_readonly("best", &FamilyMinimum::best)
      .def_readonly("reports", &FamilyMinimum::reports);

  py::class_<RnExperimentRow>(m, "RnExperimentRow")
      .def_readonly("N", &RnExperimentRow::N)
      .def_readonly("delta_t", &RnExperimentRow::delta_t)
      .def_readonly("mean_log_rn", &RnExperimentRow::mean_log_rn)
      .def_readonly("sd_log_rn", &RnExperimentRow::sd_log_rn)
      .def_readonly("sampling_measure", &RnExperimentRow::sampling_measure);

  py::class_<CovariationStat>(m, "CovariationStat")
      .def_readonly("level", &CovariationStat::level)
      .def_readonly("t", &CovariationStat::t)
      .def_readonly("value", &CovariationStat::value)
      .def_readonly("target_joint", &CovariationStat::target_joint);

  py::class_<DecayRow>(m, "DecayRow")
      .def_readonly("level", &DecayRow::level)
      .def_readonly("mean_norm", &DecayRow::mean_norm)
      .def_readonly("var", &DecayRow::var);

  // -- model construction and validation ------------------------------------
  m.def("make_tanh_model", &make_tanh_model, py::arg("a"), py::arg("c"),
        py::arg("sigma0"), py::arg("sigma1"), py::arg("x0"), py::arg("T"),
        "Bounded-drift nonlinear model b(x) = a tanh(x), h(x) = c tanh(x).");
  m.def("validate_linear", &validate_linear, py::arg("model"));
  m.def("validate_nonlinear", &validate_nonlinear, py::arg("model"));
  m.def("model_hash", &model_hash, py::arg("model"));

  // -- samplers -------------------------------------------------------------
  m.def(
      "simulate_joint",
      [](const LinearModel& model, const PyGrid& grid, std::uint64_t seed,
         std::uint64_t stream) {
        return simulate_joint(model, grid.ptr, seed_spec(seed, stream));
      },
      py::arg("model"), py::arg("grid"), py::arg("seed"),
      py::arg("stream") = 0);
  m.def(
      "simulate_joint",
      [](const NonlinearModel& model, const PyGrid& grid, std::uint64_t seed,
         std::uint64_t stream) {
        return simulate_joint(model, grid.ptr, seed_spec(seed, stream));
      },
      py::arg("model"), py::arg("grid"), py::arg("seed"),
      py::arg("stream") = 0);
  m.def(
      "simulate_product",
      [](const LinearModel& model, const PyGrid& grid, std::uint64_t seed,
         std::uint64_t stream) {
        return simulate_product(model, grid.ptr, seed_spec(seed, stream));
      },
      py::arg("model"), py::arg("grid"), py::arg("seed"),
      py::arg("stream") = 0);
  m.def(
      "simulate_product",
      [](const NonlinearModel& model, const PyGrid& grid, std::uint64_t seed,
         std::uint64_t stream) {
        return simulate_product(model, grid.ptr, seed_spec(seed, stream));
      },
      py::arg("model"), py::arg("grid"), py::arg("seed"),
      py::arg("stream") = 0);
  m.def(
      "sample_reference",
      [](const LinearModel& model, const PyGrid& grid, const Path& y,
         std::uint64_t seed, std::uint64_t stream) {
        return sample_reference(model, grid.ptr, y, seed_spec(seed, stream));
      },
      py::arg("model"), py::arg("grid"), py::arg("y"), py::arg("seed"),
      py::arg("stream") = 0);

  // -- energy and the Gibbs posterior ---------------------------------------
  m.def("energy", &energy, py::arg("model"), py::arg("x"), py::arg("y"),
        "Pathwise energy H(x, y); the filter density against the "
        "conditional reference measure is exp(-H)/Z.");
  m.def("mn_energy_uncorrelated", &mn_energy_uncorrelated, py::arg("model"),
        py::arg("x"), py::arg("y"), py::arg("robust") = false);
  m.def(
      "importance_posterior",
      [](const LinearModel& model, const PyGrid& grid, const Path& y,
         std::size_t M, std::uint64_t seed, std::uint64_t stream,
         int threads) {
        return importance_posterior(model, grid.ptr, y, M,
                                    seed_spec(seed, stream), threads);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"), py::arg("M"),
      py::arg("seed"), py::arg("stream") = 0, py::arg("threads") = 1);
  m.def(
      "estimate_log_normalizer",
      [](const LinearModel& model, const PyGrid& grid, const Path& y,
         std::size_t M, std::uint64_t seed, std::uint64_t stream,
         int threads) {
        return estimate_log_normalizer(model, grid.ptr, y, M,
                                       seed_spec(seed, stream), threads);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"), py::arg("M"),
      py::arg("seed"), py::arg("stream") = 0, py::arg("threads") = 1);

  // -- Gaussian oracles -----------------------------------------------------
  m.def(
      "build_discrete_joint_law",
      [](const LinearModel& model, const PyGrid& grid) {
        return build_discrete_joint_law(model, grid.ptr);
      },
      py::arg("model"), py::arg("grid"));
  m.def("signal_marginal", &signal_marginal, py::arg("law"));
  m.def("observation_marginal", &observation_marginal, py::arg("law"));
  m.def("condition_on_observations", &condition_on_observations,
        py::arg("law"), py::arg("y"));
  m.def("log_density", &log_density, py::arg("law"), py::arg("z"));
  m.def("flatten_path", &flatten_path, py::arg("path"));
  m.def(
      "kalman_correlated",
      [](const LinearModel& model, const PyGrid& grid, const Path& y) {
        return kalman_correlated(model, grid.ptr, y);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"));
  m.def("track_from_signal_law", &track_from_signal_law, py::arg("law"),
        py::arg("x0"));

  // -- free energy ----------------------------------------------------------
  m.def(
      "reference_law",
      [](const LinearModel& model, const PyGrid& grid, const Path& y) {
        return reference_law(model, grid.ptr, y);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"));
  m.def("kl_gaussian", &kl_gaussian, py::arg("p"), py::arg("q"));
  m.def(
      "posterior_candidate",
      [](const LinearModel& model, const PyGrid& grid, const Path& y) {
        return posterior_candidate(model, grid.ptr, y);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"));
  m.def(
      "free_energy",
      [](const CandidateMeasure& candidate, const LinearModel& model,
         const PyGrid& grid, const Path& y, std::size_t M, std::uint64_t seed,
         std::uint64_t stream, int threads) {
        return free_energy(candidate, model, grid.ptr, y, M,
                           seed_spec(seed, stream), threads);
      },
      py::arg("candidate"), py::arg("model"), py::arg("grid"), py::arg("y"),
      py::arg("M"), py::arg("seed"), py::arg("stream") = 0,
      py::arg("threads") = 1);
  m.def(
      "make_mean_shift_family",
      [](const LinearModel& model, const PyGrid& grid, const Path& y,
         const Eigen::VectorXd& direction, const std::vector<double>& s) {
        return make_mean_shift_family(model, grid.ptr, y, direction, s);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"), py::arg("direction"),
      py::arg("s_values"));
  m.def(
      "minimize_over_family",
      [](const LinearModel& model, const PyGrid& grid, const Path& y,
         const std::vector<CandidateMeasure>& family, std::size_t M,
         std::uint64_t seed, std::uint64_t stream, int threads) {
        return minimize_over_family(model, grid.ptr, y, family, M,
                                    seed_spec(seed, stream), threads);
      },
      py::arg("model"), py::arg("grid"), py::arg("y"), py::arg("family"),
      py::arg("M"), py::arg("seed"), py::arg("stream") = 0,
      py::arg("threads") = 1);

  // -- measure-degeneration experiments -------------------------------------
  m.def(
      "discrete_cov_matrices",
      [](Eigen::Index N, double delta_t) {
        const DiscreteCovPair pair = discrete_cov_matrices(N, delta_t);
        return py::make_tuple(pair.cov_joint, pair.cov_prod);
      },
      py::arg("N"), py::arg("delta_t"),
      "Returns (joint, product) covariances of the stacked increment "
      "vector (x_1..x_N, y_1..y_N).");
  m.def("discrete_log_rn", &discrete_log_rn, py::arg("z"), py::arg("N"),
        py::arg("delta_t"));
  m.def(
      "rn_degeneration_experiment",
      [](double T, const std::vector<Eigen::Index>& N_list, std::size_t M,
         Coupling measure, std::uint64_t seed, std::uint64_t stream,
         int threads) {
        return rn_degeneration_experiment(T, N_list, M, measure,
                                          seed_spec(seed, stream), threads);
      },
      py::arg("T"), py::arg("N_list"), py::arg("M"), py::arg("measure"),
      py::arg("seed"), py::arg("stream") = 0, py::arg("threads") = 1);
  m.def("quadratic_covariation",
        py::overload_cast<const PathPair&, double, const LinearModel&>(
            &quadratic_covariation),
        py::arg("pair"), py::arg("t"), py::arg("model"));
  m.def("quadratic_covariation",
        py::overload_cast<const PathPair&, double, const NonlinearModel&>(
            &quadratic_covariation),
        py::arg("pair"), py::arg("t"), py::arg("model"));
  m.def(
      "covariation_decay_study",
      [](const LinearModel& model, double t, const std::vector<int>& levels,
         std::size_t M, std::uint64_t seed, std::uint64_t stream,
         int threads) {
        return covariation_decay_study(model, t, levels, M,
                                       seed_spec(seed, stream), threads);
      },
      py::arg("model"), py::arg("t"), py::arg("levels"), py::arg("M"),
      py::arg("seed"), py::arg("stream") = 0, py::arg("threads") = 1);
  m.def("classify_coupling", &classify_coupling, py::arg("pair"),
        py::arg("model"), py::arg("threshold_fraction") = 0.5);
  m.def("empirical_qv_blocks", &empirical_qv_blocks, py::arg("pair"),
        py::arg("model"));
}
