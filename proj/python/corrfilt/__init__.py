# Copyright 2026 the corrfilt authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Correlated-noise filtering laboratory.

Path samplers for coupled signal/observation diffusions, the
energy-weighted (Gibbs) representation of the filtering posterior with
exact Gaussian oracles, free-energy reports over candidate families,
and experiments exhibiting the joint-vs-product measure degeneration.

Everything is deterministic in explicit ``(seed, stream)`` pairs; thread
counts change speed only, never values.
"""

from ._core import (
    STREAM_BLOCK,
    CandidateMeasure,
    Coupling,
    CovariationStat,
    DecayRow,
    EnergyBreakdown,
    Estimate,
    FamilyMinimum,
    FilterTrack,
    FreeEnergyReport,
    GaussianLaw,
    Grid,
    ImportancePosterior,
    LinearModel,
    NonlinearModel,
    Path,
    PathPair,
    RnExperimentRow,
    ValidationReport,
    __version__,
    build_discrete_joint_law,
    classify_coupling,
    condition_on_observations,
    covariation_decay_study,
    discrete_cov_matrices,
    discrete_log_rn,
    empirical_qv_blocks,
    energy,
    estimate_log_normalizer,
    flatten_path,
    free_energy,
    importance_posterior,
    kalman_correlated,
    kl_gaussian,
    log_density,
    make_mean_shift_family,
    make_tanh_model,
    minimize_over_family,
    mn_energy_uncorrelated,
    model_hash,
    observation_marginal,
    posterior_candidate,
    quadratic_covariation,
    reference_law,
    rn_degeneration_experiment,
    sample_reference,
    signal_marginal,
    simulate_joint,
    simulate_product,
    track_from_signal_law,
    validate_linear,
    validate_nonlinear,
)

__all__ = [
    "STREAM_BLOCK",
    "CandidateMeasure",
    "Coupling",
    "CovariationStat",
    "DecayRow",
    "EnergyBreakdown",
    "Estimate",
    "FamilyMinimum",
    "FilterTrack",
    "FreeEnergyReport",
    "GaussianLaw",
    "Grid",
    "ImportancePosterior",
    "LinearModel",
    "NonlinearModel",
    "Path",
    "PathPair",
    "RnExperimentRow",
    "ValidationReport",
    "__version__",
    "build_discrete_joint_law",
    "classify_coupling",
    "condition_on_observations",
    "covariation_decay_study",
    "discrete_cov_matrices",
    "discrete_log_rn",
    "empirical_qv_blocks",
    "energy",
    "estimate_log_normalizer",
    "flatten_path",
    "free_energy",
    "importance_posterior",
    "kalman_correlated",
    "kl_gaussian",
    "log_density",
    "make_mean_shift_family",
    "make_tanh_model",
    "minimize_over_family",
    "mn_energy_uncorrelated",
    "model_hash",
    "observation_marginal",
    "posterior_candidate",
    "quadratic_covariation",
    "reference_law",
    "rn_degeneration_experiment",
    "sample_reference",
    "signal_marginal",
    "simulate_joint",
    "simulate_product",
    "track_from_signal_law",
    "validate_linear",
    "validate_nonlinear",
]
