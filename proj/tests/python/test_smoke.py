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

"""Smoke tests for the Python bindings.

The heavy numerical validation lives in the C++ suites; here we check that
the module imports, round-trips numpy arrays, stays deterministic in
(seed, stream), and translates argument errors into Python exceptions.
"""

import math

import numpy as np
import pytest

import corrfilt as cf


@pytest.fixture(scope="module")
def model():
    return cf.LinearModel(
        A=np.array([[-1.0]]),
        C=np.array([[1.0]]),
        sigma0=np.array([[1.0]]),
        sigma1=np.array([[0.5]]),
        x0=np.array([1.0]),
        T=1.0,
    )


@pytest.fixture(scope="module")
def grid():
    return cf.Grid(level=6, T=1.0)


def test_version_and_stream_block():
    assert cf.__version__ == "0.1.0"
    assert cf.STREAM_BLOCK == 2**32


def test_grid_properties(grid):
    assert grid.level == 6
    assert grid.T == 1.0
    assert grid.steps == 64
    assert grid.dt == pytest.approx(1.0 / 64.0, abs=0.0)
    times = np.asarray(grid.times)
    assert times.shape == (65,)
    assert times[0] == 0.0
    assert times[-1] == 1.0


def test_grid_guards():
    with pytest.raises(ValueError):
        cf.Grid(level=25, T=1.0)
    with pytest.raises(ValueError):
        cf.Grid(level=3, T=-1.0)


def test_model_validation(model):
    assert model.signal_dim == 1
    assert model.obs_dim == 1
    assert cf.validate_linear(model).ok()
    bad = cf.LinearModel(
        A=np.array([[-1.0]]),
        C=np.array([[1.0]]),
        sigma0=np.array([[0.0]]),
        sigma1=np.array([[0.5]]),
        x0=np.array([1.0]),
        T=1.0,
    )
    report = cf.validate_linear(bad)
    assert not report.ok()
    assert "sigma0" in report.summary()


def test_simulation_shapes_and_determinism(model, grid):
    pair = cf.simulate_joint(model, grid, seed=12, stream=3)
    assert pair.coupling == cf.Coupling.joint
    assert pair.x.values.shape == (65, 1)
    assert pair.y.values.shape == (65, 1)
    assert pair.x.values[0, 0] == 1.0
    assert pair.y.values[0, 0] == 0.0

    again = cf.simulate_joint(model, grid, seed=12, stream=3)
    np.testing.assert_array_equal(pair.x.values, again.x.values)
    np.testing.assert_array_equal(pair.y.values, again.y.values)

    other = cf.simulate_joint(model, grid, seed=12, stream=4)
    assert np.abs(pair.x.values - other.x.values).max() > 0.0

    prod = cf.simulate_product(model, grid, seed=12, stream=3)
    assert prod.coupling == cf.Coupling.product


def test_nonlinear_model_roundtrip():
    model = cf.make_tanh_model(a=0.8, c=1.0, sigma0=1.0, sigma1=0.4, x0=0.5, T=1.0)
    assert model.d == 1
    assert model.n == 1
    assert cf.validate_nonlinear(model).ok()
    pair = cf.simulate_joint(model, cf.Grid(level=4, T=1.0), seed=2)
    assert pair.x.values.shape == (17, 1)


def test_energy_breakdown(model, grid):
    pair = cf.simulate_joint(model, grid, seed=8)
    h = cf.energy(model, pair.x, pair.y)
    total = h.total()
    assert math.isfinite(total)
    assert total == pytest.approx(h.quadratic_term() - h.stochastic_term())
    assert h.drift_quadratic >= 0.0
    assert h.obs_quadratic >= 0.0


def test_importance_posterior_matches_oracle(model, grid):
    y = cf.simulate_joint(model, grid, seed=77).y
    post = cf.importance_posterior(model, grid, y, M=2000, seed=77, stream=cf.STREAM_BLOCK)
    assert 1.0 <= post.ess <= 2000.0
    assert post.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert post.moments.means.shape == (65, 1)
    assert post.terminal_values().shape == (2000, 1)

    law = cf.condition_on_observations(cf.build_discrete_joint_law(model, grid), y)
    oracle = cf.track_from_signal_law(law, np.array([1.0]))
    est = float(post.weights @ post.terminal_values()[:, 0])
    se = math.sqrt(
        float((post.weights**2 * (post.terminal_values()[:, 0] - est) ** 2).sum())
    )
    assert abs(est - oracle.means[-1, 0]) <= 5.0 * se

    kalman = cf.kalman_correlated(model, grid, y)
    assert kalman.means.shape == (65, 1)
    assert kalman.covs[-1][0, 0] > 0.0


def test_log_normalizer_estimate(model, grid):
    y = cf.simulate_joint(model, grid, seed=21).y
    est = cf.estimate_log_normalizer(model, grid, y, M=500, seed=21, stream=cf.STREAM_BLOCK)
    assert math.isfinite(est.value)
    assert est.standard_error > 0.0


def test_free_energy_family(model):
    grid = cf.Grid(level=4, T=1.0)
    y = cf.simulate_joint(model, grid, seed=5).y
    family = [cf.posterior_candidate(model, grid, y)]
    family += cf.make_mean_shift_family(
        model, grid, y, direction=np.ones(16), s_values=[0.5]
    )
    sweep = cf.minimize_over_family(model, grid, y, family, M=400, seed=5)
    assert len(sweep.reports) == 2
    assert sweep.best_index == 0
    assert sweep.reports[0].label == "posterior"
    assert sweep.reports[1].gap_predicted > 0.0
    ref = cf.reference_law(model, grid, y)
    assert cf.kl_gaussian(family[0].law, ref) >= 0.0


def test_discrete_log_rn_closed_form():
    n = 4
    value = cf.discrete_log_rn(np.zeros(2 * n), n, 1.0 / n)
    assert value == pytest.approx(0.5 * n * math.log(2.0), abs=1e-12)
    joint, prod = cf.discrete_cov_matrices(2, 0.5)
    assert joint.shape == (4, 4)
    assert prod[0, 2] == 0.0
    assert joint[0, 2] == pytest.approx(0.5)


def test_covariation_classifier(model):
    grid = cf.Grid(level=10, T=1.0)
    joint_pair = cf.simulate_joint(model, grid, seed=33)
    prod_pair = cf.simulate_product(model, grid, seed=34)
    q = cf.quadratic_covariation(joint_pair, 1.0, model)
    assert q.target_joint[0, 0] == pytest.approx(0.5)
    assert abs(q.value[0, 0] - 0.5) < 0.2
    assert cf.classify_coupling(joint_pair, model) == cf.Coupling.joint
    assert cf.classify_coupling(prod_pair, model) == cf.Coupling.product


def test_rn_experiment_rows():
    rows = cf.rn_degeneration_experiment(
        1.0, [4, 8], M=500, measure=cf.Coupling.product, seed=61
    )
    assert [r.N for r in rows] == [4, 8]
    assert rows[1].mean_log_rn < rows[0].mean_log_rn < 0.0
    assert all(r.sd_log_rn > 0.0 for r in rows)
