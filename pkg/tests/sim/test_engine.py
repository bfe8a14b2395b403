"""Closed-loop simulation under common random numbers.

Covers:
- zero noise, cost bookkeeping and reproducibility
- pathwise equality of centralized and decentralized profiles
- the estimate split and superposition residuals on the corpus
"""
import numpy as np
import pytest

from sim.engine import simulate, simulate_run, stage_cost
from strategies import Synthesis, create_profile
from tests.conftest import CORPUS_SEEDS, corpus_model, with_changes

PATHWISE_RTOL = 1e-8


def _pair(model, seed: int, runs: int):
    synthesis = Synthesis.solve(model)
    suffix = "of" if model.C is not None else "sf"
    cen = create_profile(f"centralized-{suffix}", model, synthesis)
    dec = create_profile(f"decentralized-{suffix}", model, synthesis)
    return simulate(model, cen, seed=seed, runs=runs), simulate(model, dec, seed=seed, runs=runs)


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a))


class TestSimulationBasics:

    def test_no_noise_no_cost(self, sum_sf_model):
        model = with_changes(sum_sf_model, Sigma_x=np.zeros((2, 2)), Sigma_w=np.zeros((2, 2)))
        profile = create_profile("decentralized-sf", model)
        trace = simulate(model, profile, seed=0, runs=1)[0]
        np.testing.assert_array_equal(trace.x, 0.0)
        assert trace.total_cost == 0.0

    def test_costs_are_stage_sums(self, sum_of_model):
        profile = create_profile("centralized-of", sum_of_model)
        trace = simulate_run(sum_of_model, profile, seed=4, run=0)
        assert np.all(trace.costs >= 0.0)
        for k in range(sum_of_model.horizon):
            assert trace.costs[k] == stage_cost(sum_of_model, trace.x[k], trace.u[k])
        assert trace.total_cost == pytest.approx(trace.costs.sum())

    def test_shapes(self, sum_of_model):
        profile = create_profile("decentralized-of", sum_of_model)
        trace = simulate(sum_of_model, profile, seed=0, runs=1)[0]
        T = sum_of_model.horizon
        assert trace.x.shape == (T, 2)
        assert trace.u.shape == (T, 2)
        assert trace.y.shape == (T, 2)
        assert trace.z.shape == (T, 2)
        assert trace.s.shape == (T, 2, 2)
        assert trace.horizon == T

    def test_state_feedback_has_no_filter(self, sum_sf_model):
        profile = create_profile("centralized-sf", sum_sf_model)
        trace = simulate(sum_sf_model, profile, seed=0, runs=1)[0]
        assert trace.y is None and trace.z is None
        assert trace.s is None
        assert trace.superposition_residual <= 1e-12

    def test_reproducible(self, sum_of_model):
        profile = create_profile("decentralized-of", sum_of_model)
        first = simulate(sum_of_model, profile, seed=17, runs=3)
        second = simulate(sum_of_model, profile, seed=17, runs=3)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.x, b.x)
            np.testing.assert_array_equal(a.costs, b.costs)

    def test_jobs_do_not_change_results(self, of_model):
        profile = create_profile("decentralized-of", of_model)
        serial = simulate(of_model, profile, seed=8, runs=6)
        threaded = simulate(of_model, profile, seed=8, runs=6, jobs=3)
        assert [t.run for t in threaded] == list(range(6))
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a.u, b.u)
            np.testing.assert_array_equal(a.costs, b.costs)

    def test_run_count_checked(self, sum_sf_model):
        profile = create_profile("zero", sum_sf_model)
        with pytest.raises(ValueError):
            simulate(sum_sf_model, profile, seed=0, runs=0)

    def test_profile_model_checked(self, sum_sf_model, scalar_model):
        profile = create_profile("zero", scalar_model)
        with pytest.raises(ValueError):
            simulate(sum_sf_model, profile, seed=0, runs=1)

    def test_common_noise_across_profiles(self, sum_sf_model):
        zero = simulate(sum_sf_model, create_profile("zero", sum_sf_model), seed=6, runs=1)[0]
        cen = simulate(sum_sf_model, create_profile("centralized-sf", sum_sf_model), seed=6, runs=1)[0]
        np.testing.assert_array_equal(zero.x[0], cen.x[0])


class TestPathwiseEquality:

    def test_state_feedback(self, sf_model):
        for a, b in zip(*_pair(sf_model, seed=1, runs=5)):
            np.testing.assert_allclose(b.x, a.x, rtol=PATHWISE_RTOL, atol=PATHWISE_RTOL)
            assert _relative_gap(a.total_cost, b.total_cost) <= PATHWISE_RTOL

    def test_output_feedback(self, of_model):
        for a, b in zip(*_pair(of_model, seed=2, runs=5)):
            np.testing.assert_allclose(b.y, a.y, rtol=PATHWISE_RTOL, atol=PATHWISE_RTOL)
            assert _relative_gap(a.total_cost, b.total_cost) <= PATHWISE_RTOL
            assert b.estimate_residual <= 1e-8

    def test_sum_of_actions(self, sum_sf_model):
        for a, b in zip(*_pair(sum_sf_model, seed=0, runs=10)):
            np.testing.assert_allclose(b.x, a.x, atol=1e-12)
            np.testing.assert_allclose(b.u.sum(axis=1), a.u.sum(axis=1), atol=1e-12)


@pytest.mark.slow
class TestCorpusSweeps:

    @pytest.mark.parametrize("seed", CORPUS_SEEDS)
    def test_state_feedback_costs_match(self, seed):
        model = corpus_model(seed, horizon=10)
        for a, b in zip(*_pair(model, seed=seed, runs=100)):
            np.testing.assert_allclose(b.x, a.x, rtol=PATHWISE_RTOL, atol=PATHWISE_RTOL)
            assert _relative_gap(a.total_cost, b.total_cost) <= PATHWISE_RTOL
            assert b.superposition_residual <= PATHWISE_RTOL

    @pytest.mark.parametrize("seed", CORPUS_SEEDS)
    def test_output_feedback_costs_match(self, seed):
        model = corpus_model(seed, output_feedback=True, horizon=10)
        for a, b in zip(*_pair(model, seed=seed, runs=100)):
            assert _relative_gap(a.total_cost, b.total_cost) <= PATHWISE_RTOL
            assert b.estimate_residual <= 1e-8
            assert b.superposition_residual <= PATHWISE_RTOL
