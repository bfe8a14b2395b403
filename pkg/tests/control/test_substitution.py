"""Open-loop substitutability, substitution maps and the model generator.

Covers:
- Lambda^i on hand-computed models
- failing verdicts and the pairwise residual table
- exactness of apply_substitution
- every generated model is substitutable; broken copies are not
"""
import time

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st
from scipy import linalg

import control.generator as generator
from control.generator import break_substitutability, generate_substitutable
from control.substitution import (
    apply_substitution,
    check_substitutable,
    substitution_map,
    substitution_tolerance,
)
from model.errors import NotSubstitutableError, RankFailureError
from model.system import Partition, SystemModel, validate_model

GENERATOR_SEEDS = range(1, 101)


def _row_model() -> SystemModel:
    """d_x = 1, B = [1 2], N = 0: both controllers move the same scalar."""
    return validate_model(SystemModel(
        A=[[1.0]], B=[[1.0, 2.0]], M=[[1.0]], N=[[0.0, 0.0]],
        controller_partition=Partition((1, 1)), horizon=2, n=2,
        Sigma_x=[[1.0]], Sigma_w=[[1.0]],
    ))


def _generated(seed: int) -> SystemModel:
    return generate_substitutable(
        d_x=2 + seed % 4, d_c=1 + seed % 3, width=1 + seed % 2, n=1 + seed % 4, seed=seed,
    )


class TestSubstitutionMaps:

    def test_sum_of_actions(self, sum_sf_model):
        subs = check_substitutable(sum_sf_model)
        assert subs.substitutable
        for lam in subs.lambdas:
            np.testing.assert_allclose(lam, [[1.0, 1.0]], atol=1e-12)

    def test_single_controller_is_identity(self, scalar_model):
        subs = check_substitutable(scalar_model)
        assert subs.substitutable
        np.testing.assert_allclose(subs.lambdas[0], np.eye(1))

    def test_scaled_columns(self):
        subs = check_substitutable(_row_model())
        assert subs.substitutable
        np.testing.assert_allclose(subs.lambdas[0], [[1.0, 2.0]], atol=1e-12)
        np.testing.assert_allclose(subs.lambdas[1], [[0.5, 1.0]], atol=1e-12)

    def test_map_index_checked(self, sum_sf_model):
        with pytest.raises(IndexError):
            substitution_map(sum_sf_model, 2)

    def test_tolerance_scales_with_inputs(self, sum_sf_model):
        assert substitution_tolerance(sum_sf_model) == pytest.approx(1e-8 * (1.0 + 2.0))

    def test_report(self, sum_sf_model):
        report = check_substitutable(sum_sf_model).to_report()
        assert report.substitutable
        assert [c.index for c in report.controllers] == [0, 1]
        assert len(report.pairwise_residuals) == 2


class TestNotSubstitutable:

    def test_orthogonal_inputs(self, non_substitutable_model):
        subs = check_substitutable(non_substitutable_model)
        assert not subs.substitutable
        assert subs.failing() == [0, 1]
        assert subs.pairwise[0, 1] == pytest.approx(1.0)
        assert subs.pairwise[1, 0] == pytest.approx(1.0)
        assert subs.pairwise[0, 0] == 0.0

    def test_require_names_controllers(self, non_substitutable_model):
        with pytest.raises(NotSubstitutableError) as exc:
            check_substitutable(non_substitutable_model).require()
        assert exc.value.controllers == [0, 1]

    def test_apply_refuses(self, non_substitutable_model):
        subs = check_substitutable(non_substitutable_model)
        with pytest.raises(NotSubstitutableError):
            apply_substitution(subs, np.array([1.0, 1.0]), 0)


class TestApplySubstitution:

    def test_sum_of_actions(self, sum_sf_model):
        subs = check_substitutable(sum_sf_model)
        for i in range(2):
            np.testing.assert_allclose(subs.apply(np.array([0.3, -1.2]), i), [-0.9])

    def test_zero_action(self, sum_sf_model):
        subs = check_substitutable(sum_sf_model)
        np.testing.assert_array_equal(apply_substitution(subs, np.zeros(2), 1), [0.0])

    @hyp_settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=30),
           st.lists(st.floats(min_value=-100, max_value=100), min_size=4, max_size=4))
    def test_replicates_joint_action(self, seed, values):
        model = generate_substitutable(d_x=3, d_c=2, width=2, n=2, seed=seed)
        subs = check_substitutable(model)
        u = np.array(values)
        for i in range(model.n):
            v = apply_substitution(subs, u, i)
            scale = 1.0 + np.max(np.abs(u))
            np.testing.assert_allclose(model.B_block(i) @ v, model.B @ u, atol=1e-10 * scale)
            np.testing.assert_allclose(model.N_block(i) @ v, model.N @ u, atol=1e-10 * scale)

    @pytest.mark.parametrize("seed", range(1, 11))
    def test_random_joint_actions(self, seed):
        model = _generated(seed)
        subs = check_substitutable(model)
        rng = np.random.default_rng(seed)
        for u in rng.standard_normal((1000, model.du)) * 10.0:
            bound = 1e-10 * (1.0 + np.max(np.abs(u)))
            for i in range(model.n):
                v = subs.lambdas[i] @ u
                assert np.max(np.abs(model.B @ u - model.B_block(i) @ v)) <= bound
                assert np.max(np.abs(model.N @ u - model.N_block(i) @ v)) <= bound

    def test_projection_onto_block_range(self, sf_model):
        subs = check_substitutable(sf_model)
        for i in range(sf_model.n):
            basis = linalg.orth(sf_model.stacked_block(i))
            projected = basis @ basis.T @ sf_model.stacked
            np.testing.assert_allclose(
                sf_model.stacked_block(i) @ subs.lambdas[i], projected, atol=1e-9
            )


class TestGenerator:

    @pytest.mark.parametrize("seed", GENERATOR_SEEDS)
    def test_generated_models_substitutable(self, seed):
        subs = check_substitutable(_generated(seed))
        assert subs.substitutable
        assert max(subs.residuals) <= 1e-10

    @pytest.mark.parametrize("seed", GENERATOR_SEEDS)
    def test_broken_copy_fails(self, seed):
        model = generate_substitutable(d_x=3, d_c=3, width=1 + seed % 2, n=2, seed=seed)
        broken = break_substitutability(model, seed % 2, seed=seed)
        subs = check_substitutable(broken)
        assert not subs.substitutable
        assert not subs.is_substitutable(seed % 2)

    def test_deterministic(self):
        first = generate_substitutable(d_x=4, d_c=3, width=2, n=3, seed=42, obs_width=1)
        second = generate_substitutable(d_x=4, d_c=3, width=2, n=3, seed=42, obs_width=1)
        other = generate_substitutable(d_x=4, d_c=3, width=2, n=3, seed=43, obs_width=1)
        assert first == second
        assert first != other

    def test_shapes(self):
        model = generate_substitutable(d_x=5, d_c=2, width=2, n=3, seed=1, horizon=7, obs_width=2)
        assert (model.dx, model.dc, model.du, model.dy) == (5, 2, 6, 6)
        assert model.horizon == 7
        assert model.state_partition.sizes == (2, 2, 1)
        assert model.observation_partition.sizes == (2, 2, 2)

    def test_no_state_partition_when_too_few_states(self):
        assert generate_substitutable(d_x=1, d_c=2, width=1, n=2, seed=0).state_partition is None

    def test_rank_impossible(self):
        with pytest.raises(ValueError):
            generate_substitutable(d_x=1, d_c=1, width=3, n=2, seed=0)

    def test_non_positive_dimension(self):
        with pytest.raises(ValueError):
            generate_substitutable(d_x=0, d_c=1, width=1, n=1, seed=0)

    def test_retry_budget(self, monkeypatch):
        monkeypatch.setattr(generator, "_draw_inputs", lambda *args: None)
        with pytest.raises(RankFailureError):
            generate_substitutable(d_x=2, d_c=2, width=1, n=2, seed=0)


@pytest.mark.slow
class TestSoundnessSweep:

    def test_hundred_models_each_way_under_ten_seconds(self):
        start = time.perf_counter()
        for seed in GENERATOR_SEEDS:
            subs = check_substitutable(_generated(seed))
            assert subs.substitutable and max(subs.residuals) <= 1e-10, seed
            model = generate_substitutable(d_x=3, d_c=3, width=1 + seed % 2, n=2, seed=seed)
            broken = break_substitutability(model, seed % 2, seed=seed)
            assert not check_substitutable(broken).substitutable, seed
        assert time.perf_counter() - start < 10.0
