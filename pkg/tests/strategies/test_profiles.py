"""Centralized, zero and leader profiles, and the profile factory."""
import numpy as np
import pytest

from model.errors import ModelValidationError, NonlinearProfileError, NotSubstitutableError
from model.scenario import StrategyKind
from model.system import FeedbackMode
from sim.engine import simulate
from strategies import (
    CentralizedOFProfile,
    CentralizedSFProfile,
    InformationStructure,
    LeaderProfile,
    SignalAccess,
    SignalKind,
    StrategyProfile,
    Synthesis,
    ZeroProfile,
    create_profile,
)
from strategies.base import StepView


class TestInformationStructure:

    def test_local_state_feedback(self):
        info = InformationStructure.local(1, FeedbackMode.STATE)
        assert info.allows(SignalKind.STATE, 1, 3, 3)
        assert not info.allows(SignalKind.STATE, 1, 2, 3)
        assert not info.allows(SignalKind.STATE, 0, 3, 3)
        assert not info.allows(SignalKind.CONTROL, 1, 2, 3)

    def test_local_output_feedback(self):
        info = InformationStructure.local(0, FeedbackMode.OUTPUT)
        assert info.allows(SignalKind.OBSERVATION, 0, 0, 3)
        assert info.allows(SignalKind.CONTROL, 0, 2, 3)
        assert not info.allows(SignalKind.CONTROL, 0, 3, 3)
        assert not info.allows(SignalKind.OBSERVATION, 1, 3, 3)
        assert not info.allows(SignalKind.OBSERVATION, 0, 4, 3)

    def test_centralized_output_feedback(self):
        info = InformationStructure.centralized(0, FeedbackMode.OUTPUT)
        assert info.allows(SignalKind.OBSERVATION, 5, 1, 2)
        assert info.allows(SignalKind.CONTROL, 5, 1, 2)
        assert not info.allows(SignalKind.STATE, 0, 2, 2)

    def test_empty(self):
        info = InformationStructure.empty(0)
        assert not info.allows(SignalKind.STATE, 0, 0, 0)
        assert info.describe() == "{}"

    def test_enlarged(self):
        info = InformationStructure.local(0, FeedbackMode.STATE).enlarged(
            SignalAccess(SignalKind.STATE, frozenset({1}), history=True)
        )
        assert info.allows(SignalKind.STATE, 1, 0, 2)
        assert info.describe() == "{x[0]:current; x[1]:history}"


class TestCentralizedProfiles:

    def test_state_feedback_action(self, sf_model):
        synthesis = Synthesis.solve(sf_model)
        profile = CentralizedSFProfile(synthesis)
        x = np.ones(sf_model.dx)
        u = np.concatenate([p.act(None, StepView(k=0, x=x))[0] for p in profile.policies])
        np.testing.assert_allclose(u, synthesis.gains.K[0] @ x)
        assert profile.reproduces_centralized
        assert profile.memory_dim == sf_model.dx

    def test_output_feedback_mode_required(self, sum_sf_model):
        with pytest.raises(ModelValidationError) as exc:
            CentralizedOFProfile(Synthesis.solve(sum_sf_model))
        assert exc.value.violations[0].field == "profile"

    def test_output_feedback_pathwise_actions(self, sum_of_model):
        profile = create_profile("centralized-of", sum_of_model)
        trace = simulate(sum_of_model, profile, seed=3, runs=1)[0]
        for k in range(sum_of_model.horizon):
            np.testing.assert_allclose(trace.u[k], profile.gains.K[k] @ trace.z[k], atol=1e-12)


class TestBaselines:

    def test_zero_profile(self, sum_of_model):
        profile = ZeroProfile(Synthesis.solve(sum_of_model))
        trace = simulate(sum_of_model, profile, seed=0, runs=1)[0]
        np.testing.assert_array_equal(trace.u, 0.0)
        assert profile.memory_dim == sum_of_model.dy
        assert not profile.reproduces_centralized
        assert trace.superposition_residual is None

    def test_leader_reproduces_centralized(self, sf_model):
        synthesis = Synthesis.solve(sf_model)
        leader = sf_model.n - 1
        profile = create_profile(StrategyKind.LEADER, sf_model, synthesis, leader=leader)
        for trace in simulate(sf_model, profile, seed=1, runs=2):
            assert trace.superposition_residual <= 1e-8
            for i in range(sf_model.n):
                if i != leader:
                    np.testing.assert_array_equal(trace.u[:, sf_model.controller_partition.slice(i)], 0.0)

    def test_leader_output_feedback(self, of_model):
        profile = LeaderProfile(Synthesis.solve(of_model), leader=0)
        for trace in simulate(of_model, profile, seed=2, runs=2):
            assert trace.superposition_residual <= 1e-8

    def test_leader_index_checked(self, sum_sf_model):
        with pytest.raises(IndexError):
            LeaderProfile(Synthesis.solve(sum_sf_model), leader=2)

    def test_leader_needs_substitutability(self, non_substitutable_model):
        with pytest.raises(NotSubstitutableError):
            LeaderProfile(Synthesis.solve(non_substitutable_model))


class TestFactory:

    @pytest.mark.parametrize("kind", ["centralized-sf", "decentralized-sf", "zero"])
    def test_state_feedback_kinds(self, sum_sf_model, kind):
        profile = create_profile(kind, sum_sf_model)
        assert profile.kind.value == kind
        assert len(profile.policies) == sum_sf_model.n

    def test_shared_synthesis(self, sum_of_model):
        synthesis = Synthesis.solve(sum_of_model)
        a = create_profile("centralized-of", sum_of_model, synthesis)
        b = create_profile("decentralized-of", sum_of_model, synthesis)
        assert a.synthesis is b.synthesis

    def test_synthesis_model_checked(self, sum_sf_model, scalar_model):
        with pytest.raises(ValueError):
            create_profile("zero", sum_sf_model, Synthesis.solve(scalar_model))

    def test_unknown_kind(self, sum_sf_model):
        with pytest.raises(ValueError):
            create_profile("optimal", sum_sf_model)

    def test_policy_count_checked(self, sum_sf_model):
        synthesis = Synthesis.solve(sum_sf_model)
        with pytest.raises(ValueError):
            StrategyProfile(synthesis, (), ())

    def test_base_profile_has_no_linear_form(self, sum_sf_model):
        synthesis = Synthesis.solve(sum_sf_model)
        zero = ZeroProfile(synthesis)

        class Opaque(StrategyProfile):
            kind = StrategyKind.ZERO

        opaque = Opaque(synthesis, zero.policies, zero.information)
        assert not opaque.is_linear
        with pytest.raises(NonlinearProfileError):
            opaque.linear_form(0)
