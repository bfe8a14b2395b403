"""Scenario file parsing and writing."""
import json

import numpy as np
import pytest

from model.errors import ModelValidationError, ScenarioParseError, ViolationKind
from model.scenario import (
    ScenarioConfig,
    StrategyKind,
    load_scenario,
    parse_scenario,
    save_scenario,
    scenario_to_dict,
)
from tests.conftest import corpus_model, write_scenario

SCALAR = {
    "A": [[1.0]], "B": [[1.0]], "M": [[1.0], [0.0]], "N": [[0.0], [1.0]],
    "Sigma_x": [[1.0]], "Sigma_w": [[0.0]],
    "controller_partition": [1], "horizon": 2, "n": 1,
}


def _text(**changes) -> str:
    data = dict(SCALAR)
    data.update(changes)
    return json.dumps(data, indent=2)


class TestParseScenario:

    def test_scalar_scenario(self):
        config = parse_scenario(_text())
        assert config.model.horizon == 2
        assert config.model.n == 1
        assert config.model.state_partition.sizes == (1,)
        assert config.num_runs == 100
        assert config.profiles == ()

    def test_run_settings(self):
        config = parse_scenario(_text(seed=7, runs=3, profiles=["centralized-sf", "zero"],
                                      outputs={"trace": "t.csv"}))
        assert config.seed == 7
        assert config.num_runs == 3
        assert config.profiles == (StrategyKind.CENTRALIZED_SF, StrategyKind.ZERO)
        assert config.trace_path == "t.csv"
        assert config.summary_path is None

    def test_c_without_sigma_v(self):
        text = _text(C=[[1.0]], observation_partition=[1])
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(text)
        assert exc.value.field == "Sigma_v"

    def test_sigma_v_without_c(self):
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(_text(Sigma_v=[[1.0]]))
        assert exc.value.field == "Sigma_v"

    def test_malformed_json_reports_line(self):
        text = '{\n  "A": [[1.0]],\n  "B": [[1.0]\n}'
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(text, source="bad.json")
        assert exc.value.line is not None
        assert exc.value.path == "bad.json"

    def test_unknown_key(self):
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(_text(gamma=[[1.0]]))
        assert exc.value.field == "gamma"

    def test_field_line_located(self):
        text = _text(horizon=0)
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(text)
        assert exc.value.field == "horizon"
        assert '"horizon"' in text.splitlines()[exc.value.line - 1]

    def test_ragged_matrix(self):
        text = _text(A=[[1.0, 2.0], [3.0]])
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(text, source="ragged.json")
        assert exc.value.field == "A"
        assert '"A"' in text.splitlines()[exc.value.line - 1]
        assert "ragged" in str(exc.value)

    def test_empty_matrix(self):
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(_text(Sigma_w=[[]]))
        assert exc.value.field == "Sigma_w"

    def test_nan_entry(self):
        text = _text(A=[[float("nan")]])
        assert "NaN" in text
        with pytest.raises(ModelValidationError) as exc:
            parse_scenario(text)
        assert ViolationKind.NOT_FINITE in exc.value.kinds()

    def test_unknown_profile(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario(_text(profiles=["optimal"]))

    def test_model_invariants_checked(self):
        with pytest.raises(ModelValidationError):
            parse_scenario(_text(Sigma_w=[[-1.0]]))

    def test_diagnostic_payload(self):
        with pytest.raises(ScenarioParseError) as exc:
            parse_scenario(_text(gamma=1), source="s.json")
        payload = exc.value.to_dict()
        assert payload["error"] == "ScenarioParseError"
        assert payload["path"] == "s.json"
        assert payload["field"] == "gamma"


class TestScenarioFiles:

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioParseError) as exc:
            load_scenario(tmp_path / "absent.json")
        assert "absent.json" in str(exc.value)

    def test_round_trip_is_exact(self, tmp_path):
        model = corpus_model(3, output_feedback=True)
        path = write_scenario(tmp_path, model, seed=11, runs=5,
                              profiles=["centralized-of", "decentralized-of"], trace="out.csv")
        config = load_scenario(path)
        assert config.model == model
        assert config.seed == 11
        assert config.num_runs == 5
        assert config.trace_path == "out.csv"
        assert scenario_to_dict(config) == json.loads(path.read_text())

    def test_creates_parent_directory(self, tmp_path, sum_sf_model):
        path = save_scenario(ScenarioConfig(model=sum_sf_model), tmp_path / "nested" / "s.json")
        assert path.exists()
        np.testing.assert_array_equal(load_scenario(path).model.B, sum_sf_model.B)

    def test_num_runs_positive(self, sum_sf_model):
        with pytest.raises(ValueError):
            ScenarioConfig(model=sum_sf_model, num_runs=0)
