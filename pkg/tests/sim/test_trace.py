"""Trace CSV and summary files."""
import json

import numpy as np
import pytest

from sim.engine import simulate
from sim.trace import TRACE_HEADER, load_trace_rows, save_trace, summarize_traces
from strategies import create_profile


@pytest.fixture
def of_traces(sum_of_model):
    profile = create_profile("decentralized-of", sum_of_model)
    return simulate(sum_of_model, profile, seed=3, runs=2)


class TestTraceCsv:

    def test_header(self, tmp_path, of_traces):
        path = save_trace(of_traces, tmp_path / "trace.csv")
        assert path.read_text().splitlines()[0] == ",".join(TRACE_HEADER)

    def test_time_is_one_based(self, tmp_path, of_traces, sum_of_model):
        rows = load_trace_rows(save_trace(of_traces, tmp_path / "trace.csv"))
        times = {row["t"] for row in rows}
        assert times == set(range(1, sum_of_model.horizon + 1))
        assert {row["run"] for row in rows} == {0, 1}

    def test_kinds(self, tmp_path, of_traces):
        rows = load_trace_rows(save_trace(of_traces, tmp_path / "trace.csv"))
        assert {row["kind"] for row in rows} == {"x", "u", "y", "z", "s0", "s1", "cost"}

    def test_values_reload_exactly(self, tmp_path, of_traces):
        rows = load_trace_rows(save_trace(of_traces, tmp_path / "trace.csv"))
        trace = of_traces[1]
        x = np.zeros_like(trace.x)
        cost = np.zeros_like(trace.costs)
        for row in rows:
            if row["run"] != 1:
                continue
            if row["kind"] == "x":
                x[row["t"] - 1, row["index"]] = row["value"]
            elif row["kind"] == "cost":
                cost[row["t"] - 1] = row["value"]
        np.testing.assert_array_equal(x, trace.x)
        np.testing.assert_array_equal(cost, trace.costs)

    def test_state_feedback_rows(self, tmp_path, sum_sf_model):
        traces = simulate(sum_sf_model, create_profile("centralized-sf", sum_sf_model), seed=0, runs=1)
        rows = load_trace_rows(save_trace(traces, tmp_path / "out" / "trace.csv"))
        assert {row["kind"] for row in rows} == {"x", "u", "cost"}
        # T * (d_x + d_u + 1)
        assert len(rows) == 5 * 5


class TestSummary:

    def test_summary_file(self, tmp_path, of_traces):
        summary = summarize_traces(of_traces, "decentralized-of", seed=3)
        save_trace(of_traces, tmp_path / "trace.csv", summary=summary,
                   summary_path=tmp_path / "summary.json")
        data = json.loads((tmp_path / "summary.json").read_text())
        assert data["runs"] == 2
        assert data["profile"] == "decentralized-of"
        assert data["total_costs"] == [t.total_cost for t in of_traces]
        assert data["mean_cost"] == pytest.approx(np.mean(data["total_costs"]))
        assert data["max_estimate_residual"] <= 1e-8

    def test_missing_residuals(self, sum_sf_model):
        traces = simulate(sum_sf_model, create_profile("zero", sum_sf_model), seed=0, runs=2)
        summary = summarize_traces(traces, "zero", seed=0)
        assert summary.max_estimate_residual is None
        assert summary.max_superposition_residual is None
        assert summary.horizon == 5
