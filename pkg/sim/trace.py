"""Trace files.

The CSV has one row per scalar, header ``t,run,kind,index,value``, with
``t`` 1-based and ``run`` 0-based. Kinds are ``x``, ``u``, ``y``, ``z``,
``s<i>`` (controller i's local estimate) and ``cost`` (index 0). Values are
written with ``repr`` so they read back bit-exact.

The JSON summary holds the per-run totals and residual maxima.
"""
import csv
import json
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel

from sim.engine import SimulationTrace

PathLike = Union[str, Path]

TRACE_HEADER = ("t", "run", "kind", "index", "value")


class TraceSummary(BaseModel):
    """Aggregates of a batch of traces."""
    profile: str
    seed: int
    runs: int
    horizon: int
    mean_cost: float
    total_costs: List[float]
    max_estimate_residual: Optional[float] = None
    max_superposition_residual: Optional[float] = None


def summarize_traces(traces: Sequence[SimulationTrace], profile: str, seed: int) -> TraceSummary:
    totals = [trace.total_cost for trace in traces]

    def worst(values: Iterable[Optional[float]]) -> Optional[float]:
        present = [v for v in values if v is not None]
        return max(present) if present else None

    return TraceSummary(
        profile=profile,
        seed=seed,
        runs=len(traces),
        horizon=traces[0].horizon if traces else 0,
        mean_cost=float(np.mean(totals)) if totals else 0.0,
        total_costs=totals,
        max_estimate_residual=worst(t.estimate_residual for t in traces),
        max_superposition_residual=worst(t.superposition_residual for t in traces),
    )


def _vector_rows(t: int, run: int, kind: str, vector: np.ndarray) -> Iterator[Tuple]:
    for index, value in enumerate(vector):
        yield t, run, kind, index, repr(float(value))


def trace_rows(trace: SimulationTrace) -> Iterator[Tuple]:
    """CSV rows of one trace in step order."""
    for k in range(trace.horizon):
        t = k + 1
        yield from _vector_rows(t, trace.run, "x", trace.x[k])
        yield from _vector_rows(t, trace.run, "u", trace.u[k])
        if trace.y is not None:
            yield from _vector_rows(t, trace.run, "y", trace.y[k])
        if trace.z is not None:
            yield from _vector_rows(t, trace.run, "z", trace.z[k])
        if trace.s is not None:
            for i, share in enumerate(trace.s[k]):
                yield from _vector_rows(t, trace.run, f"s{i}", share)
        yield t, trace.run, "cost", 0, repr(float(trace.costs[k]))


def default_summary_path(trace_path: PathLike) -> Path:
    """``trace.csv`` -> ``trace.summary.json`` in the same directory."""
    trace_path = Path(trace_path)
    return trace_path.with_name(f"{trace_path.stem}.summary.json")


def save_trace(
    traces: Sequence[SimulationTrace],
    path: PathLike,
    summary: Optional[TraceSummary] = None,
    summary_path: Optional[PathLike] = None,
) -> Path:
    """Write the trace CSV and, if both are given, the JSON summary.

    Returns:
        Path of the CSV written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for trace in traces:
            writer.writerows(trace_rows(trace))
    logger.debug(f"Wrote {len(traces)} trace(s) to {path}")

    if summary is not None and summary_path is not None:
        summary_path = Path(summary_path)
        summary_path.parent.mkdir(parents=True, exist_ok=True)
        summary_path.write_text(json.dumps(summary.model_dump(), indent=2) + "\n", encoding="utf-8")
    return path


def load_trace_rows(path: PathLike) -> List[dict]:
    """Read a trace CSV back as dicts with typed fields."""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return [
            {
                "t": int(row["t"]),
                "run": int(row["run"]),
                "kind": row["kind"],
                "index": int(row["index"]),
                "value": float(row["value"]),
            }
            for row in reader
        ]
