"""Scenario files.

A scenario is a JSON document with the plant matrices (row-major nested
arrays), the partitions, the horizon and the run settings:

    {
      "A": [[1.0]], "B": [[1.0, 1.0]], "M": [[1.0], [0.0]], "N": [[0.0, 0.0], [1.0, 1.0]],
      "Sigma_x": [[1.0]], "Sigma_w": [[1.0]],
      "controller_partition": [1, 1],
      "horizon": 5, "n": 2,
      "seed": 0, "runs": 100, "profiles": ["centralized-sf", "decentralized-sf"],
      "outputs": {"trace": "trace.csv", "summary": "summary.json"}
    }

Output-feedback scenarios add ``"C"``, ``"Sigma_v"`` and ``"observation_partition"``.
Parsing goes through a pydantic schema so every error carries the offending
field; the parsed model is then handed to ``validate_model``.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import settings
from model.errors import ScenarioParseError
from model.system import Partition, SystemModel, validate_model

Matrix = List[List[float]]
PathLike = Union[str, Path]


class StrategyKind(str, Enum):
    """Strategy selector (CLI ``--profile`` values)."""
    CENTRALIZED_SF = "centralized-sf"
    DECENTRALIZED_SF = "decentralized-sf"
    CENTRALIZED_OF = "centralized-of"
    DECENTRALIZED_OF = "decentralized-of"
    ZERO = "zero"
    LEADER = "leader"

    @classmethod
    def cli_choices(cls) -> List[str]:
        return [kind.value for kind in cls if kind is not cls.LEADER]


class OutputPaths(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    trace: Optional[str] = None
    summary: Optional[str] = None


class ScenarioSchema(BaseModel):
    """On-disk scenario layout."""

    model_config = ConfigDict(extra="forbid")

    A: Matrix
    B: Matrix
    M: Matrix
    N: Matrix
    Sigma_x: Matrix
    Sigma_w: Matrix
    controller_partition: List[int]
    horizon: int = Field(ge=1)
    n: int = Field(ge=1)
    state_partition: Optional[List[int]] = None
    C: Optional[Matrix] = None
    Sigma_v: Optional[Matrix] = None
    observation_partition: Optional[List[int]] = None
    seed: int = Field(settings.default_seed, ge=0, lt=2**64)
    runs: int = Field(settings.default_runs, ge=1)
    profiles: List[StrategyKind] = Field(default_factory=list)
    outputs: OutputPaths = Field(default_factory=OutputPaths)

    @field_validator("A", "B", "M", "N", "Sigma_x", "Sigma_w", "C", "Sigma_v")
    @classmethod
    def _rectangular(cls, value: Optional[Matrix]) -> Optional[Matrix]:
        if value is None:
            return value
        if not value or not value[0]:
            raise ValueError("matrix must have at least one row and one column")
        widths = {len(row) for row in value}
        if len(widths) != 1:
            raise ValueError(f"ragged matrix: row lengths {sorted(widths)}")
        return value

    @model_validator(mode="after")
    def _output_feedback_complete(self) -> "ScenarioSchema":
        if self.C is not None:
            for name in ("Sigma_v", "observation_partition"):
                if getattr(self, name) is None:
                    raise ValueError(f"missing field '{name}' required when 'C' is given")
        else:
            for name in ("Sigma_v", "observation_partition"):
                if getattr(self, name) is not None:
                    raise ValueError(f"field '{name}' given without 'C'")
        return self


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated model plus its run settings.

    Attributes:
        model: Validated system model.
        seed: Base seed of the noise streams.
        num_runs: Number of Monte Carlo runs.
        profiles: Strategy profiles the scenario asks for.
        trace_path: Where ``simulate`` writes the trace CSV.
        summary_path: Where ``simulate`` writes the JSON summary.
    """
    model: SystemModel
    seed: int = settings.default_seed
    num_runs: int = settings.default_runs
    profiles: Tuple[StrategyKind, ...] = field(default_factory=tuple)
    trace_path: Optional[str] = None
    summary_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.num_runs < 1:
            raise ValueError(f"num_runs must be >= 1, got {self.num_runs}")
        object.__setattr__(self, "profiles", tuple(StrategyKind(p) for p in self.profiles))


def _field_of(error: Dict[str, Any]) -> Optional[str]:
    loc = [str(part) for part in error.get("loc", ())]
    if loc:
        return ".".join(loc)
    # model-level validator: the message names the field
    message = error.get("msg", "")
    if "'" in message:
        return message.split("'")[1]
    return None


def _line_of(text: str, key: Optional[str]) -> Optional[int]:
    if not key:
        return None
    needle = f'"{key.split(".")[0]}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def parse_scenario(text: str, source: Optional[str] = None) -> ScenarioConfig:
    """Parse scenario JSON text.

    Raises:
        ScenarioParseError: Malformed JSON or schema violations.
        ModelValidationError: The matrices parse but break a model invariant.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, path=source, line=e.lineno) from e

    try:
        schema = ScenarioSchema.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        name = _field_of(first)
        raise ScenarioParseError(
            first.get("msg", "invalid value"), path=source,
            line=_line_of(text, name), field=name,
        ) from e

    state_partition = schema.state_partition
    if state_partition is None and schema.n == 1:
        state_partition = [len(schema.A)]

    model = SystemModel(
        A=schema.A, B=schema.B, M=schema.M, N=schema.N,
        controller_partition=Partition(tuple(schema.controller_partition)),
        horizon=schema.horizon, n=schema.n,
        Sigma_x=schema.Sigma_x, Sigma_w=schema.Sigma_w,
        state_partition=None if state_partition is None else Partition(tuple(state_partition)),
        C=schema.C,
        observation_partition=(
            None if schema.observation_partition is None
            else Partition(tuple(schema.observation_partition))
        ),
        Sigma_v=schema.Sigma_v,
    )
    return ScenarioConfig(
        model=validate_model(model),
        seed=schema.seed,
        num_runs=schema.runs,
        profiles=tuple(schema.profiles),
        trace_path=schema.outputs.trace,
        summary_path=schema.outputs.summary,
    )


def load_scenario(path: PathLike) -> ScenarioConfig:
    """Read and validate a scenario file.

    Args:
        path: JSON scenario file.

    Returns:
        The parsed ``ScenarioConfig``.

    Raises:
        ScenarioParseError: File missing, unreadable or malformed.
        ModelValidationError: Model invariants violated.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario: {e.strerror}", path=str(path)) from e
    config = parse_scenario(text, source=str(path))
    logger.debug(f"Loaded scenario {path}: n={config.model.n}, T={config.model.horizon}, "
                 f"mode={config.model.mode.value}")
    return config


def _rows(matrix: Any) -> Matrix:
    return [[float(v) for v in row] for row in matrix]


def scenario_to_dict(config: ScenarioConfig) -> Dict[str, Any]:
    """JSON-ready representation; floats survive a dump/load round trip exactly."""
    model = config.model
    data: Dict[str, Any] = {
        "A": _rows(model.A),
        "B": _rows(model.B),
        "M": _rows(model.M),
        "N": _rows(model.N),
        "Sigma_x": _rows(model.Sigma_x),
        "Sigma_w": _rows(model.Sigma_w),
        "controller_partition": list(model.controller_partition.sizes),
        "horizon": model.horizon,
        "n": model.n,
    }
    if model.state_partition is not None:
        data["state_partition"] = list(model.state_partition.sizes)
    if model.C is not None:
        data["C"] = _rows(model.C)
        data["Sigma_v"] = _rows(model.Sigma_v)
        data["observation_partition"] = list(model.observation_partition.sizes)
    data["seed"] = config.seed
    data["runs"] = config.num_runs
    data["profiles"] = [kind.value for kind in config.profiles]
    outputs = {"trace": config.trace_path, "summary": config.summary_path}
    data["outputs"] = {k: v for k, v in outputs.items() if v is not None}
    return data


def save_scenario(config: ScenarioConfig, path: PathLike) -> Path:
    """Write ``config`` as a scenario file and return the path written."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(scenario_to_dict(config), indent=2) + "\n", encoding="utf-8")
    return path
