"""
Scenario configuration files.

A scenario file is TOML with three sections: ``[params]`` for hybrid
parameters, ``[geometry]`` for the electrostatics layout and ``[scenario]`` for
the run itself, optionally with a ``[scenario.sweep]`` table.
"""

import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from hybridlink.errors import ConfigParseError
from hybridlink.models.schemas import DephasingModel, ProtocolKind

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class SweepSpec(BaseModel):
    """Linear sweep of one variable."""

    model_config = ConfigDict(extra="forbid")

    variable: str = Field(..., description="Name of the swept quantity")
    start: float
    stop: float
    points: int = Field(..., ge=2, description="Number of samples, endpoints included")

    @field_validator("start", "stop")
    @classmethod
    def check_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("sweep bounds must be finite")
        return v

    def values(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.points)


class ScenarioSection(BaseModel):
    """Options of one scenario run. Unset options fall back to scenario defaults."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    out: Optional[Path] = None
    seed: Optional[int] = Field(default=None, ge=0)
    tol: Optional[float] = Field(default=None, gt=0)
    n_bar: Optional[float] = Field(default=None, ge=0)
    n_bar_values: Optional[list[float]] = None
    nbar_max: Optional[float] = Field(default=None, gt=0)
    points: Optional[int] = Field(default=None, ge=2)
    n_trials: Optional[int] = Field(default=None, ge=0)
    protocol: Optional[ProtocolKind] = None
    time: Optional[float] = Field(default=None, gt=0)
    alpha2: Optional[float] = Field(default=None, ge=0)
    x_values: Optional[list[float]] = None
    heights: Optional[list[float]] = None
    distances: Optional[list[float]] = None
    spacing: Optional[float] = Field(default=None, gt=0)
    dipole: Optional[float] = None
    eps_r: Optional[float] = Field(default=None, ge=1)
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    with_t2: Optional[bool] = None
    dephasing_model: Optional[DephasingModel] = None
    workers: Optional[int] = Field(default=None, ge=1)
    sweep: Optional[SweepSpec] = None

    def explicit(self) -> dict[str, Any]:
        """Options that were actually set."""
        return self.model_dump(exclude_none=True)


class ScenarioConfig(BaseModel):
    """Parsed scenario file."""

    model_config = ConfigDict(extra="forbid")

    params: dict[str, Any] = Field(default_factory=dict)
    geometry: dict[str, Any] = Field(default_factory=dict)
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)


def parse_config_text(text: str, source: str = "<string>") -> ScenarioConfig:
    """
    Parse scenario TOML text.

    Raises:
        ConfigParseError: If the text is not valid TOML or has unknown sections
            or keys.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigParseError(f"{source}: {e}") from e
    try:
        return ScenarioConfig(**data)
    except ValidationError as e:
        raise ConfigParseError(f"{source}: {e}") from e


def load_config(path: Path) -> ScenarioConfig:
    """
    Load a scenario file.

    Raises:
        ConfigParseError: If the file cannot be read or parsed.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read {path}: {e}") from e
    return parse_config_text(text, str(path))


def parse_value(raw: str) -> Any:
    """Interpret a command-line value with TOML rules, falling back to a plain string."""
    try:
        return tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        return raw


def apply_assignments(config: ScenarioConfig, assignments: Sequence[str]) -> ScenarioConfig:
    """
    Apply ``key=value`` overrides to a parsed configuration.

    Keys are parameter names, or ``geometry.<key>`` / ``scenario.<key>`` for the
    other sections.

    Raises:
        ConfigParseError: If an assignment has no '=' or an invalid result.
    """
    params = dict(config.params)
    geometry = dict(config.geometry)
    scenario = config.scenario.model_dump(exclude_none=True)

    for item in assignments:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigParseError(f"expected KEY=VALUE, got {item!r}")
        section, dot, name = key.partition(".")
        value = parse_value(raw.strip())
        if dot and section == "geometry":
            geometry[name] = value
        elif dot and section == "scenario":
            scenario[name] = value
        elif dot and section == "params":
            params[name] = value
        else:
            params[key] = value

    try:
        return ScenarioConfig(params=params, geometry=geometry, scenario=scenario)
    except ValidationError as e:
        raise ConfigParseError(str(e)) from e


def with_scenario_options(config: ScenarioConfig, **options: Any) -> ScenarioConfig:
    """
    Override [scenario] options, ignoring those passed as None.

    Raises:
        ConfigParseError: If an option value is invalid.
    """
    scenario = config.scenario.model_dump(exclude_none=True)
    scenario.update({k: v for k, v in options.items() if v is not None})
    try:
        return config.model_copy(update={"scenario": ScenarioSection(**scenario)})
    except ValidationError as e:
        raise ConfigParseError(str(e)) from e
