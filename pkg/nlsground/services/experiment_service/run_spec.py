"""
Validated description of one command-line run.

Values come from three sources with precedence flags > config file > defaults.
The config file is flat ``key=value`` text whose keys mirror the flag names.
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from nlsground.config import settings
from nlsground.core.errors import UsageError


class Command(str, Enum):
    SOLVE = "solve"
    SWEEP_BETA = "sweep-beta"
    SWEEP_SIGMA = "sweep-sigma"
    LAYER = "layer"
    SHOOT = "shoot"
    CLASSIFY = "classify"
    REPRODUCE = "reproduce"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    BOTH = "both"


FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8_1d", "fig9", "figA")


class RunSpec(BaseModel):
    """All parameters of a run; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)

    command: Command
    dim: int = Field(1, ge=1, le=3)
    potential: Literal["harmonic", "box", "lattice"] = "harmonic"
    gamma: List[float] = Field(default_factory=lambda: [1.0])
    length: List[float] = Field(default_factory=lambda: [1.0])
    amplitude: float = Field(100.0, ge=0)
    wavenumber: float = 4.0
    beta: float = 0.0
    betas: List[float] = Field(default_factory=list)
    sigma: float = Field(1.0, ge=0)
    sigmas: List[float] = Field(default_factory=list)
    n: Optional[int] = Field(None, ge=3)
    dt: Optional[float] = Field(None, gt=0)
    tol: float = Field(settings.DEFAULT_TOL, gt=0)
    max_iters: int = Field(settings.DEFAULT_MAX_ITERS, ge=1)
    linear_solver: Literal["direct", "cg"] = "direct"
    xcut: float = Field(10.0, gt=0)
    cb: Optional[float] = Field(None, gt=0)
    figure: Optional[str] = None
    profile: bool = False
    continuation: bool = True
    out: str = settings.RESULTS_DIR
    format: OutputFormat = OutputFormat.BOTH
    threads: int = Field(settings.THREADS, ge=1)
    quiet: bool = False

    @field_validator("gamma", "length", "betas", "sigmas", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item for item in value.replace(",", " ").split() if item]
        if isinstance(value, (int, float)):
            return [value]
        return value

    @field_validator("gamma", "length")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if not value or any(v <= 0 for v in value):
            raise ValueError(f"values must be positive, got {value}")
        return value

    @field_validator("sigmas")
    @classmethod
    def _nonnegative(cls, value: List[float]) -> List[float]:
        if any(v < 0 for v in value):
            raise ValueError(f"sigma values must be nonnegative, got {value}")
        return value

    @model_validator(mode="after")
    def _command_requirements(self) -> "RunSpec":
        if self.dim == 3 and self.command != Command.CLASSIFY:
            raise ValueError("dim=3 is only available for classify")
        if self.command == Command.SWEEP_BETA and not self.betas:
            raise ValueError("sweep-beta needs betas")
        if self.command == Command.SWEEP_SIGMA and not self.sigmas:
            raise ValueError("sweep-sigma needs sigmas")
        if self.command == Command.REPRODUCE and self.figure not in FIGURES:
            raise ValueError(f"reproduce needs a figure id from {', '.join(FIGURES)}, got {self.figure}")
        return self

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy of the spec for result records."""
        return self.model_dump(mode="json")


def _normalize_keys(raw: Mapping[str, Any]) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key, value in raw.items():
        name = key.strip().lower().replace("-", "_")
        if name == "no_continuation":
            values["continuation"] = not _truthy(value)
            continue
        if name == "max_iters" and isinstance(value, str):
            value = int(float(value))
        values[name] = value
    return values


def _truthy(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a flat key=value config file.

    Raises:
        UsageError: If the file does not exist
    """
    if not Path(path).is_file():
        raise UsageError(f"Config file not found: {path}")
    return _normalize_keys({k: v for k, v in dotenv_values(path).items() if v is not None})


def build_run_spec(command: str, flags: Mapping[str, Any], config_path: Optional[str] = None) -> RunSpec:
    """Merge flags over the config file over defaults and validate.

    ``flags`` holds only the options given on the command line (``None`` values are dropped).

    Raises:
        UsageError: If the config file is missing
        pydantic.ValidationError: If a value is invalid or a key is unknown
    """
    merged: Dict[str, Any] = {}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update(_normalize_keys({k: v for k, v in flags.items() if v is not None}))
    merged["command"] = command
    return RunSpec(**merged)
