"""
Result records persisted as JSON, one record per document.
"""
import datetime
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from nlsground import __version__
from nlsground.core.models.schemas import GroundStateResult, WaveFunction


class ProfileSamples(BaseModel):
    """Node coordinates and values of a wave function; ``y`` only for 2D."""
    model_config = ConfigDict(extra="forbid")

    x: List[float]
    y: Optional[List[float]] = None
    values: List[float]


class ResultRecord(BaseModel):
    """Run metadata, scalar results and optional profile samples."""
    model_config = ConfigDict(extra="forbid")

    label: str
    spec: Dict[str, Any]
    timestamp: str
    version: str = __version__
    scalars: Dict[str, Optional[float]] = Field(default_factory=dict)
    iterations: Optional[int] = None
    converged: Optional[bool] = None
    tags: Dict[str, str] = Field(default_factory=dict)
    profile: Optional[ProfileSamples] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        return cls.model_validate_json(text)


def now() -> str:
    return datetime.datetime.now().isoformat()


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """JSON has no inf/nan; such scalars are stored as null."""
    if value is None or not np.isfinite(value):
        return None
    return float(value)


def profile_samples(phi: WaveFunction) -> ProfileSamples:
    axes = phi.grid.axes()
    if phi.grid.dim == 1:
        return ProfileSamples(x=axes[0].tolist(), values=phi.values.tolist())
    x, y = phi.grid.mesh()
    return ProfileSamples(x=x.ravel().tolist(), y=y.ravel().tolist(), values=phi.values.ravel().tolist())


def record_from_result(label: str, spec: Dict[str, Any], result: GroundStateResult,
                       extra: Optional[Dict[str, Optional[float]]] = None,
                       include_profile: bool = False) -> ResultRecord:
    """Record of one ground-state solve."""
    scalars = {
        "beta": result.params.beta,
        "sigma": result.params.sigma,
        "energy": result.energy,
        "mu": result.mu,
        "residual": result.residual,
        "peak": result.phi.peak,
        "dt": result.dt,
    }
    scalars.update(extra or {})
    return ResultRecord(
        label=label,
        spec=spec,
        timestamp=now(),
        scalars={key: finite_or_none(value) for key, value in scalars.items()},
        iterations=result.iterations,
        converged=result.converged,
        profile=profile_samples(result.phi) if include_profile else None,
    )
