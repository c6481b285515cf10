"""
Data schemas for nlsground.
Defines grids, potentials, wave functions, solver results and the
approximation records produced by the asymptotic and regime modules.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from nlsground.config import settings
from nlsground.core.errors import InvalidInputError, InvalidParamsError

Number = Union[int, float]


def _as_tuple(value: Union[Number, Sequence[Number]], dim: int, cast=float) -> tuple:
    if np.ndim(value) == 0:
        return tuple(cast(value) for _ in range(dim))
    items = tuple(cast(v) for v in value)
    if len(items) == 1 and dim > 1:
        return items * dim
    return items


@dataclass(frozen=True)
class Grid:
    """Uniform tensor-product grid of interior points with zero Dirichlet boundary."""
    dim: int
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    n: Tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvalidInputError(f"Grid dimension must be 1 or 2, got {self.dim}")
        object.__setattr__(self, "lower", _as_tuple(self.lower, self.dim))
        object.__setattr__(self, "upper", _as_tuple(self.upper, self.dim))
        object.__setattr__(self, "n", _as_tuple(self.n, self.dim, int))
        if not (len(self.lower) == len(self.upper) == len(self.n) == self.dim):
            raise InvalidInputError("Grid bounds and point counts must match the dimension")
        for lo, up, count in zip(self.lower, self.upper, self.n):
            if not (np.isfinite(lo) and np.isfinite(up)) or up <= lo:
                raise InvalidInputError(f"Grid requires upper > lower, got ({lo}, {up})")
            if count < 3:
                raise InvalidInputError(f"Grid requires at least 3 interior points, got {count}")

    @classmethod
    def uniform(
        cls,
        lower: Union[Number, Sequence[Number]],
        upper: Union[Number, Sequence[Number]],
        n: Union[int, Sequence[int]],
        dim: int = 1,
    ) -> "Grid":
        """Build a grid, broadcasting scalar bounds and counts to every direction."""
        return cls(dim=dim, lower=lower, upper=upper, n=n)

    @property
    def h(self) -> Tuple[float, ...]:
        return tuple((up - lo) / (count + 1) for lo, up, count in zip(self.lower, self.upper, self.n))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.n)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def center(self) -> Tuple[float, ...]:
        return tuple(0.5 * (lo + up) for lo, up in zip(self.lower, self.upper))

    def axes(self) -> List[np.ndarray]:
        """Interior node coordinates along each direction."""
        return [lo + step * np.arange(1, count + 1)
                for lo, step, count in zip(self.lower, self.h, self.n)]

    def mesh(self) -> List[np.ndarray]:
        """Coordinate arrays of shape ``self.shape`` (matrix indexing)."""
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def scaled(self, factor: float) -> "Grid":
        """The same node layout with every coordinate multiplied by ``factor``."""
        return Grid(self.dim, tuple(lo * factor for lo in self.lower),
                    tuple(up * factor for up in self.upper), self.n)

    def describe(self) -> Dict[str, Any]:
        return {"dim": self.dim, "lower": list(self.lower), "upper": list(self.upper), "n": list(self.n)}


class PotentialKind(str, Enum):
    HARMONIC = "harmonic"
    BOX = "box"
    LATTICE = "lattice"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PotentialSpec:
    """Symbolic description of the external potential V(x)."""
    kind: PotentialKind
    gamma: Tuple[float, ...] = ()
    amplitude: float = 0.0
    wavenumber: float = 0.0
    values: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        object.__setattr__(self, "gamma", _as_tuple(self.gamma, 1) if np.ndim(self.gamma) == 0
                           else tuple(float(g) for g in self.gamma))
        if self.kind in (PotentialKind.HARMONIC, PotentialKind.LATTICE):
            if not self.gamma or any(not np.isfinite(g) or g <= 0 for g in self.gamma):
                raise InvalidParamsError(f"Trap frequencies must be positive, got {self.gamma}")
        if self.kind == PotentialKind.LATTICE and self.amplitude < 0:
            raise InvalidParamsError(f"Lattice amplitude must be nonnegative, got {self.amplitude}")
        if self.kind == PotentialKind.CUSTOM:
            if self.values is None:
                raise InvalidInputError("Custom potential requires sampled values")
            samples = np.array(self.values, dtype=float)
            samples.flags.writeable = False
            object.__setattr__(self, "values", samples)

    @classmethod
    def harmonic(cls, gamma: Union[Number, Sequence[Number]]) -> "PotentialSpec":
        return cls(PotentialKind.HARMONIC, gamma=gamma)

    @classmethod
    def box(cls) -> "PotentialSpec":
        return cls(PotentialKind.BOX)

    @classmethod
    def lattice(cls, gamma: Union[Number, Sequence[Number]], amplitude: float,
                wavenumber: float) -> "PotentialSpec":
        return cls(PotentialKind.LATTICE, gamma=gamma, amplitude=amplitude, wavenumber=wavenumber)

    @classmethod
    def custom(cls, values: np.ndarray) -> "PotentialSpec":
        return cls(PotentialKind.CUSTOM, values=values)

    def gammas(self, dim: int) -> Tuple[float, ...]:
        """Per-direction frequencies broadcast to ``dim`` directions."""
        gammas = _as_tuple(self.gamma, dim)
        if len(gammas) != dim:
            raise InvalidInputError(f"Expected {dim} trap frequencies, got {len(gammas)}")
        return gammas

    def sample(self, grid: Grid) -> np.ndarray:
        """Potential values at the interior nodes of ``grid``."""
        if self.kind == PotentialKind.BOX:
            samples = np.zeros(grid.shape)
        elif self.kind == PotentialKind.CUSTOM:
            if self.values.shape != grid.shape:
                raise InvalidInputError(
                    f"Custom potential shape {self.values.shape} does not match grid {grid.shape}")
            samples = np.array(self.values)
        else:
            coords = grid.mesh()
            samples = sum(0.5 * g ** 2 * x ** 2 for g, x in zip(self.gammas(grid.dim), coords))
            if self.kind == PotentialKind.LATTICE:
                samples = samples + self.amplitude * sum(
                    np.sin(self.wavenumber * np.pi * x) ** 2 for x in coords)
        if not np.all(np.isfinite(samples)) or np.any(samples < 0):
            raise InvalidInputError("Potential samples must be finite and nonnegative")
        return samples

    def rescaled(self, eps: float) -> "PotentialSpec":
        """The potential eps^2 V(eps x) seen by the rescaled wave function."""
        if self.kind == PotentialKind.HARMONIC:
            return PotentialSpec.harmonic(tuple(g * eps ** 2 for g in self.gamma))
        if self.kind == PotentialKind.LATTICE:
            return PotentialSpec.lattice(tuple(g * eps ** 2 for g in self.gamma),
                                         self.amplitude * eps ** 2, self.wavenumber * eps)
        if self.kind == PotentialKind.BOX:
            return self
        raise InvalidInputError("Sampled potentials cannot be rescaled")

    def describe(self) -> Dict[str, Any]:
        info: Dict[str, Any] = {"kind": self.kind.value}
        if self.gamma:
            info["gamma"] = list(self.gamma)
        if self.kind == PotentialKind.LATTICE:
            info["amplitude"] = self.amplitude
            info["wavenumber"] = self.wavenumber
        return info


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Real grid samples of a wave function."""
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.array(self.values, dtype=float)
        if samples.shape != self.grid.shape:
            raise InvalidInputError(f"Values of shape {samples.shape} do not match grid {self.grid.shape}")
        samples.flags.writeable = False
        object.__setattr__(self, "values", samples)

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> "WaveFunction":
        return WaveFunction(self.grid, values)


@dataclass(frozen=True)
class Params:
    """Interaction strength beta and nonlinearity power sigma."""
    beta: float
    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and np.isfinite(self.sigma)):
            raise InvalidParamsError(f"Parameters must be finite, got beta={self.beta}, sigma={self.sigma}")
        if self.sigma < 0:
            raise InvalidParamsError(f"sigma must be nonnegative, got {self.sigma}")


@dataclass
class FlowConfig:
    """Settings of the normalized gradient flow."""
    dt: Optional[float] = None
    tol: float = settings.DEFAULT_TOL
    max_iters: int = settings.DEFAULT_MAX_ITERS
    warm_start: Optional[WaveFunction] = None
    sign_fix: bool = True
    linear_solver: str = "direct"  # "direct" or "cg", 2D only
    record_energy: bool = False

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise InvalidParamsError(f"Time step must be positive, got {self.dt}")
        if not self.tol > 0:
            raise InvalidParamsError(f"Tolerance must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InvalidParamsError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.linear_solver not in ("direct", "cg"):
            raise InvalidParamsError(f"Unknown linear solver '{self.linear_solver}'")


@dataclass
class GroundStateResult:
    """Outcome of a ground-state solve."""
    phi: WaveFunction
    energy: float
    mu: float
    residual: float
    iterations: int
    converged: bool
    params: Params
    dt: float
    energy_trace: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class GaussianProfile:
    """Product Gaussian prod_j (g_j/pi)^(1/4) exp(-g_j x_j^2/2)."""
    gammas: Tuple[float, ...]

    def evaluate(self, *coords: np.ndarray) -> np.ndarray:
        if len(coords) != len(self.gammas):
            raise InvalidInputError(f"Expected {len(self.gammas)} coordinate arrays, got {len(coords)}")
        value = 1.0
        for g, x in zip(self.gammas, coords):
            value = value * (g / np.pi) ** 0.25 * np.exp(-0.5 * g * np.asarray(x, dtype=float) ** 2)
        return value


@dataclass(frozen=True)
class HarmonicWeakEstimate:
    """Two-term small-beta expansion in a harmonic trap."""
    energy: float
    mu: float
    profile: GaussianProfile


@dataclass(frozen=True)
class TfEstimate:
    """Thomas-Fermi approximation in an isotropic harmonic trap."""
    d: int
    gamma: float
    beta: float
    sigma: float
    mu_tf: float
    energy_tf: float
    support_radius: float


@dataclass(frozen=True, eq=False)
class ShootingSolution:
    """Free-boundary solution of the large-sigma harmonic limit."""
    gamma: float
    x_gamma: float
    mu: float
    x: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    norm_residual: float = 0.0


@dataclass(frozen=True)
class BoxWeakEstimate:
    """Two-term small-beta expansion in a box."""
    energy: float
    mu: float
    amplitude: float


@dataclass(frozen=True)
class BoxTfEstimate:
    """Constant Thomas-Fermi state of a box."""
    energy: float
    mu: float
    amplitude: float


@dataclass(frozen=True, eq=False)
class LayerProfile:
    """Monotone sample table of the boundary-layer solution on [0, x_cut]."""
    sigma: float
    x: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    slope0: float = 0.0
    x_cut: float = 0.0
    x_end: float = 0.0
    tail_rate: float = 0.0
    interpolant: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True, eq=False)
class MatchedEstimate:
    """Matched boundary-layer approximation in a box."""
    lengths: Tuple[float, ...]
    beta: float
    sigma: float
    mu_ma: float
    mu_tf: float
    amplitude: float
    norm_residual: float
    layer: LayerProfile = field(repr=False)


class BoxLimitCase(str, Enum):
    CONSTANT = "constant"
    SINE = "sine"
    PLATEAU = "plateau"


@dataclass(frozen=True)
class BoxSigmaLimit:
    """Large-sigma limit of the 1D box ground state."""
    length: float
    beta: float
    case: BoxLimitCase
    boundary: bool
    divergent: bool
    energy: Optional[float]
    mu: Optional[float]


@dataclass(frozen=True)
class PlateauEstimate:
    """Finite-sigma plateau model of the 1D box ground state."""
    length: float
    beta: float
    sigma: float
    x_c: float
    amplitude: float
    mu: float


class Verdict(str, Enum):
    EXISTS = "Exists"
    EXISTS_UNIQUE = "ExistsUnique"
    NOT_EXISTS = "NotExists"
    CONDITIONAL = "ConditionalOnBestConstant"


@dataclass(frozen=True)
class ExistenceVerdict:
    """Existence verdict with the clause that decided it."""
    verdict: Verdict
    clause: str
    d: int
    sigma: float
    beta: float
    threshold: Optional[float] = None
    threshold_factor: Optional[float] = None

    @property
    def solvable(self) -> bool:
        return self.verdict in (Verdict.EXISTS, Verdict.EXISTS_UNIQUE)


@dataclass(frozen=True)
class BestConstant:
    """Numerical Gagliardo-Nirenberg best constant."""
    d: int
    sigma: float
    value: float
    method_tag: str
    half_width: float
    n: int


class Classification(str, Enum):
    LINEAR_LIMIT = "LinearLimit"
    FLAT_TOP = "FlatTop"
    THOMAS_FERMI = "ThomasFermi"
    UNRESOLVED = "Unresolved"


@dataclass
class BifurcationReport:
    """Peaks and plateau measures of a sigma scan and their classification."""
    potential: Dict[str, Any]
    beta: float
    sigma_list: List[float]
    peak_values: List[float]
    plateau_widths: List[float]
    linear_distances: List[float]
    linear_peak: float
    classification: Classification
    threshold_parameter: float
    converged: List[bool] = field(default_factory=list)
    results: List[GroundStateResult] = field(default_factory=list, repr=False)
