"""Domain value types shared by the solvers, the experiment harness and the CLI."""

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

SPEED_OF_LIGHT = 299_792_458.0


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ── System geometry ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SystemParams:
    """Physical constants and service-region geometry (SI units, powers in W)."""

    f_c: float
    n_eff: float
    sigma2: float
    d: float
    D_x: float
    D_y: float
    x_0: float

    def __post_init__(self):
        for name in ("f_c", "sigma2", "d", "D_x", "D_y"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        if not self.n_eff >= 1:
            raise ValueError(f"n_eff must be >= 1, got {self.n_eff}")
        if not self.x_0 < 0:
            raise ValueError(f"x_0 must be < 0, got {self.x_0}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def guided_wavelength(self) -> float:
        return self.wavelength / self.n_eff

    @property
    def eta(self) -> float:
        return (self.wavelength / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class UserSet:
    """User positions in the z = 0 plane, shape (M, 2), and the per-user power budget."""

    positions: np.ndarray
    p_max: float

    def __post_init__(self):
        pos = _frozen_array(self.positions, float).reshape(-1, 2)
        object.__setattr__(self, "positions", pos)
        if not self.p_max > 0:
            raise ValueError(f"p_max must be > 0, got {self.p_max}")

    @property
    def M(self) -> int:
        return self.positions.shape[0]

    def points(self) -> np.ndarray:
        """3-D coordinates, shape (M, 3)."""
        return np.column_stack([self.positions, np.zeros(self.M)])

    def check_region(self, params: SystemParams) -> None:
        x, y = self.positions[:, 0], self.positions[:, 1]
        if np.any(np.abs(x) > params.D_x) or np.any(np.abs(y) > params.D_y):
            raise ValueError("user positions must lie in [-D_x, D_x] x [-D_y, D_y]")


@dataclass(frozen=True)
class PinchLayout:
    """x-coordinate of the pinching antenna on each of the N waveguides.

    `guided=False` marks a conventional array with no waveguide feed (the ULA
    baseline); its phase vector is all ones.
    """

    x_p: np.ndarray
    guided: bool = True

    def __post_init__(self):
        x = _frozen_array(self.x_p, float).reshape(-1)
        if x.size < 1:
            raise ValueError("a layout needs at least one antenna")
        object.__setattr__(self, "x_p", x)

    @property
    def N(self) -> int:
        return self.x_p.size

    def with_x(self, x_p: np.ndarray) -> "PinchLayout":
        return PinchLayout(x_p=x_p, guided=self.guided)

    def check_region(self, params: SystemParams) -> None:
        if np.any(np.abs(self.x_p) > params.D_x):
            raise ValueError("antenna x-coordinates must lie in [-D_x, D_x]")


@dataclass(frozen=True)
class PowerAlloc:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen_array(self.p, float).reshape(-1)
        if np.any(p < 0):
            raise ValueError("transmit powers must be >= 0")
        object.__setattr__(self, "p", p)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.p, dtype=dtype)

    def feasible(self, p_max: float) -> bool:
        return bool(np.all((self.p >= 0) & (self.p <= p_max)))


@dataclass(frozen=True)
class EffectiveChannel:
    """N x M matrix whose column m is g_m = phi ∘ h_m."""

    G: np.ndarray

    def __post_init__(self):
        G = _frozen_array(self.G, complex)
        if G.ndim != 2:
            raise ValueError(f"G must be 2-D, got shape {G.shape}")
        object.__setattr__(self, "G", G)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.G, dtype=dtype)

    @property
    def N(self) -> int:
        return self.G.shape[0]

    @property
    def M(self) -> int:
        return self.G.shape[1]


@dataclass(frozen=True)
class RateReport:
    """Per-user and total achievable rates; internal unit is nats."""

    per_user_rate: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "per_user_rate", _frozen_array(self.per_user_rate, float))

    @property
    def sum_rate_nats(self) -> float:
        return float(np.sum(self.per_user_rate))

    @property
    def sum_rate_bits(self) -> float:
        return self.sum_rate_nats / math.log(2)


# ── Optimizer types ───────────────────────────────────────────────────────────

class Mode(str, enum.Enum):
    SIC = "sic"
    NSIC = "nsic"


@dataclass(frozen=True)
class AuxState:
    """FP auxiliaries: alpha (M,) and beta (N, M) with column m = beta_m."""

    alpha: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class GdOptions:
    l0: float = 1.0
    l_min: float = 1e-6
    shrink: float = 3.0
    max_sweeps: int = 50

    def __post_init__(self):
        # l_min >= l0 is legal: the search then never moves.
        if not (self.l0 > 0 and self.l_min > 0):
            raise ValueError("step sizes must be > 0")
        if not self.shrink > 1:
            raise ValueError(f"shrink must be > 1, got {self.shrink}")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass(frozen=True)
class BcdOptions:
    mode: Mode = Mode.SIC
    tol: float = 1e-4
    max_iters: int = 100
    gd: GdOptions = field(default_factory=GdOptions)
    optimize_positions_flag: bool = True

    def __post_init__(self):
        # tol = 0 is accepted so a fixed number of passes can be forced.
        if not self.tol >= 0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class BcdResult:
    layout: PinchLayout
    p: PowerAlloc
    trace: np.ndarray
    iterations: int
    converged: bool
    mode: Mode
    surrogate_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_evaluations: int = 0

    @property
    def final_rate(self) -> float:
        return float(self.trace[-1])


# ── Experiment types ──────────────────────────────────────────────────────────

class SweepKind(str, enum.Enum):
    PMAX_SWEEP = "sweep-pmax"
    USER_SWEEP = "sweep-users"
    CONVERGENCE = "convergence"
    SINGLE = "single"


@dataclass(frozen=True)
class SweepSpec:
    kind: SweepKind
    params: SystemParams
    master_seed: int
    n_waveguides: int = 4
    n_users: int = 4
    user_grid: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    waveguide_grid: tuple = (4, 8)
    pmax_dbm: float = 10.0
    pmax_grid_dbm: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    realizations: int = 200
    methods: tuple = ("pass-sic", "pass-nsic", "ula-sic", "ula-nsic")
    bcd: BcdOptions = field(default_factory=BcdOptions)
    multistart: int = 1
    threads: int = 1


@dataclass
class SweepResult:
    """Aggregated rows plus the per-realization records they were reduced from."""

    rows: pd.DataFrame
    per_realization: pd.DataFrame
    convergence: Optional[pd.DataFrame] = None
    master_seed: int = 0


@dataclass
class RunManifest:
    command: str
    config_lines: list
    software_version: str
    wall_time_s: float
    realization_counts: dict

    def to_text(self) -> str:
        header = [
            f"# command = {self.command}",
            f"# software_version = {self.software_version}",
            f"# wall_time_s = {self.wall_time_s:.3f}",
            "# rate_unit_internal = nats (CSV reports bits = nats / ln 2)",
        ]
        header += [f"# realizations.{m} = {n}" for m, n in self.realization_counts.items()]
        return "\n".join(header + list(self.config_lines)) + "\n"
