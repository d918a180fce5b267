"""Run configuration: defaults, environment overrides and `key = value` files."""

import io
import os
from dataclasses import dataclass, fields
from typing import Callable, Optional

from dotenv import dotenv_values, load_dotenv
from dotenv.parser import parse_stream

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

load_dotenv(os.path.join(BASE_DIR, ".env"))

VERSION = "1.0.0"

# ── Physical defaults ─────────────────────────────────────────────────────────
FC_HZ = 28e9
N_EFF = 1.4
SIGMA2_DBM = -90.0
HEIGHT_M = 5.0
DX_M = 15.0
DY_M = 20.0
X0_M = -1.0

# ── Scenario defaults ─────────────────────────────────────────────────────────
N_WAVEGUIDES = 4
N_USERS = 4
PMAX_DBM = 10.0
PMAX_GRID_DBM = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
USER_GRID = (1, 2, 3, 4, 5, 6, 7, 8)
WAVEGUIDE_GRID = (4, 8)
METHODS = ("pass-sic", "pass-nsic", "ula-sic", "ula-nsic")

# ── Optimizer defaults ────────────────────────────────────────────────────────
BCD_TOL = 1e-4
BCD_MAX_ITERS = 100
GD_L0 = 1.0
GD_LMIN = 1e-6
GD_SHRINK = 3.0
GD_MAX_SWEEPS = 50
MULTISTART = 1

# ── Environment-driven settings ───────────────────────────────────────────────
THREADS = int(os.environ.get("PASS_THREADS", "-1"))
OUT_DIR = os.environ.get("PASS_OUT_DIR", "results")
LOG_LEVEL = os.environ.get("PASS_LOG_LEVEL", "INFO")
REALIZATIONS = int(os.environ.get("PASS_REALIZATIONS", "200"))


class ConfigError(ValueError):
    """Invalid run configuration; `key` names the offending setting."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# ── Value parsers ─────────────────────────────────────────────────────────────

def _float(raw: str) -> float:
    return float(raw)


def _int(raw: str) -> int:
    return int(raw)


def _float_list(raw: str) -> tuple:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def _int_list(raw: str) -> tuple:
    return tuple(int(v) for v in raw.split(",") if v.strip())


def _str_list(raw: str) -> tuple:
    return tuple(v.strip() for v in raw.split(",") if v.strip())


def _str(raw: str) -> str:
    return raw.strip()


def _format(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one CLI run."""

    master_seed: int
    fc_hz: float = FC_HZ
    n_eff: float = N_EFF
    sigma2_dbm: float = SIGMA2_DBM
    d_m: float = HEIGHT_M
    dx_m: float = DX_M
    dy_m: float = DY_M
    x0_m: float = X0_M
    n_waveguides: int = N_WAVEGUIDES
    n_users: int = N_USERS
    pmax_dbm: float = PMAX_DBM
    pmax_grid_dbm: tuple = PMAX_GRID_DBM
    user_grid: tuple = USER_GRID
    waveguide_grid: tuple = WAVEGUIDE_GRID
    realizations: int = REALIZATIONS
    mode: str = "both"
    methods: tuple = METHODS
    tol: float = BCD_TOL
    max_iters: int = BCD_MAX_ITERS
    gd_l0: float = GD_L0
    gd_lmin: float = GD_LMIN
    gd_shrink: float = GD_SHRINK
    gd_max_sweeps: int = GD_MAX_SWEEPS
    multistart: int = MULTISTART
    threads: int = THREADS
    out_dir: str = OUT_DIR
    log_level: str = LOG_LEVEL

    @property
    def selected_methods(self) -> tuple:
        if self.mode == "both":
            return self.methods
        return tuple(m for m in self.methods if m.endswith("-" + self.mode))

    def to_lines(self) -> list:
        return [f"{f.name} = {_format(getattr(self, f.name))}" for f in fields(self)]


_PARSERS: dict[str, Callable[[str], object]] = {
    "master_seed": _int,
    "fc_hz": _float,
    "n_eff": _float,
    "sigma2_dbm": _float,
    "d_m": _float,
    "dx_m": _float,
    "dy_m": _float,
    "x0_m": _float,
    "n_waveguides": _int,
    "n_users": _int,
    "pmax_dbm": _float,
    "pmax_grid_dbm": _float_list,
    "user_grid": _int_list,
    "waveguide_grid": _int_list,
    "realizations": _int,
    "mode": _str,
    "methods": _str_list,
    "tol": _float,
    "max_iters": _int,
    "gd_l0": _float,
    "gd_lmin": _float,
    "gd_shrink": _float,
    "gd_max_sweeps": _int,
    "multistart": _int,
    "threads": _int,
    "out_dir": _str,
    "log_level": _str,
}

KNOWN_KEYS = frozenset(_PARSERS)

# Range checks: predicate and the message shown when it fails.
_CHECKS: dict[str, tuple[Callable[[object], bool], str]] = {
    "fc_hz": (lambda v: v > 0, "must be > 0"),
    "n_eff": (lambda v: v >= 1, "must be >= 1"),
    "d_m": (lambda v: v > 0, "must be > 0"),
    "dx_m": (lambda v: v > 0, "must be > 0"),
    "dy_m": (lambda v: v > 0, "must be > 0"),
    "x0_m": (lambda v: v < 0, "must be < 0"),
    "n_waveguides": (lambda v: v >= 1, "must be >= 1"),
    "n_users": (lambda v: v >= 1, "must be >= 1"),
    "pmax_grid_dbm": (lambda v: len(v) > 0, "must be a non-empty list"),
    "user_grid": (lambda v: len(v) > 0 and min(v) >= 1, "must be a non-empty list of counts >= 1"),
    "waveguide_grid": (lambda v: len(v) > 0 and min(v) >= 1, "must be a non-empty list of counts >= 1"),
    "realizations": (lambda v: v >= 1, "must be >= 1"),
    "master_seed": (lambda v: v >= 0, "must be >= 0"),
    "mode": (lambda v: v in ("sic", "nsic", "both"), "must be one of sic, nsic, both"),
    "methods": (lambda v: len(v) > 0 and set(v) <= set(METHODS), f"must be a non-empty subset of {','.join(METHODS)}"),
    "tol": (lambda v: v >= 0, "must be >= 0"),
    "max_iters": (lambda v: v >= 1, "must be >= 1"),
    "gd_l0": (lambda v: v > 0, "must be > 0"),
    "gd_lmin": (lambda v: v > 0, "must be > 0"),
    "gd_shrink": (lambda v: v > 1, "must be > 1"),
    "gd_max_sweeps": (lambda v: v >= 1, "must be >= 1"),
    "multistart": (lambda v: v >= 1, "must be >= 1"),
    "threads": (lambda v: v != 0, "must be nonzero (-1 = all cores)"),
    "log_level": (lambda v: v.upper() in ("DEBUG", "INFO", "WARNING", "ERROR"), "must be a logging level name"),
}


# ── File parsing ──────────────────────────────────────────────────────────────

def _binding_line(binding) -> int:
    # A binding's mark sits before any blank lines it swallowed.
    text = binding.original.string
    return binding.original.line + text[: len(text) - len(text.lstrip())].count("\n")


def parse_config_file(path: str) -> dict[str, str]:
    """Read `key = value` lines (dotenv syntax); `#` starts a comment."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}")

    for binding in parse_stream(io.StringIO(text)):
        if binding.error or (binding.key is not None and binding.value is None):
            raise ConfigError(f"line {_binding_line(binding)}", f"expected 'key = value' in {path}")
        if binding.key is not None and binding.key not in KNOWN_KEYS:
            raise ConfigError(binding.key, "unknown key")

    values = dotenv_values(stream=io.StringIO(text), interpolate=False)
    return {key: value for key, value in values.items() if value is not None}


def resolve_config(file_values: Optional[dict] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Merge defaults < file values < overrides, then convert and validate.

    Overrides may already be typed (from argparse); file values are strings.
    """
    merged: dict[str, object] = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in KNOWN_KEYS:
                raise ConfigError(key, "unknown key")
            merged[key] = value

    if "master_seed" not in merged:
        raise ConfigError("master_seed", "required key is missing")

    typed: dict[str, object] = {}
    for key, value in merged.items():
        if isinstance(value, str):
            try:
                value = _PARSERS[key](value)
            except ValueError:
                raise ConfigError(key, f"cannot parse value {value!r}")
        elif isinstance(value, list):
            value = tuple(value)
        check = _CHECKS.get(key)
        if check and not check[0](value):
            raise ConfigError(key, f"{check[1]} (got {_format(value)})")
        typed[key] = value

    cfg = RunConfig(**typed)
    if not cfg.selected_methods:
        raise ConfigError("mode", f"no method in {_format(cfg.methods)} matches mode {cfg.mode}")
    return cfg
