"""Seeded Monte-Carlo sweeps comparing PASS and ULA under both combiners.

Every (sweep point, realization r) draws its scenario from substream
(master_seed, r) and runs all requested methods on that same scenario.
Records are sorted by (point, method, realization) before reduction, so the
aggregates do not depend on how many workers produced them.
"""

import logging
import math
from dataclasses import replace

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from config import METHODS, ConfigError
from models import BcdResult, Mode, PinchLayout, SweepKind, SweepResult, SweepSpec, SystemParams, UserSet
from scenario import dbm_to_watts, random_layout, realization_rng, sample_scenario
from solvers.bcd import optimize, optimize_baseline

logger = logging.getLogger(__name__)

LN2 = math.log(2)

RESULT_COLUMNS = ["sweep_value", "method", "mean_sum_rate_bits", "std_err", "realizations", "seed"]
CONVERGENCE_COLUMNS = ["iteration", "method", "n_waveguides", "mean_sum_rate_bits"]


# ── Validation ────────────────────────────────────────────────────────────────

def validate_spec(spec: SweepSpec) -> None:
    if spec.realizations < 1:
        raise ConfigError("realizations", "must be >= 1")
    if not spec.methods or not set(spec.methods) <= set(METHODS):
        raise ConfigError("methods", f"must be a non-empty subset of {','.join(METHODS)}")
    if spec.multistart < 1:
        raise ConfigError("multistart", "must be >= 1")
    if spec.n_waveguides < 1:
        raise ConfigError("n_waveguides", "must be >= 1")
    if spec.n_users < 1:
        raise ConfigError("n_users", "must be >= 1")
    if spec.kind is SweepKind.PMAX_SWEEP and not spec.pmax_grid_dbm:
        raise ConfigError("pmax_grid_dbm", "must be a non-empty list")
    if spec.kind is SweepKind.USER_SWEEP and (not spec.user_grid or min(spec.user_grid) < 1):
        raise ConfigError("user_grid", "must be a non-empty list of counts >= 1")
    if spec.kind is SweepKind.CONVERGENCE and (not spec.waveguide_grid or min(spec.waveguide_grid) < 1):
        raise ConfigError("waveguide_grid", "must be a non-empty list of counts >= 1")


def sweep_points(spec: SweepSpec) -> list[tuple[float, int, int, float]]:
    """(sweep_value, M, N, p_max_dbm) for every point of the sweep."""
    if spec.kind is SweepKind.PMAX_SWEEP:
        return [(v, spec.n_users, spec.n_waveguides, v) for v in spec.pmax_grid_dbm]
    if spec.kind is SweepKind.USER_SWEEP:
        return [(float(m), m, spec.n_waveguides, spec.pmax_dbm) for m in spec.user_grid]
    if spec.kind is SweepKind.CONVERGENCE:
        return [(float(n), spec.n_users, n, spec.pmax_dbm) for n in spec.waveguide_grid]
    return [(spec.pmax_dbm, spec.n_users, spec.n_waveguides, spec.pmax_dbm)]


# ── Per-realization work ──────────────────────────────────────────────────────

def run_method(spec: SweepSpec, method: str, params: SystemParams, users: UserSet,
               layout0: PinchLayout, realization: int) -> BcdResult:
    system, mode = method.split("-")
    opts = replace(spec.bcd, mode=Mode(mode))
    if system == "ula":
        return optimize_baseline(params, users, layout0.N, opts)

    best = None
    for start in range(spec.multistart):
        if start == 0:
            layout = layout0
        else:
            layout = random_layout(realization_rng(spec.master_seed, realization, start), params, layout0.N)
        result = optimize(params, users, layout, opts)
        if best is None or result.final_rate > best.final_rate:
            best = result
    return best


def _run_realization(spec: SweepSpec, point_index: int, point: tuple, realization: int) -> list[dict]:
    sweep_value, M, N, pmax_dbm = point
    users, layout0 = sample_scenario(spec.master_seed, spec.params, M, N, dbm_to_watts(pmax_dbm), realization)
    records = []
    for method_index, method in enumerate(spec.methods):
        result = run_method(spec, method, spec.params, users, layout0, realization)
        records.append({
            "point": point_index,
            "sweep_value": sweep_value,
            "n_waveguides": N,
            "method_index": method_index,
            "method": method,
            "realization": realization,
            "sum_rate_nats": result.final_rate,
            "sum_rate_bits": result.final_rate / LN2,
            "iterations": result.iterations,
            "converged": result.converged,
            "trace_bits": result.trace / LN2,
            "layout_x": np.array(result.layout.x_p),
            "powers": np.array(result.p.p),
        })
    return records


def _collect(spec: SweepSpec) -> pd.DataFrame:
    points = sweep_points(spec)
    logger.info("%s: %d point(s) x %d realization(s) x %d method(s), seed=%d, threads=%d",
                spec.kind.value, len(points), spec.realizations, len(spec.methods),
                spec.master_seed, spec.threads)
    chunks = Parallel(n_jobs=spec.threads)(
        delayed(_run_realization)(spec, i, point, r)
        for i, point in enumerate(points)
        for r in range(spec.realizations)
    )
    records = pd.DataFrame([rec for chunk in chunks for rec in chunk])
    records = records.sort_values(["point", "method_index", "realization"], kind="mergesort")
    return records.reset_index(drop=True)


def _aggregate(spec: SweepSpec, records: pd.DataFrame) -> pd.DataFrame:
    rows = []
    for (_, _), group in records.groupby(["point", "method_index"], sort=True):
        values = group["sum_rate_bits"].to_numpy()
        n = values.size
        std_err = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        rows.append({
            "sweep_value": group["sweep_value"].iloc[0],
            "method": group["method"].iloc[0],
            "mean_sum_rate_bits": float(np.mean(values)),
            "std_err": std_err,
            "realizations": n,
            "seed": spec.master_seed,
        })
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def _mean_traces(records: pd.DataFrame) -> pd.DataFrame:
    rows = []
    for (_, _), group in records.groupby(["point", "method_index"], sort=True):
        traces = list(group["trace_bits"])
        length = max(len(t) for t in traces)
        padded = np.array([np.pad(t, (0, length - len(t)), mode="edge") for t in traces])
        mean = padded.mean(axis=0)
        method = group["method"].iloc[0]
        n_waveguides = int(group["n_waveguides"].iloc[0])
        rows.extend(
            {"iteration": j, "method": method, "n_waveguides": n_waveguides, "mean_sum_rate_bits": float(v)}
            for j, v in enumerate(mean)
        )
    return pd.DataFrame(rows, columns=CONVERGENCE_COLUMNS)


# ── Public entry points ───────────────────────────────────────────────────────

def run_sweep(spec: SweepSpec) -> SweepResult:
    validate_spec(spec)
    if spec.kind is SweepKind.CONVERGENCE:
        return run_convergence(spec)
    records = _collect(spec)
    return SweepResult(rows=_aggregate(spec, records), per_realization=records, master_seed=spec.master_seed)


def run_convergence(spec: SweepSpec) -> SweepResult:
    """Record full BCD traces per waveguide count, padded with their last value and averaged."""
    spec = replace(spec, kind=SweepKind.CONVERGENCE)
    validate_spec(spec)
    records = _collect(spec)
    return SweepResult(
        rows=_aggregate(spec, records),
        per_realization=records,
        convergence=_mean_traces(records),
        master_seed=spec.master_seed,
    )
