"""
PASS uplink sum-rate optimizer: command-line driver
====================================================
Subcommands (presets in sweep_catalog.py):
  - single       one seeded scenario, every selected method
  - sweep-pmax   mean sum-rate versus P_max
  - sweep-users  mean sum-rate versus number of users
  - convergence  per-iteration mean BCD trace per waveguide count

Settings come from defaults < preset < `--config` file < command-line flags.
Each run writes results.csv and manifest.txt to `out_dir`; the manifest is a
valid config file that reproduces the run.
"""

import argparse
import logging
import os
import sys
import time
from typing import Optional

import numpy as np
import pandas as pd

from config import KNOWN_KEYS, VERSION, ConfigError, RunConfig, parse_config_file, resolve_config
from experiments import run_sweep
from models import BcdOptions, GdOptions, PinchLayout, RunManifest, SweepKind, SweepResult, SweepSpec, SystemParams
from scenario import dbm_to_watts, sample_scenario
from solvers.channel import effective_channels, pinch_positions
from solvers.rates import sum_rate
from sweep_catalog import get_catalog_by_command, get_catalog_by_order

logger = logging.getLogger("pass_opt")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

CSV_FLOAT_FORMAT = "%.12g"

# Short spellings accepted next to the `--key-name` form of every config key.
_ALIASES = {
    "master_seed": ["--seed"],
    "n_waveguides": ["--n"],
    "n_users": ["--m"],
    "pmax_grid_dbm": ["--pmax-grid"],
}


# ── Argument parsing ─────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pass-opt", description="PASS uplink sum-rate optimizer")
    sub = parser.add_subparsers(dest="command", required=True)
    for _, preset in sorted(get_catalog_by_order().items()):
        cmd = sub.add_parser(preset["command"], help=preset["title"], description=preset["description"])
        cmd.add_argument("--config", help="file of `key = value` lines")
        for key in sorted(KNOWN_KEYS):
            flags = ["--" + key.replace("_", "-")] + _ALIASES.get(key, [])
            cmd.add_argument(*flags, dest=key, default=None, metavar=key.upper())
    return parser


# ── Config → domain objects ──────────────────────────────────────────────────

def build_params(cfg: RunConfig) -> SystemParams:
    return SystemParams(
        f_c=cfg.fc_hz,
        n_eff=cfg.n_eff,
        sigma2=dbm_to_watts(cfg.sigma2_dbm),
        d=cfg.d_m,
        D_x=cfg.dx_m,
        D_y=cfg.dy_m,
        x_0=cfg.x0_m,
    )


def build_spec(cfg: RunConfig, kind: SweepKind) -> SweepSpec:
    gd = GdOptions(l0=cfg.gd_l0, l_min=cfg.gd_lmin, shrink=cfg.gd_shrink, max_sweeps=cfg.gd_max_sweeps)
    return SweepSpec(
        kind=kind,
        params=build_params(cfg),
        master_seed=cfg.master_seed,
        n_waveguides=cfg.n_waveguides,
        n_users=cfg.n_users,
        user_grid=cfg.user_grid,
        waveguide_grid=cfg.waveguide_grid,
        pmax_dbm=cfg.pmax_dbm,
        pmax_grid_dbm=cfg.pmax_grid_dbm,
        realizations=cfg.realizations,
        methods=cfg.selected_methods,
        bcd=BcdOptions(tol=cfg.tol, max_iters=cfg.max_iters, gd=gd),
        multistart=cfg.multistart,
        threads=cfg.threads,
    )


# ── Output writers ───────────────────────────────────────────────────────────

def _write_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("wrote %s (%d rows)", path, len(frame))


def _write_single_details(spec: SweepSpec, result: SweepResult, out_dir: str) -> None:
    """Per-user powers/rates and final antenna coordinates for realization 0."""
    params = spec.params
    users, _ = sample_scenario(spec.master_seed, params, spec.n_users, spec.n_waveguides,
                               dbm_to_watts(spec.pmax_dbm), 0)
    user_rows, layout_rows = [], []
    for rec in result.per_realization[result.per_realization["realization"] == 0].itertuples():
        layout = PinchLayout(x_p=rec.layout_x, guided=rec.method.startswith("pass"))
        G = effective_channels(params, layout, users)
        report = sum_rate(G, rec.powers, params.sigma2, rec.method.split("-")[1])
        for m in range(users.M):
            user_rows.append({
                "method": rec.method,
                "user": m + 1,
                "x_m": users.positions[m, 0],
                "y_m": users.positions[m, 1],
                "power_w": rec.powers[m],
                "rate_bits": report.per_user_rate[m] / np.log(2),
            })
        for n, (x, y, z) in enumerate(pinch_positions(params, layout), start=1):
            layout_rows.append({"method": rec.method, "antenna": n, "x_m": x, "y_m": y, "z_m": z})
    _write_csv(pd.DataFrame(user_rows), os.path.join(out_dir, "users.csv"))
    _write_csv(pd.DataFrame(layout_rows), os.path.join(out_dir, "layout.csv"))


def write_outputs(command: str, cfg: RunConfig, spec: SweepSpec, result: SweepResult, wall_time: float) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    table = result.convergence if spec.kind is SweepKind.CONVERGENCE else result.rows
    _write_csv(table, os.path.join(cfg.out_dir, "results.csv"))
    if spec.kind is SweepKind.SINGLE:
        _write_single_details(spec, result, cfg.out_dir)

    counts = result.per_realization.groupby("method", sort=False).size()
    manifest = RunManifest(
        command=command,
        config_lines=cfg.to_lines(),
        software_version=VERSION,
        wall_time_s=wall_time,
        realization_counts={m: int(counts[m]) for m in spec.methods},
    )
    path = os.path.join(cfg.out_dir, "manifest.txt")
    with open(path, "w", encoding="utf-8") as f:
        f.write(manifest.to_text())
    logger.info("wrote %s", path)


# ── Entry point ──────────────────────────────────────────────────────────────

def run(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    preset = get_catalog_by_command()[args.command]
    overrides = {key: getattr(args, key) for key in KNOWN_KEYS if getattr(args, key) is not None}
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = resolve_config({**preset["defaults"], **file_values}, overrides)
        logging.getLogger().setLevel(cfg.log_level.upper())
        spec = build_spec(cfg, preset["kind"])
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        result = run_sweep(spec)
        write_outputs(args.command, cfg, spec, result, time.perf_counter() - start)
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("run failed")
        sys.stderr.write(f"runtime error: {e}\n")
        return EXIT_RUNTIME
    logger.info("%s finished in %.2f s", args.command, time.perf_counter() - start)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
