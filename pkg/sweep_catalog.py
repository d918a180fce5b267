"""Canonical presets for each CLI subcommand."""

from models import SweepKind

CATALOG = [
    {
        "order": 1,
        "command": "single",
        "kind": SweepKind.SINGLE,
        "title": "Single scenario",
        "description": "Optimize one seeded scenario with every selected method and report per-user detail.",
        "defaults": {"realizations": 1},
        "outputs": ["results.csv", "users.csv", "layout.csv", "manifest.txt"],
    },
    {
        "order": 2,
        "command": "sweep-pmax",
        "kind": SweepKind.PMAX_SWEEP,
        "title": "Sum-rate versus P_max",
        "description": "Mean sum-rate over seeded realizations for each P_max on the grid (N=4, M=4 by default).",
        "defaults": {"n_waveguides": 4, "n_users": 4},
        "outputs": ["results.csv", "manifest.txt"],
    },
    {
        "order": 3,
        "command": "sweep-users",
        "kind": SweepKind.USER_SWEEP,
        "title": "Sum-rate versus number of users",
        "description": "Mean sum-rate for each user count on the grid (N=4, P_max=10 dBm by default).",
        "defaults": {"n_waveguides": 4, "pmax_dbm": 10.0},
        "outputs": ["results.csv", "manifest.txt"],
    },
    {
        "order": 4,
        "command": "convergence",
        "kind": SweepKind.CONVERGENCE,
        "title": "BCD convergence",
        "description": "Per-iteration mean sum-rate of the BCD for each waveguide count (M=4, P_max=10 dBm by default).",
        "defaults": {"n_users": 4, "pmax_dbm": 10.0},
        "outputs": ["results.csv", "manifest.txt"],
    },
]


def get_catalog_by_command():
    """Return {command: preset}."""
    return {c["command"]: c for c in CATALOG}


def get_catalog_by_order():
    return {c["order"]: c for c in CATALOG}
