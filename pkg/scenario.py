"""Unit conversions, default system parameters and seeded scenario sampling."""

import math

import numpy as np

import config
from models import PinchLayout, SystemParams, UserSet


def dbm_to_watts(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


def default_params() -> SystemParams:
    return SystemParams(
        f_c=config.FC_HZ,
        n_eff=config.N_EFF,
        sigma2=dbm_to_watts(config.SIGMA2_DBM),
        d=config.HEIGHT_M,
        D_x=config.DX_M,
        D_y=config.DY_M,
        x_0=config.X0_M,
    )


def realization_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Counter-based substream for (master_seed, *key); independent of call order."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def random_layout(rng: np.random.Generator, params: SystemParams, N: int) -> PinchLayout:
    return PinchLayout(x_p=rng.uniform(-params.D_x, params.D_x, size=N))


def sample_scenario(seed: int, params: SystemParams, M: int, N: int, p_max: float,
                    realization: int = 0) -> tuple[UserSet, PinchLayout]:
    """Draw users uniformly on the service rectangle and one antenna per waveguide.

    Users are drawn before the layout so that a given substream always yields
    the same users regardless of N.
    """
    if M < 1 or N < 1:
        raise ValueError(f"need M >= 1 and N >= 1, got M={M}, N={N}")
    rng = realization_rng(seed, realization)
    xy = np.column_stack([
        rng.uniform(-params.D_x, params.D_x, size=M),
        rng.uniform(-params.D_y, params.D_y, size=M),
    ])
    users = UserSet(positions=xy, p_max=p_max)
    return users, random_layout(rng, params, N)
