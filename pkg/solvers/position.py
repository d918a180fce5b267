"""Antenna-position subproblem: surrogate f2, its analytic gradient, coordinate ascent.

With alpha, beta and p frozen, the position-dependent part of F2 is

    f2(x) = sum_m w_m Re(beta_m^H g_m) - sum_m sum_{i in D_m} p_i |beta_m^H g_i|^2,

with w_m = 2 sqrt(1 + alpha_m) sqrt(p_m). Moving antenna n only changes row n
of G, so S = beta^H G (S[m, i] = beta_m^H g_i) is updated by a rank-one term.

The step length l is a displacement in metres: a trial moves x_n by
l * sign(d f2 / d x_n), so l0 and l_min are comparable with the guided
wavelength whatever the scale of f2.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from models import AuxState, GdOptions, Mode, PinchLayout, SystemParams, UserSet
from solvers.channel import coupling_matrix, effective_channels, waveguide_y
from solvers.rates import interferer_mask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PositionObjectiveContext:
    params: SystemParams
    users: UserSet
    alpha: np.ndarray
    beta: np.ndarray
    p: np.ndarray
    mode: Mode
    weights: np.ndarray  # w_m = 2 sqrt(1 + alpha_m) sqrt(p_m)
    pair_weights: np.ndarray  # W[m, i] = p_i when i is in D_m, else 0

    @classmethod
    def build(cls, params: SystemParams, users: UserSet, aux: AuxState, p, mode: Mode) -> "PositionObjectiveContext":
        alpha = np.array(aux.alpha, dtype=float)
        beta = np.array(aux.beta, dtype=complex)
        p = np.array(p, dtype=float)
        for arr in (alpha, beta, p):
            arr.setflags(write=False)
        mask = interferer_mask(mode, p.size, include_self=True)
        weights = 2.0 * np.sqrt(1.0 + alpha) * np.sqrt(p)
        pair_weights = mask * p[None, :]
        weights.setflags(write=False)
        pair_weights.setflags(write=False)
        return cls(params, users, alpha, beta, p, Mode(mode), weights, pair_weights)


def coupling_coeff(params: SystemParams, layout: PinchLayout, user, n: int) -> complex:
    """C = exp(-j phi_n) exp(-j 2 pi r / lambda) / r, so that g_m[n] = sqrt(eta) C (0-based n)."""
    y_n = waveguide_y(params, layout.N)[n]
    C = coupling_matrix(params, layout.x_p[n:n + 1], [y_n], user, layout.guided)
    return complex(C[0, 0])


# ── Kernels on (G, S) ─────────────────────────────────────────────────────────

def _value(ctx: PositionObjectiveContext, S: np.ndarray) -> float:
    linear = np.sum(ctx.weights * np.real(np.diag(S)))
    quad = np.sum(ctx.pair_weights * (S.real ** 2 + S.imag ** 2))
    return float(linear - quad)


def _channel_row(ctx: PositionObjectiveContext, x_n: float, y_n: float, guided: bool) -> np.ndarray:
    C = coupling_matrix(ctx.params, [x_n], [y_n], ctx.users.positions, guided)
    return math.sqrt(ctx.params.eta) * C[0]


def _gradient(ctx: PositionObjectiveContext, x_n: float, y_n: float, G_row: np.ndarray,
              S: np.ndarray, n: int, guided: bool) -> float:
    params = ctx.params
    ux, uy = ctx.users.positions[:, 0], ctx.users.positions[:, 1]
    dx = x_n - ux
    r = np.sqrt(dx ** 2 + (y_n - uy) ** 2 + params.d ** 2)
    # d g_i[n] / d x_n = g_i[n] * kappa_i
    kappa = -(2j * math.pi / params.wavelength + 1.0 / r) * dx / r
    if guided:
        kappa = kappa - 2j * math.pi / params.guided_wavelength
    T = np.outer(ctx.beta[n].conj(), G_row * kappa)  # T[m, i] = d S[m, i] / d x_n
    linear = np.sum(ctx.weights * np.real(np.diag(T)))
    quad = 2.0 * np.sum(ctx.pair_weights * np.real(S.conj() * T))
    return float(linear - quad)


def _channels(ctx: PositionObjectiveContext, layout: PinchLayout) -> np.ndarray:
    return np.array(effective_channels(ctx.params, layout, ctx.users).G)


# ── Public operations ─────────────────────────────────────────────────────────

def position_objective(ctx: PositionObjectiveContext, layout: PinchLayout) -> float:
    return _value(ctx, ctx.beta.conj().T @ _channels(ctx, layout))


def position_gradient(ctx: PositionObjectiveContext, layout: PinchLayout, n: int) -> float:
    """Analytic d f2 / d x_n (0-based n)."""
    G = _channels(ctx, layout)
    S = ctx.beta.conj().T @ G
    y_n = waveguide_y(ctx.params, layout.N)[n]
    return _gradient(ctx, layout.x_p[n], y_n, G[n], S, n, layout.guided)


def search_positions(ctx: PositionObjectiveContext, layout: PinchLayout, opts: GdOptions) -> tuple[PinchLayout, int]:
    """Cyclic per-antenna ascent with backtracking; returns (layout, evaluations).

    Each trial moves x_n by l * sign(gradient), clamped to the box, and is kept
    only if f2 strictly increases; otherwise l is divided by `shrink` until it
    drops below `l_min`.
    """
    params = ctx.params
    guided = layout.guided
    x = np.array(layout.x_p, dtype=float)
    y = waveguide_y(params, x.size)
    G = _channels(ctx, layout)
    evaluations = 1
    f_start = _value(ctx, ctx.beta.conj().T @ G)

    for sweep in range(opts.max_sweeps):
        S = ctx.beta.conj().T @ G
        f = _value(ctx, S)
        moved = 0
        for n in range(x.size):
            direction = np.sign(_gradient(ctx, x[n], y[n], G[n], S, n, guided))
            if direction == 0.0:
                continue
            step = opts.l0
            while step >= opts.l_min:
                cand = float(np.clip(x[n] + step * direction, -params.D_x, params.D_x))
                if cand != x[n]:
                    row = _channel_row(ctx, cand, y[n], guided)
                    S_cand = S + np.outer(ctx.beta[n].conj(), row - G[n])
                    f_cand = _value(ctx, S_cand)
                    evaluations += 1
                    if f_cand > f:
                        x[n], G[n], S, f = cand, row, S_cand, f_cand
                        moved += 1
                        break
                step /= opts.shrink
        logger.debug("position sweep %d: f2=%.12g, moved=%d", sweep, f, moved)
        if not moved:
            break

    result = layout.with_x(x)
    # Incremental updates can drift by rounding; never hand back a worse layout.
    if position_objective(ctx, result) < f_start:
        return layout, evaluations
    return result, evaluations


def optimize_positions(ctx: PositionObjectiveContext, layout: PinchLayout, opts: GdOptions) -> PinchLayout:
    return search_positions(ctx, layout, opts)[0]
