"""Spherical-wave channels, waveguide phase shifts and effective channels."""

import math

import numpy as np

from models import EffectiveChannel, PinchLayout, SystemParams, UserSet


def waveguide_y(params: SystemParams, N: int) -> np.ndarray:
    """y_n = -D_y + n D_y / N for n = 1..N."""
    n = np.arange(1, N + 1, dtype=float)
    return -params.D_y + n * params.D_y / N


def pinch_positions(params: SystemParams, layout: PinchLayout) -> np.ndarray:
    """3-D antenna coordinates, shape (N, 3)."""
    N = layout.N
    return np.column_stack([layout.x_p, waveguide_y(params, N), np.full(N, params.d)])


# ── Kernels ───────────────────────────────────────────────────────────────────

def guided_phase(params: SystemParams, x, guided: bool = True) -> np.ndarray:
    """exp(-j 2 pi (x - x_0) / lambda_g) per antenna; all ones for unguided arrays."""
    x = np.asarray(x, dtype=float)
    if not guided:
        return np.ones(x.shape, dtype=complex)
    return np.exp(-2j * math.pi / params.guided_wavelength * (x - params.x_0))


def coupling_matrix(params: SystemParams, x, y, points, guided: bool = True) -> np.ndarray:
    """C[n, m] = phi_n exp(-j 2 pi r_nm / lambda) / r_nm for antennas (x, y, d) and ground points.

    `points` is (M, 2) or (M, 3); the effective channel is sqrt(eta) C.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    uz = pts[:, 2] if pts.shape[1] == 3 else 0.0
    dx = x[:, None] - pts[None, :, 0]
    dy = y[:, None] - pts[None, :, 1]
    dz = params.d - uz
    r = np.sqrt(dx * dx + dy * dy + dz * dz)
    wave = np.exp(-2j * math.pi / params.wavelength * r) / r
    return guided_phase(params, x, guided)[:, None] * wave


# ── Public operations ─────────────────────────────────────────────────────────

def channel_vector(params: SystemParams, layout: PinchLayout, u) -> np.ndarray:
    """Free-space channel h from a user at `u` (2-D or 3-D, z = 0) to every antenna."""
    C = coupling_matrix(params, layout.x_p, waveguide_y(params, layout.N), u, guided=False)
    return math.sqrt(params.eta) * C[:, 0]


def phase_vector(params: SystemParams, layout: PinchLayout) -> np.ndarray:
    """In-guide phase exp(-j 2 pi (x_n - x_0) / lambda_g); all ones for unguided arrays."""
    return guided_phase(params, layout.x_p, layout.guided)


def effective_channels(params: SystemParams, layout: PinchLayout, users: UserSet) -> EffectiveChannel:
    """G[:, m] = phi * h_m."""
    if users.M == 0:
        return EffectiveChannel(G=np.zeros((layout.N, 0), dtype=complex))
    H = np.column_stack([channel_vector(params, layout, u) for u in users.positions])
    return EffectiveChannel(G=phase_vector(params, layout)[:, None] * H)
