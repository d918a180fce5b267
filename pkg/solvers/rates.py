"""MMSE-SIC / MMSE-nSIC sum-rates and the Hermitian solve they rely on."""

from typing import Callable, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from models import Mode, RateReport

IndexPredicate = Union[Callable[[int], bool], np.ndarray]


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when an interference-plus-noise matrix fails to factorize."""


def hermitian_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for Hermitian positive-definite A via Cholesky."""
    try:
        factor = cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {e}") from e
    return cho_solve(factor, b, check_finite=False)


def _include_mask(include: IndexPredicate, M: int) -> np.ndarray:
    if callable(include):
        return np.fromiter((bool(include(i)) for i in range(M)), dtype=bool, count=M)
    return np.asarray(include, dtype=bool).reshape(M)


def interference_matrix(G, p, sigma2: float, include: IndexPredicate) -> np.ndarray:
    """sigma2 I + sum_{i in include} p_i g_i g_i^H."""
    G = np.asarray(G, dtype=complex)
    p = np.asarray(p, dtype=float)
    N, M = G.shape
    mask = _include_mask(include, M)
    Gs = G[:, mask]
    Q = (Gs * p[mask]) @ Gs.conj().T + sigma2 * np.eye(N)
    return 0.5 * (Q + Q.conj().T)


def interferer_mask(mode: Mode, M: int, include_self: bool = False) -> np.ndarray:
    """mask[m, i] is True when user i enters user m's covariance.

    SIC: i > m (i >= m with include_self). nSIC: i != m (every i with include_self).
    """
    idx = np.arange(M)
    if Mode(mode) is Mode.SIC:
        return idx[None, :] >= idx[:, None] if include_self else idx[None, :] > idx[:, None]
    if include_self:
        return np.ones((M, M), dtype=bool)
    return idx[None, :] != idx[:, None]


def quadratic_forms(G, p, sigma2: float, mask: np.ndarray) -> np.ndarray:
    """q[m] = g_m^H Q_m^{-1} g_m with Q_m built from row m of `mask`."""
    G = np.asarray(G, dtype=complex)
    M = G.shape[1]
    q = np.empty(M)
    for m in range(M):
        g = G[:, m]
        Q = interference_matrix(G, p, sigma2, mask[m])
        q[m] = np.real(np.vdot(g, hermitian_solve(Q, g)))
    return q


def sinr(G, p, sigma2: float, mode: Mode) -> np.ndarray:
    """Post-MMSE SINR of every user under the given combiner."""
    p = np.asarray(p, dtype=float)
    M = p.size
    return np.maximum(p * quadratic_forms(G, p, sigma2, interferer_mask(mode, M)), 0.0)


def sum_rate_sic(G, p, sigma2: float) -> RateReport:
    return RateReport(per_user_rate=np.log1p(sinr(G, p, sigma2, Mode.SIC)))


def sum_rate_nsic(G, p, sigma2: float) -> RateReport:
    return RateReport(per_user_rate=np.log1p(sinr(G, p, sigma2, Mode.NSIC)))


def sum_rate(G, p, sigma2: float, mode: Mode) -> RateReport:
    if Mode(mode) is Mode.SIC:
        return sum_rate_sic(G, p, sigma2)
    return sum_rate_nsic(G, p, sigma2)
