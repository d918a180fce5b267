"""Fractional-programming blocks: auxiliary updates, surrogates and the power step.

Summation sets per combiner (row m of each mask lists the users i involved):

    ========  ===================  =====================  ==========
    mode      alpha denominator    A_m / beta_m / F2      B_m
    ========  ===================  =====================  ==========
    SIC       i in {m+1..M}        i in {m..M}            i in {1..m}
    NSIC      i != m               all i                  all i
    ========  ===================  =====================  ==========

B_k collects the coefficient of p_k in -F2, i.e. it sums over the users m whose
beta-denominator contains k, so it is the transpose of the beta mask.
"""

import numpy as np

from models import AuxState, Mode, PowerAlloc
from solvers.rates import hermitian_solve, interference_matrix, interferer_mask, quadratic_forms, sinr


def _denominator_mask(mode: Mode, M: int) -> np.ndarray:
    return interferer_mask(mode, M, include_self=True)


def update_alpha(G, p, sigma2: float, mode: Mode) -> np.ndarray:
    """alpha_m = p_m g_m^H Q_m^{-1} g_m, the MMSE SINR of user m (0 when p_m = 0)."""
    return sinr(G, p, sigma2, mode)


def a_terms(G, p, sigma2: float, mode: Mode) -> np.ndarray:
    """A_m = p_m g_m^H D_m^{-1} g_m with D_m over the alpha/beta denominator set."""
    p = np.asarray(p, dtype=float)
    return p * quadratic_forms(G, p, sigma2, _denominator_mask(mode, p.size))


def alpha_from_surrogate(G, p, sigma2: float, mode: Mode) -> np.ndarray:
    """alpha_m = A_m / (1 - A_m); equal to `update_alpha` by the Woodbury identity."""
    A = a_terms(G, p, sigma2, mode)
    return A / (1.0 - A)


def surrogate_f1(alpha, G, p, sigma2: float, mode: Mode) -> float:
    alpha = np.asarray(alpha, dtype=float)
    A = a_terms(G, p, sigma2, mode)
    return float(np.sum(np.log1p(alpha) - alpha + (1.0 + alpha) * A))


def update_beta(G, p, alpha, sigma2: float, mode: Mode) -> np.ndarray:
    """beta_m = sqrt(1 + alpha_m) D_m^{-1} sqrt(p_m) g_m, returned as columns of an (N, M) array."""
    G = np.asarray(G, dtype=complex)
    p = np.asarray(p, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    N, M = G.shape
    mask = _denominator_mask(mode, M)
    beta = np.zeros((N, M), dtype=complex)
    for m in range(M):
        D = interference_matrix(G, p, sigma2, mask[m])
        beta[:, m] = np.sqrt(1.0 + alpha[m]) * np.sqrt(p[m]) * hermitian_solve(D, G[:, m])
    return beta


def update_aux(G, p, sigma2: float, mode: Mode) -> AuxState:
    """The alpha-then-beta block of one BCD pass."""
    alpha = update_alpha(G, p, sigma2, mode)
    return AuxState(alpha=alpha, beta=update_beta(G, p, alpha, sigma2, mode))


def surrogate_f2(alpha, beta, G, p, sigma2: float, mode: Mode) -> float:
    G = np.asarray(G, dtype=complex)
    p = np.asarray(p, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=complex)
    M = p.size
    S = beta.conj().T @ G  # S[m, i] = beta_m^H g_i
    mask = _denominator_mask(mode, M)
    linear = 2.0 * np.sqrt(1.0 + alpha) * np.sqrt(p) * np.real(np.diag(S))
    quad = np.sum(mask * p[None, :] * np.abs(S) ** 2, axis=1)
    noise = sigma2 * np.sum(np.abs(beta) ** 2, axis=0)
    return float(np.sum(np.log1p(alpha) - alpha + linear - quad - noise))


def power_coefficients(G, alpha, beta, mode: Mode) -> tuple[np.ndarray, np.ndarray]:
    """(a_m, B_m): a_m = sqrt(1 + alpha_m) beta_m^H g_m, B_m = sum_{m'} |beta_{m'}^H g_m|^2."""
    G = np.asarray(G, dtype=complex)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=complex)
    S = beta.conj().T @ G
    a = np.sqrt(1.0 + alpha) * np.diag(S)
    B = np.sum(_denominator_mask(mode, alpha.size) * np.abs(S) ** 2, axis=0)
    return a, B


def update_powers(G, alpha, beta, p_max: float, mode: Mode) -> PowerAlloc:
    """Exact minimizer of p B_m - 2 Re(a_m) sqrt(p) over [0, p_max], per user."""
    a, B = power_coefficients(G, alpha, beta, mode)
    re_a = np.real(a)
    ratio = np.divide(re_a, B, out=np.full_like(re_a, np.inf), where=B > 0)
    p = np.where(re_a > 0, np.minimum(p_max, ratio ** 2), 0.0)
    return PowerAlloc(p=p)
