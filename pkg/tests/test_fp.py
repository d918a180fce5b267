import numpy as np
import pytest

from models import Mode
from solvers import fp
from solvers.rates import sum_rate


def _optimal_aux(G, p, sigma2, mode):
    aux = fp.update_aux(G, p, sigma2, mode)
    return aux.alpha, aux.beta


# ── alpha / F1 ───────────────────────────────────────────────────────────────

def test_alpha_single_user(rng, make_instance):
    G, p, sigma2 = make_instance(rng, 3, 1)
    for mode in Mode:
        alpha = fp.update_alpha(G, p, sigma2, mode)
        assert alpha[0] == pytest.approx(p[0] * np.linalg.norm(G[:, 0]) ** 2 / sigma2, rel=1e-12)


@pytest.mark.parametrize("mode", list(Mode))
def test_alpha_is_the_sinr_behind_each_rate(rng, make_instance, mode):
    for _ in range(50):
        G, p, sigma2 = make_instance(rng, 3, 4)
        alpha = fp.update_alpha(G, p, sigma2, mode)
        rates = sum_rate(G, p, sigma2, mode).per_user_rate
        np.testing.assert_allclose(alpha, np.expm1(rates), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("mode", list(Mode))
def test_alpha_forms_agree(rng, make_instance, mode):
    for _ in range(50):
        G, p, sigma2 = make_instance(rng, 4, 3)
        np.testing.assert_allclose(
            fp.alpha_from_surrogate(G, p, sigma2, mode), fp.update_alpha(G, p, sigma2, mode), rtol=1e-8
        )


def test_alpha_is_zero_for_silent_user(rng, make_instance):
    G, p, sigma2 = make_instance(rng, 3, 3)
    p[1] = 0.0
    assert fp.update_alpha(G, p, sigma2, Mode.SIC)[1] == 0.0


@pytest.mark.parametrize("mode", list(Mode))
def test_f1_tight_at_optimal_alpha(rng, make_instance, mode):
    for _ in range(1000):
        N, M = rng.integers(1, 6, size=2)
        G, p, sigma2 = make_instance(rng, N, M)
        alpha = fp.update_alpha(G, p, sigma2, mode)
        rate = sum_rate(G, p, sigma2, mode).sum_rate_nats
        assert abs(fp.surrogate_f1(alpha, G, p, sigma2, mode) - rate) < 1e-9


@pytest.mark.parametrize("mode", list(Mode))
def test_f1_concave_in_alpha(rng, make_instance, mode):
    G, p, sigma2 = make_instance(rng, 3, 3)
    alpha = fp.update_alpha(G, p, sigma2, mode)
    best = fp.surrogate_f1(alpha, G, p, sigma2, mode)
    for k in range(3):
        for eps in (0.1, -0.1):
            probe = alpha.copy()
            probe[k] = max(probe[k] + eps, 1e-6)
            assert fp.surrogate_f1(probe, G, p, sigma2, mode) < best


def test_f1_without_power(rng, make_instance):
    G, _, sigma2 = make_instance(rng, 2, 3)
    alpha = np.array([0.5, 1.0, 2.0])
    value = fp.surrogate_f1(alpha, G, np.zeros(3), sigma2, Mode.SIC)
    assert value == pytest.approx(np.sum(np.log1p(alpha) - alpha))
    assert value <= 0


# ── beta / F2 ────────────────────────────────────────────────────────────────

def test_beta_scalar_case():
    g, p, sigma2, alpha = 0.7 - 0.2j, 1.3, 0.4, 2.0
    beta = fp.update_beta(np.array([[g]]), np.array([p]), np.array([alpha]), sigma2, Mode.SIC)
    want = np.sqrt(1 + alpha) * np.sqrt(p) * g / (p * abs(g) ** 2 + sigma2)
    assert beta[0, 0] == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("mode", list(Mode))
def test_tightness_chain(rng, make_instance, mode):
    for _ in range(1000):
        N, M = rng.integers(1, 6, size=2)
        G, p, sigma2 = make_instance(rng, N, M)
        alpha, beta = _optimal_aux(G, p, sigma2, mode)
        f1 = fp.surrogate_f1(alpha, G, p, sigma2, mode)
        f2 = fp.surrogate_f2(alpha, beta, G, p, sigma2, mode)
        rate = sum_rate(G, p, sigma2, mode).sum_rate_nats
        assert abs(f2 - f1) < 1e-9
        assert abs(f1 - rate) < 1e-9


@pytest.mark.parametrize("mode", list(Mode))
def test_beta_rotates_with_global_phase(rng, make_instance, mode):
    G, p, sigma2 = make_instance(rng, 4, 3)
    alpha, beta = _optimal_aux(G, p, sigma2, mode)
    rot = np.exp(0.7j)
    beta_rot = fp.update_beta(G * rot, p, alpha, sigma2, mode)
    np.testing.assert_allclose(beta_rot, beta * rot, rtol=1e-12)
    f2 = fp.surrogate_f2(alpha, beta, G, p, sigma2, mode)
    assert abs(fp.surrogate_f2(alpha, beta_rot, G * rot, p, sigma2, mode) - f2) < 1e-12 * max(1.0, abs(f2))


def test_f2_with_zero_beta(rng, make_instance):
    G, p, sigma2 = make_instance(rng, 3, 2)
    alpha = np.array([0.3, 1.7])
    value = fp.surrogate_f2(alpha, np.zeros((3, 2), dtype=complex), G, p, sigma2, Mode.NSIC)
    assert value == pytest.approx(np.sum(np.log1p(alpha) - alpha))


@pytest.mark.parametrize("mode", list(Mode))
def test_f2_concave_in_beta(rng, make_instance, mode):
    G, p, sigma2 = make_instance(rng, 3, 3)
    alpha, beta = _optimal_aux(G, p, sigma2, mode)
    best = fp.surrogate_f2(alpha, beta, G, p, sigma2, mode)
    scale = np.abs(beta).max()
    for _ in range(100):
        noise = rng.standard_normal(beta.shape) + 1j * rng.standard_normal(beta.shape)
        assert fp.surrogate_f2(alpha, beta + 0.1 * scale * noise, G, p, sigma2, mode) <= best


# ── power update ─────────────────────────────────────────────────────────────

def test_power_closed_form_plug_in():
    G = np.array([[1.0 + 0j]])
    alpha = np.array([0.0])
    beta = np.array([[np.exp(-1j * np.pi / 3)]])
    a, B = fp.power_coefficients(G, alpha, beta, Mode.SIC)
    assert B[0] == pytest.approx(1.0)
    assert a[0].real == pytest.approx(0.5)
    assert fp.update_powers(G, alpha, beta, 1.0, Mode.SIC).p[0] == pytest.approx(0.25)


def test_power_zero_when_real_part_vanishes():
    G = np.array([[1.0 + 0j]])
    beta = np.array([[-1j]])
    assert fp.update_powers(G, np.array([0.0]), beta, 1.0, Mode.SIC).p[0] == 0.0


def test_power_with_vanishing_coefficient():
    # User 2 has a zero channel, so a_2 = 0 and B_2 = 0.
    G = np.array([[1.0 + 0j, 0.0 + 0j]])
    beta = np.array([[1.0 + 0j, 0.0 + 0j]])
    _, B = fp.power_coefficients(G, np.zeros(2), beta, Mode.SIC)
    assert B[1] == 0.0
    p = fp.update_powers(G, np.zeros(2), beta, 2.0, Mode.SIC).p
    np.testing.assert_array_equal(p, [1.0, 0.0])


def _check_power_against_grid(rng, make_instance, mode, instances, points):
    grid = np.linspace(0.0, 1.0, points)
    sqrt_grid = np.sqrt(grid)
    spacing = grid[1]
    for _ in range(instances):
        G, p, sigma2 = make_instance(rng, 3, 3)
        alpha, beta = _optimal_aux(G, p, sigma2, mode)
        G_new = G + 0.3 * (rng.standard_normal(G.shape) + 1j * rng.standard_normal(G.shape))
        a, B = fp.power_coefficients(G_new, alpha, beta, mode)
        p_star = fp.update_powers(G_new, alpha, beta, 1.0, mode).p
        for m in range(3):
            f3 = grid * B[m] - 2.0 * a[m].real * sqrt_grid
            f3_star = p_star[m] * B[m] - 2.0 * a[m].real * np.sqrt(p_star[m])
            assert f3_star <= f3.min() + 1e-12 * max(1.0, abs(f3.min()))
            assert abs(p_star[m] - grid[np.argmin(f3)]) <= 2 * spacing


@pytest.mark.parametrize("mode", list(Mode))
def test_power_update_matches_grid_search(rng, make_instance, mode):
    _check_power_against_grid(rng, make_instance, mode, instances=100, points=1_000_001)


@pytest.mark.slow
@pytest.mark.parametrize("mode", list(Mode))
def test_power_update_matches_grid_search_on_many_instances(rng, make_instance, mode):
    _check_power_against_grid(rng, make_instance, mode, instances=1000, points=100_001)


@pytest.mark.parametrize("mode", list(Mode))
def test_power_update_is_feasible(rng, make_instance, mode):
    for _ in range(200):
        G, p, sigma2 = make_instance(rng, 2, 4)
        alpha, beta = _optimal_aux(G, p, sigma2, mode)
        G_new = G * np.exp(1j * rng.uniform(0, 2 * np.pi, size=G.shape))
        out = fp.update_powers(G_new, alpha, beta, 0.8, mode)
        assert out.feasible(0.8)


# ── block ascent ─────────────────────────────────────────────────────────────

@pytest.mark.parametrize("mode", list(Mode))
def test_blocks_do_not_decrease_surrogates(rng, make_instance, mode):
    for _ in range(200):
        G, p, sigma2 = make_instance(rng, 3, 4)
        alpha_old = rng.uniform(0.1, 3.0, size=4)
        beta_old = 0.5 * (rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4)))

        alpha = fp.update_alpha(G, p, sigma2, mode)
        assert fp.surrogate_f1(alpha, G, p, sigma2, mode) >= fp.surrogate_f1(alpha_old, G, p, sigma2, mode) - 1e-10

        before = fp.surrogate_f2(alpha_old, beta_old, G, p, sigma2, mode)
        beta = fp.update_beta(G, p, alpha_old, sigma2, mode)
        after_beta = fp.surrogate_f2(alpha_old, beta, G, p, sigma2, mode)
        assert after_beta >= before - 1e-10

        aux = fp.update_aux(G, p, sigma2, mode)
        after_aux = fp.surrogate_f2(aux.alpha, aux.beta, G, p, sigma2, mode)
        assert after_aux >= before - 1e-10

        G_new = G + 0.2 * (rng.standard_normal(G.shape) + 1j * rng.standard_normal(G.shape))
        start = fp.surrogate_f2(aux.alpha, aux.beta, G_new, p, sigma2, mode)
        p_new = fp.update_powers(G_new, aux.alpha, aux.beta, 2.0, mode).p
        assert fp.surrogate_f2(aux.alpha, aux.beta, G_new, p_new, sigma2, mode) >= start - 1e-10


@pytest.mark.parametrize("mode", list(Mode))
def test_b_is_the_power_coefficient_of_f2(rng, make_instance, mode):
    for _ in range(20):
        N, M = rng.integers(1, 4, size=2)
        G, p, sigma2 = make_instance(rng, N, M)
        alpha, beta = _optimal_aux(G, p, sigma2, mode)
        _, B = fp.power_coefficients(G, alpha, beta, mode)
        for k in range(M):
            # F2 as a function of s = sqrt(p_k) is c + 2 A s - B s^2.
            values = []
            for s in (0.0, 1.0, 2.0):
                q = p.copy()
                q[k] = s * s
                values.append(fp.surrogate_f2(alpha, beta, G, q, sigma2, mode))
            second = -(values[2] - 2 * values[1] + values[0]) / 2.0
            assert second == pytest.approx(B[k], rel=1e-9, abs=1e-12)
