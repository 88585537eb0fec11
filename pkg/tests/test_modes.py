from fractions import Fraction

import numpy as np
import pytest

from vortex_spectra import modes
from vortex_spectra.errors import SingularOmega
from vortex_spectra.profile import polynomial_profile


def omega_hat_exact(coeffs, n):
    """Closed-form singular point via rational arithmetic."""
    c = [Fraction(x).limit_denominator(10 ** 12) for x in coeffs]
    kappa2 = sum(ck / (2 * k + 2) for k, ck in enumerate(c))
    moment = sum(ck / (2 * n + 2 * k + 2) for k, ck in enumerate(c))
    return kappa2 - Fraction(n + 1, n) * moment


def test_omega_hat_closed_forms(p_quad, p_neg):
    assert modes.omega_hat(p_quad, 1) == pytest.approx(-1 / 12, abs=1e-14)
    assert modes.omega_hat(p_neg, 10) == pytest.approx(
        float(omega_hat_exact([-2, 1], 10)), abs=1e-14)
    assert modes.omega_hat(p_neg, 10) == pytest.approx(-0.6958333333333333,
                                                       abs=1e-10)


def test_omega_hat_patch_limit():
    # nearly-flat profiles recover the classical (n-1)/(2n) eigenvalues
    eps = 1e-8
    p = polynomial_profile([1.0, eps])
    for n in (2, 3, 7):
        assert modes.omega_hat(p, n) == pytest.approx((n - 1) / (2 * n),
                                                      abs=1e-7)


def test_omega_hat_monotonicity(p_quad, p_neg):
    up = [modes.omega_hat(p_quad, n) for n in range(1, 65)]
    down = [modes.omega_hat(p_neg, n) for n in range(1, 65)]
    k2_pos = p_quad.constants.kappa2
    k2_neg = p_neg.constants.kappa2
    assert all(a < b for a, b in zip(up, up[1:]))
    assert all(a > b for a, b in zip(down, down[1:]))
    assert all(v < k2_pos for v in up)
    assert all(v > k2_neg for v in down)


@pytest.mark.parametrize("fixture", ["p_quad", "p_neg", "p_slow"])
def test_omega_hat_asymptotics(fixture, request):
    # |omega_hat_n - (kappa2 - f0(1)/(2n))| <= C / n^2 over n in [8, 64]
    p = request.getfixturevalue(fixture)
    c = p.constants
    scaled = [abs(modes.omega_hat(p, n) - (c.kappa2 - c.f0_at_1 / (2 * n)))
              * n * n for n in range(8, 65, 4)]
    assert max(scaled) < 2.0 * abs(c.f0_at_1) + 2.0 * abs(c.f0p_at_1)


def test_singular_set_structure(p_neg, p_quad):
    s = modes.singular_set(p_neg, 10, 3)
    assert len(s) == 4
    assert s[-1] == pytest.approx(-0.75, abs=1e-15)
    assert all(a > b for a, b in zip(s, s[1:]))
    s2 = modes.singular_set(p_quad, 1, 2)
    assert s2[-1] == pytest.approx(0.75, abs=1e-15)
    assert all(a < b for a, b in zip(s2, s2[1:]))


def test_g_boundary_value(p_quad, p_slow):
    assert modes.G_n(p_quad, 0.0, 1, 1.0) == pytest.approx(1 / 12, abs=1e-10)
    oh3 = modes.omega_hat(p_slow, 3)
    assert modes.G_n(p_slow, 0.4, 3, 1.0) == pytest.approx(3 * (0.4 - oh3),
                                                           abs=1e-10)
    # at the singular point the boundary value vanishes
    oh5 = modes.omega_hat(p_quad, 5)
    assert abs(modes.G_n(p_quad, oh5, 5, 1.0)) < 1e-12


def test_h_transform_examples():
    assert modes.H_n(lambda s: s, 1, 1.0) == pytest.approx(0.25, abs=1e-12)
    for n in (2, 4):
        assert modes.H_n(lambda s: s ** n, n, 1.0) == pytest.approx(
            1.0 / (2 * n + 2), abs=1e-12)
    assert modes.H_n(lambda s: 0.0 * s, 2, 0.7) == 0.0
    # interior value against the two defining pieces
    from scipy.integrate import quad
    r, n = 0.3, 2
    direct = (r ** (2 * n) * quad(lambda s: s ** (1 - n), r, 1.0)[0]
              + quad(lambda s: s ** (n + 1), 0.0, r)[0])
    assert modes.H_n(lambda s: np.ones_like(s), n, r) == pytest.approx(
        direct, abs=1e-12)


def test_a_coupling_example_and_cross_check(p_quad):
    a = modes.A_n(p_quad, 0.0, 1, lambda s: s)
    assert a == pytest.approx(-1.5, abs=1e-10)
    alt = -modes.H_n(lambda s: s, 1, 1.0) / (2 * modes.G_n(p_quad, 0.0, 1, 1.0))
    assert a == pytest.approx(alt, abs=1e-10)
    assert modes.A_n(p_quad, 0.0, 1, lambda s: 0.0 * s) == 0.0


@pytest.mark.parametrize("n", [1, 2, 5])
def test_a_both_routes_agree_for_random_polynomials(p_quad, n):
    rng = np.random.default_rng(2024 + n)
    coeffs = rng.standard_normal(4)
    h = lambda s: np.polynomial.polynomial.polyval(s, coeffs)  # noqa: E731
    omega = -0.4
    via_moment = modes.A_n(p_quad, omega, n, h)
    via_boundary = (-modes.H_n(h, n, 1.0)
                    / (2 * modes.G_n(p_quad, omega, n, 1.0)))
    assert via_moment == pytest.approx(via_boundary, abs=1e-10)


def test_a_singular_guard(p_quad):
    with pytest.raises(SingularOmega):
        modes.A_n(p_quad, modes.omega_hat(p_quad, 1), 1, lambda s: s)


def test_emitters(p_neg):
    csv_text = modes.omega_hat_table_csv(p_neg, [1, 2, 3])
    assert csv_text.splitlines()[0] == "n,omega_hat"
    assert len(csv_text.splitlines()) == 4
    import json

    payload = json.loads(modes.singular_set_json(p_neg, 10, 2))
    assert payload["omega_hat"][-1] == pytest.approx(-0.75)
    assert payload["indices"][-1] == "infinity"
