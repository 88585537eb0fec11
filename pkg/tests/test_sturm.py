import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from vortex_spectra import grids, profile as vp, sturm
from vortex_spectra.errors import ForbiddenOmega, WrongRegime
from vortex_spectra.profile import estimate_c0, nu, polynomial_profile


def hyp2f1_generator(n, u):
    """Independent Gauss-hypergeometric oracle for quadratic profiles.

    For f0 = B + A r^2 the generator equation transforms (in the
    variable u = A r^2 / (4 (omega - B/2))) into the hypergeometric
    equation with c = n+1, a+b = n, ab = -2, so the normalized solution
    is the plain series with term ratio (k^2 + n k - 2)/((n+1+k)(k+1)) u.
    """
    total = np.ones_like(u)
    term = np.ones_like(u)
    for k in range(4000):
        term = term * (k * k + n * k - 2.0) / ((n + 1.0 + k) * (k + 1.0)) * u
        total = total + term
        if np.max(np.abs(term)) < 1e-17 * np.max(np.abs(total)):
            break
    return total


CASES = [
    ([1.0, 1.0], 0.0, 3),
    ([1.0, 0.01], 0.35, 4),
    ([-2.0, 1.0], -0.7, 5),
    ([-2.0, 1.0], -0.72, 30),
]


@pytest.mark.parametrize("coeffs,omega,n", CASES)
def test_generator_matches_hypergeometric_oracle(coeffs, omega, n):
    p = polynomial_profile(coeffs)
    sol = sturm.solve_generator(p, omega, n, tol=1e-12)
    b, a = coeffs[0], coeffs[1]
    u = a * sol.grid ** 2 / (4.0 * (omega - b / 2.0))
    assert np.max(np.abs(sol.F - hyp2f1_generator(n, u))) < 1e-12
    assert sol.residual <= 1e-12


def test_generator_normalization_and_origin(p_quad):
    sol = sturm.solve_generator(p_quad, 0.0, 2)
    assert sol.F[0] == 1.0
    assert sol.Fprime[0] == 0.0
    assert sol.grid[0] == 0.0 and sol.grid[-1] == 1.0


def test_defocusing_monotone_with_exponential_bound(p_quad):
    sol = sturm.solve_generator(p_quad, 0.0, 3)
    assert sol.regime == "defocusing"
    assert np.all(np.diff(sol.F) > 0)
    r = sol.grid
    cumulative = grids.cumulative_matrix(grids.cheb_grid(len(r)))
    bound = np.exp(cumulative @ (r * sol.nu_values) / 6.0)
    assert np.all(sol.F >= 1.0 - 1e-14)
    assert np.all(sol.F <= bound + 1e-12)


def test_focusing_monotone_with_bracket(p_neg):
    k2 = p_neg.constants.kappa2
    sol = sturm.solve_generator(p_neg, k2 + 0.2, 8)
    assert sol.regime == "focusing"
    assert np.all(np.diff(sol.F) < 0)
    assert sol.F.min() >= 0.5 - 1e-12
    assert sol.F.max() <= 1.0 + 1e-14


def test_focusing_deviation_bound_extrapolates(p_neg):
    # fit the constant on small n, check the 1/(n gap) decay at larger n
    k2 = p_neg.constants.kappa2
    omega = k2 + 0.3
    gap = omega - k2

    def deviation(n):
        sol = sturm.solve_generator(p_neg, omega, n)
        return np.max(np.abs(sol.F - 1.0))

    c_fit = max(deviation(n) * n * gap for n in (6, 8))
    for n in (16, 32, 64):
        assert deviation(n) <= 1.2 * c_fit / (n * gap)


def test_forbidden_band_and_tolerance_floor(p_quad):
    with pytest.raises(ForbiddenOmega):
        sturm.solve_generator(p_quad, 0.6, 3)
    with pytest.raises(ValueError):
        sturm.solve_generator(p_quad, 0.0, 3, tol=1e-15)


def test_volterra_identity_residual(p_neg):
    # substitute (grid, F) into the integral form with scipy quadrature
    k2 = p_neg.constants.kappa2
    omega = k2 + 0.4
    n = 4
    sol = sturm.solve_generator(p_neg, omega, n)
    g = grids.cheb_grid(len(sol.grid))
    f_itp = grids.interpolate(g, sol.F)

    def integrand(s, r):
        return (1 - (s / r) ** (2 * n)) * s * nu(p_neg, omega, s) * f_itp(s)

    for r in (0.2, 0.55, 0.9, 1.0):
        integral, _ = quad(integrand, 0.0, r, args=(r,),
                           epsabs=1e-13, epsrel=1e-12, limit=200)
        reconstructed = 1.0 - integral / (2 * n)
        assert f_itp(r) == pytest.approx(reconstructed, abs=5e-12)


@pytest.mark.parametrize("coeffs,omega,n", [
    ([1.0, 1.0], -0.5, 2),
    ([-2.0, 1.0], -0.6, 6),
])
def test_independent_ode_stepper_matches(coeffs, omega, n):
    p = polynomial_profile(coeffs)
    tol = 1e-10
    sol = sturm.solve_generator(p, omega, n, tol=tol)
    sig = 1.0 if omega > p.constants.kappa2 else -1.0
    a1, a2 = sturm.generator_series_coefficients(p, omega, n)
    r0 = 1e-3

    def rhs(r, state):
        f, fp = state
        return [fp, -(2 * n + 1) / r * fp - sig * nu(p, omega, r) * f]

    start = [1 + a1 * r0 ** 2 + a2 * r0 ** 4, 2 * a1 * r0 + 4 * a2 * r0 ** 3]
    mask = sol.grid >= r0
    ivp = solve_ivp(rhs, (r0, 1.0), start, t_eval=sol.grid[mask],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    assert ivp.success
    assert np.max(np.abs(ivp.y[0] - sol.F[mask])) < 10 * tol


def test_rho_gap_examples(p_neg):
    k2 = p_neg.constants.kappa2
    sol = sturm.solve_generator(p_neg, k2 + 0.15, 12)
    assert sturm.rho_gap(sol, 1.0) == pytest.approx(0.0, abs=1e-13)
    assert sturm.rho_gap(sol, 0.0) == pytest.approx(1.0 - sol.F_at_1,
                                                    abs=1e-12)
    assert sturm.rho_gap(sol, 0.0) >= 0.0


def test_rho_gap_two_sided_bounds(p_neg):
    from vortex_spectra.modes import omega_hat

    k1 = p_neg.constants.kappa1
    k2 = p_neg.constants.kappa2
    n = 30
    omega = omega_hat(p_neg, n)
    sol = sturm.solve_generator(p_neg, omega, n)
    c0 = max(estimate_c0(p_neg, 1.0), 8.0)  # generous profile constant
    gap = omega - k2
    r = np.linspace(0.0, 0.99, 40)
    rho = sturm.rho_gap(sol, r)
    upper = c0 * (1 - r) / (n * gap)
    lower = (1 - r) / (c0 * n * (omega - k1))
    assert np.all(rho <= upper + 1e-13)
    assert np.all(rho >= lower - 1e-13)


def test_rho_gap_wrong_regime(p_quad):
    sol = sturm.solve_generator(p_quad, 0.0, 3)
    with pytest.raises(WrongRegime):
        sturm.rho_gap(sol, 0.5)


def test_defocusing_picard_contracts_without_direct_solve(p_slow):
    sol = sturm.solve_generator(p_slow, 0.35, 3)
    assert not sol.direct_solve
    assert sol.contraction < 0.5
