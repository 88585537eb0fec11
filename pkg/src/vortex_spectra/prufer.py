"""Mode-zero analysis: phase transport, non-oscillation, exceptional set.

The radial (mode-zero) kernel equation transforms, through y = 1/(1-r),
into a second-order problem on [1, infinity) whose solutions are tracked
in polar (amplitude, phase) form:

    theta'(y) = cos^2(theta)/(y^2-y) + (y-1)/y^3 mu(y) sin^2(theta),
    rho'(y)   = (1/(y^2-y) - (y-1)/y^3 mu(y)) rho sin(theta) cos(theta),

with mu(y) = nu(1 - 1/y), theta(1) = pi/2, rho(1) = 1.  The phase is
strictly increasing and has a finite limit theta_bar; the values of
omega where theta_bar hits a multiple of pi form the finite exceptional
set where the radial operator loses injectivity.

theta_bar is computed exactly (to integrator tolerance) by switching to
the compactified variable z = 1/y, whose transported equation

    dtheta/dz = -[cos^2(theta)/(1-z) + (1-z) nu(1-z) sin^2(theta)]

is regular all the way to z = 0 (= y = infinity), so no truncation tail
is left over; the recorded tail bound is the actual gap between
theta(Y_max) and the limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ForbiddenOmega, TailNotConverged
from .profile import _chebyshev_points

__all__ = [
    "PruferTrace",
    "prufer_trace",
    "theta_bar",
    "kneser_margin",
    "mode0_exceptional_set",
]

_IVP_OPTS = dict(method="DOP853", rtol=1e-11, atol=1e-12)


def _nu_above_kappa2(profile, omega, r):
    """nu for omega >= kappa2, valid at the closure omega = kappa2.

    Bypasses the open-interval check of profile.nu: for r < 1 the
    denominator omega - J(r) stays positive even at omega = kappa2.
    """
    r = np.asarray(r, dtype=float)
    return profile.slope(r) / (omega - profile.inner_mean_tilde(r * r))


@dataclass(frozen=True, eq=False)
class PruferTrace:
    """Phase and amplitude along [1, Y_max] with the phase limit."""

    omega: float
    y_nodes: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    theta_bar: float
    tail_bound: float
    y_max: float
    tol: float


def _require_focusing(profile, omega, strict=True):
    c = profile.constants
    if (omega <= c.kappa2) if strict else (omega < c.kappa2):
        raise ForbiddenOmega(omega, c.kappa1, c.kappa2)


def prufer_trace(profile, omega, tol=1e-8, y_cap=1e6, n_nodes=400):
    """Integrate the phase/amplitude system and estimate theta_bar.

    Y_max is the smallest point where the certified phase-tail majorant
       int_Y^inf [1/(y^2-y) + sup(nu)/y^2] dy = log(Y/(Y-1)) + sup(nu)/Y
    drops below tol (capped at y_cap); theta_bar itself comes from the
    compactified continuation, so the recorded tail bound is the true
    remaining gap rather than the majorant.
    """
    _require_focusing(profile, omega, strict=True)
    sup_nu = float(np.max(_nu_above_kappa2(
        profile, omega, _chebyshev_points(512)[:-1])))

    def tail(y):
        return np.log(y / (y - 1.0)) + sup_nu / y

    y_max = 10.0
    while tail(y_max) >= tol and y_max < y_cap:
        y_max = min(y_cap, 10.0 * y_max)

    def rhs(y, state):
        th, rho = state
        mu = _nu_above_kappa2(profile, omega, 1.0 - 1.0 / y)
        c, s = np.cos(th), np.sin(th)
        a = 1.0 / (y * y - y)
        b = (y - 1.0) / y ** 3 * mu
        return [a * c * c + b * s * s, (a - b) * rho * s * c]

    y0 = 1.0 + 1e-9
    nu0 = float(_nu_above_kappa2(profile, omega, 0.0))
    start = [np.pi / 2.0 + 0.5 * nu0 * (y0 - 1.0) ** 2, 1.0]
    # recorded nodes start at 1e-4 above 1 so successive theta values
    # differ by more than float resolution (strict monotonicity survives)
    nodes = 1.0 + np.geomspace(1e-4, y_max - 1.0, n_nodes - 1)
    sol = solve_ivp(rhs, (y0, y_max), start, t_eval=nodes,
                    dense_output=True, **_IVP_OPTS)
    if not sol.success:
        raise TailNotConverged(f"phase integration failed: {sol.message}")

    def rhs_z(z, state):
        th = state[0]
        c, s = np.cos(th), np.sin(th)
        mu = _nu_above_kappa2(profile, omega, 1.0 - z)
        return [-(c * c / (1.0 - z) + (1.0 - z) * mu * s * s)]

    tail_sol = solve_ivp(rhs_z, (1.0 / y_max, 0.0), [sol.y[0, -1]],
                         **_IVP_OPTS)
    if not tail_sol.success:
        raise TailNotConverged(
            f"compactified continuation failed: {tail_sol.message}")
    bar = float(tail_sol.y[0, -1])

    y_nodes = np.concatenate([[1.0], sol.t])
    theta = np.concatenate([[np.pi / 2.0], sol.y[0]])
    rho = np.concatenate([[1.0], sol.y[1]])
    trace = PruferTrace(
        omega=float(omega),
        y_nodes=y_nodes,
        theta=theta,
        rho=rho,
        theta_bar=bar,
        tail_bound=abs(bar - float(sol.y[0, -1])),
        y_max=float(y_max),
        tol=tol,
    )
    object.__setattr__(trace, "_dense", sol)  # kept for diagnostic tests
    return trace


def theta_bar(profile, omega, tol=1e-8):
    """Phase limit theta_bar(omega); strictly decreasing in omega."""
    return prufer_trace(profile, omega, tol=tol, n_nodes=8).theta_bar


def kneser_margin(profile, omega, y):
    """Non-oscillation margin y^2 V(y) with

        V(y) = 1/4 (y^2-y)^(-2) + nu(1 - 1/y) / y^4.

    Values staying below 1/4 as y grows certify finitely many zeros.
    """
    _require_focusing(profile, omega, strict=False)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 1.0):
        raise ValueError("y must exceed 1")
    mu = _nu_above_kappa2(profile, omega, 1.0 - 1.0 / y)
    out = y * y * (0.25 / (y * y - y) ** 2 + mu / y ** 4)
    return float(out) if out.ndim == 0 else out


def mode0_exceptional_set(profile, omega_window, grid=64, tol=1e-6,
                          trace_tol=1e-8):
    """Angular velocities in the window where theta_bar crosses k*pi.

    theta_bar is strictly decreasing, so each multiple of pi is crossed
    at most once; crossings are bracketed on the sample grid and refined
    by bisection on theta_bar to width tol.
    """
    lo, hi = omega_window
    c = profile.constants
    if not (c.kappa2 < lo < hi):
        raise ForbiddenOmega(lo, c.kappa1, c.kappa2)
    omegas = np.linspace(lo, hi, grid)
    bars = np.array([theta_bar(profile, w, tol=trace_tol) for w in omegas])
    crossings = []
    k_lo = int(np.ceil(bars.min() / np.pi))
    k_hi = int(np.floor(bars.max() / np.pi))
    for k in range(k_lo, k_hi + 1):
        target = k * np.pi
        idx = np.nonzero((bars[:-1] - target) * (bars[1:] - target) < 0)[0]
        if idx.size == 0:
            exact = np.nonzero(bars == target)[0]
            if exact.size:
                crossings.append(float(omegas[exact[0]]))
            continue
        a, b = float(omegas[idx[0]]), float(omegas[idx[0] + 1])
        fa = bars[idx[0]] - target
        while b - a > tol:
            mid = 0.5 * (a + b)
            fm = theta_bar(profile, mid, tol=trace_tol) - target
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
        crossings.append(0.5 * (a + b))
    return sorted(crossings)
