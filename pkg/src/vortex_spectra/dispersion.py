"""Dispersion function, root scans, and kernel-dimension certificates.

The scalar

    zeta_n(omega) = F(1) (omega - n/(n+1) kappa2)
                    + int_0^1 F(s) s^(2n+1) (f0(s) - 2 omega) ds

vanishes exactly at the angular velocities where the mode-n linearized
operator acquires a nontrivial kernel.  Positive profiles admit at most
finitely many roots, bracketed in (omega_hat_m, m kappa2/(m+1)) for
admissible low m (scarcity); negative profiles admit a root next to
every singular point omega_hat_m for m large (abundance), bracketed in
(omega_hat_m - m^(-alpha), omega_hat_m).

`certify` wraps a refined root with the margins establishing a
one-dimensional kernel: all higher harmonics nm keep |zeta_{nm}| away
from zero, and the root stays clear of the singular set and of the
mode-zero exceptional set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grids, operator_lab
from ._parallel import parallel_map
from .errors import (
    CertificateFailed,
    NotAdmissible,
    NoSignChange,
    NotARoot,
    SingularOmega,
    WrongRegime,
)
from .modes import omega_hat
from .prufer import theta_bar
from .sturm import lower_moment_matrix, solve_generator

__all__ = [
    "DispersionScan",
    "EigenvalueCertificate",
    "zeta",
    "scarcity_bound",
    "scarcity_window",
    "abundance_window",
    "scan_scarcity",
    "scan_abundance",
    "find_abundance_root",
    "certify",
    "T_value",
]

_GUARD = 1e-8  # absolute guard band around singular points


@dataclass(frozen=True, eq=False)
class DispersionScan:
    """Sampled zeta over an omega window plus refined roots."""

    n: int
    regime: str
    window: tuple
    omega_samples: np.ndarray
    zeta_values: np.ndarray
    brackets: list
    roots: list
    root_residuals: list
    root_tol: float
    sign_change_found: bool
    endpoint_values: tuple = ()

    def best_root(self):
        if not self.roots:
            raise NoSignChange(self.window[0], self.window[1],
                               *(self.endpoint_values or (np.nan, np.nan)))
        k = int(np.argmin(np.abs(self.root_residuals)))
        return self.roots[k]


@dataclass(frozen=True)
class EigenvalueCertificate:
    """Margins certifying a one-dimensional kernel at omega_m."""

    m: int
    omega_m: float
    zeta_residual: float
    higher_mode_margins: tuple
    singular_set_distance: float
    mode0_distance: float


def zeta(profile, omega, n, tol=1e-10, grid_size=512):
    """Evaluate the dispersion function at (n, omega)."""
    gen = solve_generator(profile, omega, n,
                          tol=max(1e-12, 0.01 * tol), grid_size=grid_size)
    return _zeta_from_generator(profile, gen)


def _zeta_from_generator(profile, gen):
    n = gen.n
    kappa2 = profile.constants.kappa2
    weight = gen.F * (profile.f0(gen.grid) - 2.0 * gen.omega)
    moment = float(
        (lower_moment_matrix(len(gen.grid), 2 * n + 1) @ weight)[-1])
    return gen.F_at_1 * (gen.omega - n / (n + 1.0) * kappa2) + moment


def scarcity_bound(profile):
    """Largest admissible m in the scarcity regime, f0(0)/(10 (f0(1)-f0(0)))."""
    c = profile.constants
    spread = c.f0_at_1 - c.f0_at_0
    if spread <= 0:
        return np.inf
    return c.f0_at_0 / (10.0 * spread)


def scarcity_window(profile, m):
    """Root bracket (omega_hat_m, m kappa2 / (m+1)) for positive profiles."""
    return omega_hat(profile, m), m * profile.constants.kappa2 / (m + 1.0)


def abundance_window(profile, m, alpha=1.5):
    """Root bracket (omega_hat_m - m^(-alpha), omega_hat_m), clamped
    above kappa2 by a relative guard."""
    oh = omega_hat(profile, m)
    kappa2 = profile.constants.kappa2
    lo = oh - m ** (-alpha)
    lo = max(lo, kappa2 + 0.05 * (oh - kappa2))
    return lo, oh


def _refine_root(fn, lo, hi, f_lo, f_hi, tol):
    """Bracket-preserving refinement: bisection then secant polish.

    Bisection narrows the bracket to width tol, then three secant steps
    restore the digits lost to plain halving; every secant iterate is
    clamped back into the current sign-change bracket.
    """
    a, b, fa, fb = lo, hi, f_lo, f_hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fa * fm <= 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    x0, x1, f0, f1 = a, b, fa, fb
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x2 = min(max(x2, a), b)
        f2 = fn(x2)
        if fa * f2 <= 0:
            b, fb = x2, f2
        else:
            a, fa = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return x1, f1


def _scan(profile, n, window, regime, tol, samples, grid_size,
          endpoint_values=()):
    lo, hi = window
    omegas = np.linspace(lo, hi, samples)
    # keep samples clear of the singular points omega_hat_{kn}
    hats = [omega_hat(profile, k * n) for k in range(1, 9)]
    keep = np.ones_like(omegas, dtype=bool)
    for oh in hats:
        keep &= np.abs(omegas - oh) > _GUARD
    omegas = omegas[keep]

    def ev(w):
        return zeta(profile, w, n, tol=tol, grid_size=grid_size)

    values = np.array(parallel_map(ev, omegas))
    idx = np.nonzero(values[:-1] * values[1:] < 0)[0]
    brackets = [(float(omegas[i]), float(omegas[i + 1])) for i in idx]
    roots, residuals = [], []
    for (a, b), i in zip(brackets, idx):
        width_tol = 1e-10 * (hi - lo)
        root, fr = _refine_root(ev, a, b, values[i], values[i + 1], width_tol)
        roots.append(float(root))
        residuals.append(abs(float(fr)))
    return DispersionScan(
        n=n,
        regime=regime,
        window=(float(lo), float(hi)),
        omega_samples=omegas,
        zeta_values=values,
        brackets=brackets,
        roots=roots,
        root_residuals=residuals,
        root_tol=tol,
        sign_change_found=bool(brackets),
        endpoint_values=tuple(endpoint_values),
    )


def scan_scarcity(profile, m, tol=1e-10, samples=17, grid_size=512):
    """Bracket and refine a dispersion root for a positive profile.

    Admissible symmetries satisfy 3 <= m <= f0(0)/(10 (f0(1)-f0(0)));
    the window endpoints carry opposite signs of zeta, so a missing sign
    change is reported on the scan rather than raised.
    """
    if profile.constants.f0_at_0 <= 0:
        raise WrongRegime("scarcity scan needs a positive profile")
    bound = scarcity_bound(profile)
    if not 3 <= m <= bound:
        raise NotAdmissible(
            f"m={m} outside the admissible scarcity range [3, {bound:.4g}]")
    lo, hi = scarcity_window(profile, m)
    lo, hi = lo + 10.0 * _GUARD, hi - 10.0 * _GUARD
    return _scan(profile, m, (lo, hi), "scarcity", tol, samples, grid_size)


def scan_abundance(profile, m, alpha=1.5, tol=1e-10, samples=17,
                   grid_size=512):
    """Bracket and refine a dispersion root for a negative profile.

    The window (omega_hat_m - m^(-alpha), omega_hat_m) should show
    zeta < 0 on the left and zeta > 0 at the singular point for m beyond
    the profile's effective threshold; both endpoint values are recorded
    on the scan so a missing sign change can be escalated by the caller.
    """
    if profile.constants.f0_at_1 >= 0:
        raise WrongRegime("abundance scan needs a negative profile")
    if not 1.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (1, 2)")
    lo, hi = abundance_window(profile, m, alpha)
    hi = hi - 10.0 * _GUARD
    z_lo = zeta(profile, lo, m, tol=tol, grid_size=grid_size)
    z_hi = zeta(profile, hi, m, tol=tol, grid_size=grid_size)
    return _scan(profile, m, (lo, hi), "abundance", tol, samples,
                 grid_size, endpoint_values=(float(z_lo), float(z_hi)))


def find_abundance_root(profile, m, alpha=1.5, tol=1e-10, samples=17,
                        grid_size=512, max_escalations=5):
    """Abundance scan that escalates m by 10 until a sign change appears.

    The effective threshold m0 is not known a priori; returns
    (m_used, scan) and raises NoSignChange carrying the last endpoint
    values when the escalation cap is exhausted.
    """
    m_try = m
    last = None
    for _ in range(max_escalations + 1):
        scan = scan_abundance(profile, m_try, alpha=alpha, tol=tol,
                              samples=samples, grid_size=grid_size)
        if scan.sign_change_found:
            return m_try, scan
        last = scan
        m_try += 10
    raise NoSignChange(last.window[0], last.window[1],
                       *last.endpoint_values)


def certify(profile, m, omega_m, N=8, tol=1e-8, grid_size=512):
    """Certify a one-dimensional kernel at a refined root omega_m.

    Checks |zeta_m| <= tol at the root, |zeta_{nm}| > 10 tol for
    n = 2..N, and positive separation from the singular set and from the
    mode-zero exceptional set.  For defocusing roots the mode-zero set
    lives entirely above kappa2, so the distance reduces to
    kappa2 - omega_m; focusing roots measure the phase distance of
    theta_bar(omega_m) to multiples of pi, converted to an omega scale
    through a finite-difference slope.
    """
    residual = abs(zeta(profile, omega_m, m, tol=tol, grid_size=grid_size))
    if residual > tol:
        raise NotARoot(
            f"|zeta_{m}({omega_m})| = {residual:.3e} exceeds tol {tol:.1e}")
    margins = []
    for k in range(2, N + 1):
        margin = abs(zeta(profile, omega_m, k * m, tol=tol,
                          grid_size=grid_size))
        margins.append((k * m, margin))
        if margin <= 10.0 * tol:
            raise CertificateFailed(
                f"mode {k * m}: |zeta| margin {margin:.3e} <= 10*tol")
    hats = [omega_hat(profile, k * m) for k in range(1, N + 1)]
    hats.append(profile.constants.kappa2)
    sing_dist = float(min(abs(omega_m - oh) for oh in hats))
    if not sing_dist > 0:
        raise CertificateFailed("root coincides with a singular point")

    kappa2 = profile.constants.kappa2
    if omega_m < profile.constants.kappa1:
        mode0_dist = kappa2 - omega_m
    else:
        bar = theta_bar(profile, omega_m)
        phase_gap = abs(bar / np.pi - round(bar / np.pi)) * np.pi
        delta = 1e-3 * (omega_m - kappa2)
        slope = (theta_bar(profile, omega_m + delta)
                 - theta_bar(profile, omega_m - delta)) / (2.0 * delta)
        mode0_dist = phase_gap / max(abs(slope), 1e-12)
    if not mode0_dist > 0:
        raise CertificateFailed("root sits on the mode-zero exceptional set")
    return EigenvalueCertificate(
        m=m,
        omega_m=float(omega_m),
        zeta_residual=residual,
        higher_mode_margins=tuple(margins),
        singular_set_distance=sing_dist,
        mode0_distance=float(mode0_dist),
    )


def T_value(profile, omega, n, N=256):
    """Spectral scalar T(n, omega); T = 1 exactly at dispersion roots.

    Solves (Id - sigma L_n) x = nu r G_n on the Nystrom nodes and
    integrates s^(n+1) x against the plain Gauss-Legendre weights.
    """
    oh = omega_hat(profile, n)
    g1 = n * (omega - oh)
    if abs(g1) < 1e-12 * max(1.0, abs(profile.constants.kappa2)):
        raise SingularOmega(f"omega={omega!r} at the singular point of mode {n}")
    op = operator_lab.discretize(profile, omega, n, N=N)
    grid = grids.legendre_grid(N)
    gvals = operator_lab.g_field(profile, omega, n, grid)
    rhs = op.nu_values * op.nodes * gvals
    x = operator_lab.solve_id_minus_L(op, rhs)
    integral = float(np.sum(op.plain_weights * op.nodes ** (n + 1) * x))
    return -op.sigma * integral / (2.0 * n * g1)
