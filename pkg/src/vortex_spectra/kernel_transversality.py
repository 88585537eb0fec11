"""Kernel generators, range density, and the transversality integrals.

At a certified dispersion root omega_m the mode-m kernel is spanned by

    h*(r) = r^m F(r) mu0(r) int_1^r (F^2 s^(2m+1))^-1
                                int_0^s F(t) t^(2m+1) (omega_m - f0(t)/2) dt ds,

normalized so that -H_m[h*](1)/G_m(1) = 1/(2(m+1)).  The crossing
condition of the bifurcation argument reduces to the nonvanishing of

    I_m = int_0^1 nu r^(2m+1) F (H1 + H2 + H3) dr,

whose three parts are assembled from the same cumulative quantities as
h*.  In the focusing regime the large-m behavior of I_m is governed by
the constant kappa >= 1/2, computable either as a logarithmic integral
or in Laplace form; the two evaluations cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import grids
from .errors import NotARoot, ToleranceNotMet, WrongRegime
from .modes import omega_hat
from .sturm import _FINE_ORDER, _sl_matrix, lower_moment_matrix, solve_generator

__all__ = [
    "KernelGenerator",
    "TransversalityReport",
    "kernel_generator",
    "range_density",
    "range_membership",
    "transversality",
    "kappa_constant",
]


@lru_cache(maxsize=24)
def _cached_generator(profile, omega, m, tol, grid_size):
    return solve_generator(profile, omega, m, tol=tol, grid_size=grid_size)


@lru_cache(maxsize=8)
def _ci(grid_size):
    return grids.cumulative_matrix(grids.cheb_grid(grid_size))


@dataclass(frozen=True, eq=False)
class KernelGenerator:
    """Radial kernel profile h*_m with its consistency metadata."""

    m: int
    omega_m: float
    grid: np.ndarray
    h_star: np.ndarray
    normalization_check: float
    kernel_residual: float
    generator: object  # GeneratorSolution backing this kernel

    def __call__(self, r):
        g = grids.cheb_grid(len(self.grid))
        return grids.interpolate(g, self.h_star)(r)


@dataclass(frozen=True)
class TransversalityReport:
    """Crossing-condition data at a certified root."""

    m: int
    omega_m: float
    I_m: float
    parts: tuple
    kappa: float
    kappa_laplace: float
    verdict: bool
    error_bar: float
    dominance: float  # |I3| / (|I1| + |I2|), the focusing mechanism


def _zeta_residual(profile, gen):
    from .dispersion import _zeta_from_generator

    return abs(_zeta_from_generator(profile, gen))


def _outer_integral(profile, gen):
    """int_1^r of C(s)/(F^2 s^(2m+1)) with C the weighted inner moment."""
    m = gen.n
    r = gen.grid
    inner = gen.F * (gen.omega - 0.5 * profile.f0(r))
    scaled = lower_moment_matrix(len(r), 2 * m + 1) @ inner
    z = scaled / gen.F ** 2
    cum = _ci(len(r)) @ z
    return cum - cum[-1]


def kernel_generator(profile, m, omega_m, tol=1e-8, grid_size=512):
    """Construct the normalized kernel generator at a certified root.

    Raises NotARoot if |zeta_m(omega_m)| exceeds tol; the defining
    integral-equation residual and the normalization identity are both
    certified to 100*tol.
    """
    gen = _cached_generator(profile, float(omega_m), m,
                            max(1e-12, 1e-4 * tol), grid_size)
    zres = _zeta_residual(profile, gen)
    if zres > tol:
        raise NotARoot(
            f"|zeta_{m}({omega_m})| = {zres:.3e} exceeds tol {tol:.1e}")
    r = gen.grid
    mu0v = gen.sigma * gen.nu_values
    outer = _outer_integral(profile, gen)
    h_star = r ** m * gen.F * mu0v * outer
    h_star[-1] = 0.0  # exact boundary zero; outer(1) = 0 by construction

    g1 = m * (omega_m - omega_hat(profile, m))
    h_moment = float((lower_moment_matrix(len(r), m + 1) @ h_star)[-1])
    normalization = -h_moment / g1

    residual = _kernel_equation_residual(profile, gen, h_star, h_moment, g1)
    bound = 100.0 * tol
    if abs(normalization - 0.5 / (m + 1.0)) > bound:
        raise ToleranceNotMet(
            f"kernel normalization {normalization!r} misses 1/(2(m+1)) "
            f"by more than {bound:.1e}")
    if residual > bound:
        raise ToleranceNotMet(
            f"kernel equation residual {residual:.3e} exceeds {bound:.1e}")
    return KernelGenerator(
        m=m,
        omega_m=float(omega_m),
        grid=r,
        h_star=h_star,
        normalization_check=normalization,
        kernel_residual=residual,
        generator=gen,
    )


def _kernel_equation_residual(profile, gen, h_star, h_moment, g1):
    """Sup-norm defect of the defining integral equation of h*.

    h - mu0/(2m r^m) H_m[h] + H_m[h](1)/(2m G_m(1)) mu0 r G_m = 0,
    evaluated in the overflow-safe split of H_m.
    """
    m = gen.n
    r = gen.grid
    mu0v = gen.sigma * gen.nu_values
    phi = gen.F * mu0v * (_outer_integral(profile, gen))  # h* = r^m phi
    ci = _ci(len(r))
    lower_part = ci @ (r * phi)
    upper = lower_part[-1] - lower_part           # int_r^1 s phi ds
    scaled = lower_moment_matrix(len(r), 2 * m + 1) @ phi
    h_over = (mu0v / (2.0 * m)) * (r ** m * upper + r ** (m + 1) * scaled)
    gvals = _g_values(profile, gen.omega, m, r)
    forcing = h_moment / (2.0 * m * g1) * mu0v * r * gvals
    return float(np.max(np.abs(h_star - h_over + forcing)))


def _g_values(profile, omega, n, r_nodes):
    grid = grids.cheb_grid(len(r_nodes))
    from .operator_lab import g_field

    return g_field(profile, omega, n, grid)


def range_density(profile, m, omega_m, r, tol=1e-8, grid_size=512):
    """Radial part nu(r) F(r) r^m of the range-characterizing density."""
    gen = _cached_generator(profile, float(omega_m), m,
                            max(1e-12, 1e-4 * tol), grid_size)
    if _zeta_residual(profile, gen) > tol:
        raise NotARoot(f"omega={omega_m!r} is not a mode-{m} root")
    grid = grids.cheb_grid(grid_size)
    r_arr = np.asarray(r, dtype=float)
    fvals = grids.interpolate(grid, gen.F)(r_arr)
    nuv = grids.interpolate(grid, gen.nu_values)(r_arr)
    out = nuv * fvals * r_arr ** m
    return float(out) if np.ndim(r) == 0 else out


def range_membership(profile, m, omega_m, d, tol=1e-8, grid_size=512):
    """Linear form int_0^1 nu F r^(m+1) d(r) dr; zero means d is in range.

    `d` may be a callable on [0, 1] or samples on the generator grid.
    """
    gen = _cached_generator(profile, float(omega_m), m,
                            max(1e-12, 1e-4 * tol), grid_size)
    if _zeta_residual(profile, gen) > tol:
        raise NotARoot(f"omega={omega_m!r} is not a mode-{m} root")
    r = gen.grid
    dv = d(r) if callable(d) else np.asarray(d, dtype=float)
    integrand = gen.nu_values * gen.F * dv
    return float((lower_moment_matrix(len(r), m + 1) @ integrand)[-1])


def transversality(profile, m, omega_m, tol=1e-8, grid_size=512):
    """Assemble the crossing integral I_m and its three parts.

    The verdict is true when |I_m| clears ten times the error bar; the
    bar combines the quadrature-order sensitivity of each part with the
    generator residual.  kappa is attached in the focusing regime (it
    needs f0 < 0) and NaN otherwise.
    """
    kg = kernel_generator(profile, m, omega_m, tol=tol, grid_size=grid_size)
    gen = kg.generator
    r = gen.grid
    c = profile.constants
    outer = _outer_integral(profile, gen)
    inv_gap = 1.0 / (omega_m - profile.inner_mean_tilde(r * r))
    h1 = 4.0 * (m + 1.0) * inv_gap * gen.F * outer
    h2 = -(r * r)
    g1 = m * (omega_m - omega_hat(profile, m))
    ci = _ci(len(r))
    first_moment = ci @ (r * profile.f0(r))
    scaled_f0 = lower_moment_matrix(len(r), 2 * m + 1) @ profile.f0(r)
    h3 = (m * omega_m * r * r + c.kappa2 - (m + 1.0) * first_moment
          + (m + 1.0) * r * scaled_f0) / g1

    base = lower_moment_matrix(len(r), 2 * m + 1)
    fine = _sl_matrix(len(r), "chebyshev", 2 * m + 1, _FINE_ORDER)
    parts, parts_fine = [], []
    for h in (h1, h2, h3):
        integrand = gen.nu_values * gen.F * h
        parts.append(float((base @ integrand)[-1]))
        parts_fine.append(float((fine @ integrand)[-1]))
    i_m = sum(parts)
    scale = sum(abs(p) for p in parts)
    error_bar = (sum(abs(a - b) for a, b in zip(parts, parts_fine))
                 + 10.0 * gen.residual * scale + 1e-15 * scale)
    if c.f0_at_1 < 0:
        kappa, kappa_laplace = kappa_constant(profile)
    else:
        kappa = kappa_laplace = float("nan")
    dominance = abs(parts[2]) / max(abs(parts[0]) + abs(parts[1]), 1e-300)
    return TransversalityReport(
        m=m,
        omega_m=float(omega_m),
        I_m=i_m,
        parts=tuple(parts),
        kappa=kappa,
        kappa_laplace=kappa_laplace,
        verdict=bool(abs(i_m) > 10.0 * error_bar),
        error_bar=error_bar,
        dominance=dominance,
    )


def kappa_constant(profile):
    """The focusing crossing constant, by two independent routes.

    Direct:   kappa = 1 - f0(1)/2 int_0^1 dr / (c log r + f0(1)),
    Laplace:  kappa = 1/2 + 1/2 int_0^1 exp(-mu u/(1-u)) du,
    with c = int_0^1 s^2 f0'(s) ds and mu = -f0(1)/c, requiring mu > 0
    (negative profiles).  Both exceed 1/2 and agree to quadrature
    accuracy.
    """
    profile.validation
    if profile.kind == "polynomial":
        coef = np.array(profile.coeffs)
        k = np.arange(coef.size)
        c = float(np.sum(k * coef / (k + 1.0)))
    else:
        c, _ = quad(lambda s: s * s * profile.f0_prime(s), 0.0, 1.0,
                    epsabs=1e-14, epsrel=1e-12, limit=200)
    f01 = profile.constants.f0_at_1
    mu = -f01 / c
    if mu <= 0:
        raise WrongRegime("kappa is defined for negative profiles (mu > 0)")
    direct, _ = quad(lambda x: 1.0 / (np.log(x) * c + f01), 0.0, 1.0,
                     epsabs=1e-14, epsrel=1e-12, limit=400)
    kappa = 1.0 - 0.5 * f01 * direct
    # tau = u/(1-u) maps the Laplace tail onto (0, 1) with unit Jacobian
    laplace, _ = quad(lambda u: np.exp(-mu * u / (1.0 - u)), 0.0, 1.0,
                      epsabs=1e-14, epsrel=1e-12, limit=400)
    kappa_laplace = 0.5 + 0.5 * laplace
    return kappa, kappa_laplace
