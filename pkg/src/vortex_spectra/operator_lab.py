"""Discretization of the weighted integral operators L_0 and L_n.

The operators act on L^2 of the measure  d_lambda(s) = s/nu(s) ds  with
symmetric kernels; their semiseparable structure

    L_n[h](r) = nu(r)/(2n) [ r^(-n) int_0^r s^(n+1) h ds
                           + r^n    int_r^1 s^(1-n) h ds ]

lets the collocation matrix be assembled by product integration (exact
across the kernel's diagonal kink) instead of plain kernel-times-weight
sampling, which would stall at O(N^-2) accuracy.  Nodes and lambda
weights follow the open Gauss-Legendre rule on (0, 1); the symmetrized
matrix D^(1/2) M D^(-1/2) (D the lambda-weight diagonal) is averaged
with its transpose so standard symmetric eigensolvers apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import grids
from .errors import EigenSolveFailure, NearSingular
from .modes import omega_hat
from .profile import nu, sigma

__all__ = [
    "NystromOperator",
    "discretize",
    "quadratic_form",
    "smallest_eigenvalue",
    "solve_id_minus_L",
    "operator_norm",
    "g_field",
    "bordered_kernel_matrix",
    "bordered_condition",
]


@dataclass(frozen=True, eq=False)
class NystromOperator:
    """Quadrature discretization of L_n under the measure lambda.

    `weights` are the positive lambda-measure weights (w * s / nu);
    `plain_weights` the underlying Gauss-Legendre weights for Lebesgue
    integrals over the same nodes; `matrix` applies L_n to node values;
    `sym_matrix` is the exactly symmetric similarity transform used for
    spectral computations.
    """

    n: int
    omega: float
    sigma: float
    nodes: np.ndarray
    weights: np.ndarray
    plain_weights: np.ndarray
    nu_values: np.ndarray
    matrix: np.ndarray
    sym_matrix: np.ndarray


def discretize(profile, omega, n, N=256):
    """Product-integration collocation of L_n at N Gauss-Legendre nodes."""
    if N < 16:
        raise ValueError("need at least N = 16 quadrature nodes")
    if n < 0:
        raise ValueError("n must be >= 0")
    sig = sigma(profile, omega)
    grid = grids.legendre_grid(N)
    s = grid.nodes
    w = grid.quad_weights
    nuv = np.asarray(nu(profile, omega, s), dtype=float)
    lam = w * s / nuv
    if n == 0:
        mat = _radial_matrix(grid, nuv)
    else:
        lower = grids.scaled_lower_matrix(grid, n)
        upper = grids.scaled_upper_matrix(grid, n)
        mat = (nuv / (2.0 * n))[:, None] * ((lower + upper) * s[None, :])
    root = np.sqrt(lam)
    sym = root[:, None] * mat / root[None, :]
    sym = 0.5 * (sym + sym.T)
    # project the applying matrix onto the exactly self-adjoint form;
    # the shift is within the product-integration error and makes
    # <L h, g> = <h, L g> hold to rounding by construction
    mat = sym / root[:, None] * root[None, :]
    return NystromOperator(
        n=n,
        omega=float(omega),
        sigma=sig,
        nodes=s,
        weights=lam,
        plain_weights=w,
        nu_values=nuv,
        matrix=mat,
        sym_matrix=sym,
    )


def _radial_matrix(grid, nuv):
    """L_0[h](r) = nu(r) int_r^1 (1/t) int_0^t s h(s) ds dt."""
    s = grid.nodes
    ci = grids.cumulative_matrix(grid)
    inner = ci * s[None, :]              # h values -> int_0^t s h ds
    w_map = inner / s[:, None]           # -> (1/t) int_0^t s h ds
    tail = grids.integral_row(grid, s[-1], 1.0)
    total = ci[-1] + tail                # full integral over (0, 1)
    cu = total[None, :] - ci             # int_t^1 of the interpolant
    return nuv[:, None] * (cu @ w_map)


def quadratic_form(op, h):
    """<L_n h, h> in the lambda inner product, from the matrix."""
    h = np.asarray(h, dtype=float)
    return float((op.weights * h) @ (op.matrix @ h))


def smallest_eigenvalue(op):
    """Smallest eigenvalue of the symmetrized matrix (must be > 0)."""
    try:
        vals = sla.eigh(op.sym_matrix, eigvals_only=True)
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolveFailure(str(exc)) from exc
    return float(vals[0])


def operator_norm(op):
    """Spectral norm of L_n in the lambda inner product."""
    try:
        vals = sla.eigh(op.sym_matrix, eigvals_only=True)
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolveFailure(str(exc)) from exc
    return float(np.max(np.abs(vals)))


def solve_id_minus_L(op, rhs):
    """Solve (Id - sigma L_n) x = rhs with a pivoted dense solve.

    Always admissible in the defocusing regime (sigma = -1, positive
    definite shift); in the focusing regime the solve is attempted
    regardless of ||L|| and certified by its residual.  Raises
    NearSingular (with a condition estimate) when the residual exceeds
    1e-10 * ||rhs||_inf.
    """
    rhs = np.asarray(rhs, dtype=float)
    a = np.eye(len(op.nodes)) - op.sigma * op.matrix
    lu, piv = sla.lu_factor(a)
    x = sla.lu_solve((lu, piv), rhs)
    residual = float(np.max(np.abs(a @ x - rhs)))
    scale = float(np.max(np.abs(rhs))) or 1.0
    gecon = sla.get_lapack_funcs("gecon", (a,))
    rcond = gecon(lu, np.linalg.norm(a, 1), norm="1")[0]
    cond = 1.0 / max(rcond, 1e-300)
    if residual > 1e-10 * scale:
        raise NearSingular(
            cond,
            f"(Id - sigma L) solve residual {residual:.3e} exceeds "
            f"1e-10*||rhs|| (cond ~ {cond:.3g})",
        )
    return x


def g_field(profile, omega, n, grid):
    """G_n sampled on a radial grid, assembled in overflow-safe form."""
    s = grid.nodes
    f0v = profile.f0(s)
    kappa2 = profile.constants.kappa2
    ci = grids.cumulative_matrix(grid)
    first_moment = ci @ (s * f0v)
    scaled = grids.scaled_lower_matrix(grid, 2 * n + 1) @ f0v
    with np.errstate(divide="ignore"):
        low_power = np.where(s > 0, s ** (n - 1.0), 0.0 if n > 1 else np.inf)
    if n == 1:
        low_power = np.ones_like(s)
    return (
        n * omega * s ** (n + 1)
        + kappa2 * low_power
        - (n + 1.0) * low_power * first_moment
        + (n + 1.0) * s ** n * scaled
    )


def bordered_kernel_matrix(op, profile):
    """Full kernel-equation matrix Id - sigma L_n + v u^T for mode n >= 1.

    v(r) = mu0(r) r G_n(r) / (2 n G_n(1)) and u^T h = int_0^1 s^(n+1) h;
    this matrix becomes singular exactly at the dispersion roots, so its
    condition number is the natural proximity monitor.
    """
    if op.n < 1:
        raise ValueError("bordered system defined for n >= 1")
    grid = grids.legendre_grid(len(op.nodes))
    s = op.nodes
    gvals = g_field(profile, op.omega, op.n, grid)
    g1 = op.n * (op.omega - omega_hat(profile, op.n))
    mu0v = op.sigma * op.nu_values
    v = mu0v * s * gvals / (2.0 * op.n * g1)
    u = op.plain_weights * s ** (op.n + 1)
    return np.eye(len(s)) - op.sigma * op.matrix + np.outer(v, u)


def bordered_condition(op, profile):
    """2-norm condition number of the bordered kernel matrix."""
    return float(np.linalg.cond(bordered_kernel_matrix(op, profile)))
