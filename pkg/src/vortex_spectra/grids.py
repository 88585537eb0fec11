"""Radial grids and product-integration machinery.

Everything downstream (the generator solver, the integral-operator
discretization, the kernel generator) reduces to three primitives on a
fixed ascending grid in [0, 1]:

* plain cumulative integration        C[f](r) = int_0^r f(s) ds
* scaled lower power moments          S_p[f](r) = r^(-p) int_0^r s^p f(s) ds
* scaled upper power integrals        U_p[f](r) = r^p int_r^1 s^(-p) f(s) ds

The power p can be in the hundreds, so s^p weights are never formed
globally: each primitive is assembled as a dense matrix acting on grid
values through an interval-to-interval recurrence whose ratios all lie
in [0, 1], with panelwise Gauss-Legendre quadrature against the
barycentric interpolant of the grid data.  This keeps full relative
accuracy where a naive antiderivative divided by r^p would lose every
digit to cancellation.
"""

from __future__ import annotations

from functools import lru_cache
from math import log

import numpy as np
from scipy.fft import dct

__all__ = [
    "RadialGrid",
    "cheb_grid",
    "legendre_grid",
    "interpolate",
    "cumulative_matrix",
    "scaled_lower_matrix",
    "scaled_upper_matrix",
    "integral_row",
]

_SPLIT_BUDGET = 8.0   # max variation exponent of the power weight per panel
_PRUNE = 1e-22        # drop panels whose weight never exceeds this
_MAX_DEPTH = 60


class RadialGrid:
    """Ascending nodes in [0, 1] with barycentric interpolation weights."""

    def __init__(self, nodes, bary_weights, kind):
        self.nodes = np.asarray(nodes, dtype=float)
        self.bary = np.asarray(bary_weights, dtype=float)
        self.kind = kind
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")

    def __len__(self):
        return self.nodes.size

    def interp_rows(self, points):
        """Rows of the interpolation matrix at the given points.

        Row q maps grid values to the interpolant value at points[q];
        points that coincide with nodes get exact unit rows.
        """
        pts = np.atleast_1d(np.asarray(points, dtype=float))
        diff = pts[:, None] - self.nodes[None, :]
        hit = np.abs(diff) < 1e-15 * np.maximum(1.0, np.abs(pts))[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = self.bary[None, :] / diff
        rows = w / w.sum(axis=1)[:, None]
        bad = hit.any(axis=1)
        if bad.any():
            rows[bad] = 0.0
            idx = np.argwhere(hit)
            rows[idx[:, 0], idx[:, 1]] = 1.0
        return rows


@lru_cache(maxsize=16)
def cheb_grid(n):
    """Chebyshev-Lobatto grid with n points, ascending on [0, 1]."""
    j = np.arange(n)
    nodes = 0.5 * (1.0 - np.cos(np.pi * j / (n - 1)))
    nodes[0], nodes[-1] = 0.0, 1.0
    bary = np.ones(n)
    bary[1::2] = -1.0
    bary[0] *= 0.5
    bary[-1] *= 0.5
    return RadialGrid(nodes, bary, kind="chebyshev")


@lru_cache(maxsize=16)
def legendre_grid(n):
    """Gauss-Legendre grid with n points, open in (0, 1).

    Carries the plain quadrature weights as .quad_weights since they
    come for free and callers need Lebesgue integrals over the nodes.
    """
    t, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (t + 1.0)
    # barycentric weights for Gauss nodes (Wang-Xiang closed form)
    bary = np.sqrt((1.0 - t * t) * w)
    bary[1::2] *= -1.0
    grid = RadialGrid(nodes, bary, kind="legendre")
    grid.quad_weights = 0.5 * w
    return grid


def interpolate(grid, values):
    """Callable barycentric interpolant through (grid.nodes, values)."""
    values = np.asarray(values, dtype=float)

    def f(x):
        scalar = np.isscalar(x) or np.ndim(x) == 0
        out = grid.interp_rows(x) @ values
        return float(out[0]) if scalar else out

    return f


def _gl_panel(a, b, order):
    t, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * t, half * w


def _lower_panels(a, b, top, p, order):
    """Panelization of [a, b] resolving the weight (s/top)^p.

    Integer powers up to the rule's algebraic exactness need no
    splitting; larger powers get bisected toward the peak at b, and
    panels whose weight never exceeds the prune threshold are dropped.
    """
    out = []

    def rec(lo, hi, depth):
        if p > 0 and (hi / top) ** p < _PRUNE:
            return
        if (
            p <= order
            or depth >= _MAX_DEPTH
            or (lo > 0 and p * log(hi / lo) <= _SPLIT_BUDGET)
        ):
            out.append((lo, hi))
            return
        mid = 0.5 * (lo + hi)
        rec(lo, mid, depth + 1)
        rec(mid, hi, depth + 1)

    rec(a, b, 0)
    return out


def _upper_panels(a, b, bottom, p, order):
    """Panelization of [a, b] resolving the weight (bottom/s)^p."""
    out = []

    def rec(lo, hi, depth):
        if p > 0 and (bottom / lo) ** p < _PRUNE:
            return
        if depth >= _MAX_DEPTH or p * log(hi / lo) <= _SPLIT_BUDGET:
            out.append((lo, hi))
            return
        mid = 0.5 * (lo + hi)
        rec(lo, mid, depth + 1)
        rec(mid, hi, depth + 1)

    rec(a, b, 0)
    return out


def _local_row(grid, panels, order, weight):
    if not panels:
        return np.zeros(len(grid))
    pts, wts = [], []
    for a, b in panels:
        x, w = _gl_panel(a, b, order)
        pts.append(x)
        wts.append(w * weight(x))
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    return wts @ grid.interp_rows(pts)


def scaled_lower_matrix(grid, p, order=12):
    """Matrix S with (S @ f)_i = r_i^(-p) * int_0^{r_i} s^p f(s) ds.

    The recurrence S_i = (r_{i-1}/r_i)^p S_{i-1} + local_i keeps every
    stored quantity O(||f||) for arbitrary p.
    """
    r = grid.nodes
    n = len(grid)
    mat = np.zeros((n, n))
    prev = np.zeros(n)
    for i in range(n):
        b = r[i]
        if b == 0.0:
            continue  # S(0) = 0 exactly
        a = r[i - 1] if i > 0 else 0.0
        panels = _lower_panels(a, b, b, p, order)
        row = _local_row(grid, panels, order,
                         lambda s, b=b: np.exp(p * np.log(s / b))
                         if p > 0 else np.ones_like(s))
        if a > 0.0:
            row = row + (a / b) ** p * prev
        mat[i] = row
        prev = row
    return mat


def scaled_upper_matrix(grid, p, order=12):
    """Matrix U with (U @ f)_i = r_i^p * int_{r_i}^1 s^(-p) f(s) ds."""
    r = grid.nodes
    n = len(grid)
    mat = np.zeros((n, n))
    if r[-1] >= 1.0:
        prev = np.zeros(n)
    else:
        panels = _upper_panels(r[-1], 1.0, r[-1], p, order)
        prev = _local_row(grid, panels, order,
                          lambda s, a=r[-1]: np.exp(p * np.log(a / s)))
        mat[-1] = prev
    for i in range(n - 2, -1, -1):
        a, b = r[i], r[i + 1]
        if a == 0.0:
            if p == 0:
                mat[i] = prev + _local_row(grid, [(0.0, b)], order,
                                           lambda s: np.ones_like(s))
            # for p >= 1 the r^p prefactor kills the limit at the origin
            continue
        panels = _upper_panels(a, b, a, p, order)
        row = _local_row(grid, panels, order,
                         lambda s, a=a: np.exp(p * np.log(a / s)))
        row = row + (a / b) ** p * prev
        mat[i] = row
        prev = row
    return mat


def integral_row(grid, a, b, order=12):
    """Row integrating the grid interpolant over [a, b]."""
    if b <= a:
        return np.zeros(len(grid))
    return _local_row(grid, [(a, b)], order, lambda s: np.ones_like(s))


def _cheb_coeff_matrix(n):
    """Map values at ascending Lobatto nodes to Chebyshev coefficients."""
    flipped_eye = np.eye(n)[::-1]
    coeffs = dct(flipped_eye, type=1, axis=0) / (n - 1)
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    return coeffs


def _cheb_value_matrix(npts, ncoef):
    """Evaluate ncoef Chebyshev coefficients at npts ascending nodes."""
    m = npts - 1
    j = np.arange(npts)
    theta = np.pi * (m - j) / m  # ascending t_j = cos(theta_j)
    k = np.arange(ncoef)
    return np.cos(np.outer(theta, k))


def _cheb_antideriv_map(n):
    """Coefficient map of the antiderivative vanishing at t = -1."""
    a = np.zeros((n + 1, n))
    a[1, 0] = 1.0
    if n > 2:
        a[1, 2] = -0.5
    for k in range(2, n + 1):
        if k - 1 < n:
            a[k, k - 1] += 1.0 / (2 * k)
        if k + 1 < n:
            a[k, k + 1] -= 1.0 / (2 * k)
    signs = (-1.0) ** np.arange(1, n + 1)
    a[0] = -(signs[:, None] * a[1:]).sum(axis=0)
    return a


def cumulative_matrix(grid, order=12):
    """Matrix C with (C @ f)_i = int_0^{r_i} fhat(s) ds.

    Chebyshev grids use the exact spectral antiderivative of the
    interpolant; other grids use panelwise Gauss-Legendre with a leading
    segment from 0 to the first node.
    """
    n = len(grid)
    if grid.kind == "chebyshev":
        coeff = _cheb_coeff_matrix(n)
        anti = _cheb_antideriv_map(n)
        vals = _cheb_value_matrix(n, n + 1)
        # d/dx = 2 d/dt on [0, 1], so the x-antiderivative carries 1/2
        return 0.5 * (vals @ (anti @ coeff))
    r = grid.nodes
    mat = np.zeros((n, n))
    ones = lambda s: np.ones_like(s)  # noqa: E731
    prev = _local_row(grid, [(0.0, r[0])], order, ones)
    mat[0] = prev
    for i in range(1, n):
        row = prev + _local_row(grid, [(r[i - 1], r[i])], order, ones)
        mat[i] = row
        prev = row
    return mat
