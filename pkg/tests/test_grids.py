import numpy as np
import pytest
from scipy.integrate import quad

from vortex_spectra import grids


def exact_lower(f, p, r):
    hint = [r * (1.0 - 5.0 / (p + 1)), r * (1.0 - 20.0 / (p + 1))] \
        if p > 40 else None
    val, _ = quad(lambda s: np.exp(p * np.log(s / r)) * f(s), 0.0, r,
                  epsabs=1e-16, epsrel=1e-14, limit=400,
                  points=[h for h in hint or [] if 0 < h < r] or None)
    return val


def exact_upper(f, p, r):
    hint = [min(1.0, r * (1.0 + 5.0 / (p + 1)))] if p > 40 else None
    val, _ = quad(lambda s: np.exp(p * np.log(r / s)) * f(s), r, 1.0,
                  epsabs=1e-16, epsrel=1e-14, limit=400,
                  points=[h for h in hint or [] if r < h < 1] or None)
    return val


@pytest.mark.parametrize("make_grid", [grids.cheb_grid, grids.legendre_grid])
def test_cumulative_matrix_monomials(make_grid):
    g = make_grid(65)
    c = grids.cumulative_matrix(g)
    r = g.nodes
    for k in (0, 1, 4, 9):
        assert np.max(np.abs(c @ r ** k - r ** (k + 1) / (k + 1))) < 1e-14


def test_cumulative_matrix_smooth():
    g = grids.cheb_grid(129)
    c = grids.cumulative_matrix(g)
    r = g.nodes
    f = np.exp(r) * np.cos(3 * r)
    exact = (np.exp(r) * (np.cos(3 * r) + 3 * np.sin(3 * r)) - 1.0) / 10.0
    assert np.max(np.abs(c @ f - exact)) < 1e-14


@pytest.mark.parametrize("p", [1, 7, 81, 401])
@pytest.mark.parametrize("make_grid", [grids.cheb_grid, grids.legendre_grid])
def test_scaled_lower_matrix(make_grid, p):
    g = make_grid(128)
    mat = grids.scaled_lower_matrix(g, p)
    vals = mat @ np.exp(g.nodes)
    for i in (1, 42, 100, 127):
        r = g.nodes[i]
        if r == 0.0:
            continue
        assert vals[i] == pytest.approx(exact_lower(np.exp, p, r),
                                        abs=1e-13, rel=1e-11)


@pytest.mark.parametrize("p", [1, 7, 81])
@pytest.mark.parametrize("make_grid", [grids.cheb_grid, grids.legendre_grid])
def test_scaled_upper_matrix(make_grid, p):
    g = make_grid(128)
    mat = grids.scaled_upper_matrix(g, p)
    vals = mat @ np.exp(g.nodes)
    for i in (1, 42, 100):
        r = g.nodes[i]
        if r == 0.0:
            continue
        assert vals[i] == pytest.approx(exact_upper(np.exp, p, r),
                                        abs=1e-12, rel=1e-10)


def test_interpolation_reproduces_nodes_and_values():
    g = grids.cheb_grid(33)
    vals = np.sin(5 * g.nodes)
    f = grids.interpolate(g, vals)
    assert f(g.nodes[7]) == pytest.approx(vals[7], abs=1e-15)
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(f(x) - np.sin(5 * x))) < 1e-9


def test_integral_row():
    g = grids.legendre_grid(64)
    row = grids.integral_row(g, 0.3, 0.9)
    f = np.exp(g.nodes)
    assert row @ f == pytest.approx(np.exp(0.9) - np.exp(0.3), rel=1e-13)
