"""Radial density profiles and the scalar fields derived from them.

A profile is the radial density f0 on the unit disc, smooth in x = r^2
and strictly increasing in the sense inf f0'(r)/r > 0, with one sign on
[0, 1].  This module certifies those hypotheses, exposes the averaged
profile J(r) = int_0^1 s f0(rs) ds together with its extreme values
kappa1 = f0(0)/2 and kappa2 = int_0^1 s f0(s) ds, and evaluates the
compatibility field mu0 and its positive version nu used as the
Sturm-Liouville potential everywhere downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import BadTable, ForbiddenOmega, NonMonotone, SignChange

__all__ = [
    "Profile",
    "ProfileConstants",
    "ValidationReport",
    "polynomial_profile",
    "tabulated_profile",
    "load_profile",
    "validate_hypotheses",
    "constants",
    "inner_mean",
    "mu0",
    "nu",
    "sigma",
    "half_moment",
    "estimate_c0",
]

@dataclass(frozen=True)
class ProfileConstants:
    """Scalar invariants of a validated profile."""

    kappa1: float
    kappa2: float
    amplitude: float
    f0_at_0: float
    f0_at_1: float
    f0p_at_1: float


@dataclass(frozen=True)
class ValidationReport:
    """Result of the hypothesis checks on a profile."""

    grid_size: int
    min_slope: float
    f0_min: float
    f0_max: float
    sign: str
    smoothness: str
    passed: bool
    failures: tuple = ()

    def as_dict(self):
        return {
            "grid_size": self.grid_size,
            "min_slope": self.min_slope,
            "f0_min": self.f0_min,
            "f0_max": self.f0_max,
            "sign": self.sign,
            "smoothness": self.smoothness,
            "passed": self.passed,
            "failures": list(self.failures),
        }


@dataclass(frozen=True)
class Profile:
    """Radial density f0(r) = ftilde(r^2) on [0, 1].

    Immutable; every evaluation method is pure, so instances are safe to
    share across workers.  `kind` is "polynomial" (coeffs c_k with
    f0(r) = sum c_k r^(2k)) or "tabulated" (monotone cubic interpolant
    of ftilde through the (x, ftilde(x)) table).
    """

    kind: str
    coeffs: tuple = None
    table: tuple = None
    sign: str = "positive"
    beta: float = 0.5

    # -- interpolant machinery -------------------------------------------

    @cached_property
    def _pchip(self):
        x = np.array([row[0] for row in self.table])
        y = np.array([row[1] for row in self.table])
        return PchipInterpolator(x, y, extrapolate=True)

    @cached_property
    def _pchip_d(self):
        return self._pchip.derivative()

    @cached_property
    def _pchip_dd(self):
        return self._pchip.derivative(2)

    @cached_property
    def _pchip_anti(self):
        return self._pchip.antiderivative()

    # -- pointwise fields --------------------------------------------------

    def f0_tilde(self, x):
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(np.asarray(x, float),
                                                    np.array(self.coeffs))
        return self._pchip(x)

    def f0(self, r):
        r = np.asarray(r, dtype=float)
        return self.f0_tilde(r * r)

    def f0_tilde_prime(self, x):
        if self.kind == "polynomial":
            c = np.array(self.coeffs)
            dc = c[1:] * np.arange(1, c.size)
            if dc.size == 0:
                return np.zeros_like(np.asarray(x, float))
            return np.polynomial.polynomial.polyval(np.asarray(x, float), dc)
        return self._pchip_d(x)

    def f0_tilde_second(self, x):
        if self.kind == "polynomial":
            c = np.array(self.coeffs)
            if c.size < 3:
                return np.zeros_like(np.asarray(x, float))
            ddc = c[2:] * np.arange(2, c.size) * np.arange(1, c.size - 1)
            return np.polynomial.polynomial.polyval(np.asarray(x, float), ddc)
        return self._pchip_dd(x)

    def f0_prime(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * r * self.f0_tilde_prime(r * r)

    def slope(self, r):
        """f0'(r)/r, with the analytic limit 2*ftilde'(0) near r = 0."""
        r = np.asarray(r, dtype=float)
        out = 2.0 * self.f0_tilde_prime(r * r)
        return out

    def inner_mean_tilde(self, x):
        """Jtilde(x) = (1/2) int_0^1 ftilde(u x) du, so J(r) = Jtilde(r^2)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "polynomial":
            c = np.array(self.coeffs) / (2.0 * np.arange(1, len(self.coeffs) + 1))
            return np.polynomial.polynomial.polyval(x, c)
        scalar = x.ndim == 0
        flat = np.atleast_1d(x).astype(float)
        anti = self._pchip_anti
        out = np.empty_like(flat)
        small = flat < 1e-14
        out[small] = 0.5 * float(self.f0_tilde(0.0))
        big = ~small
        out[big] = (anti(flat[big]) - anti(0.0)) / (2.0 * flat[big])
        return float(out[0]) if scalar else out.reshape(x.shape)

    # -- cached certificates ------------------------------------------------

    @cached_property
    def validation(self):
        return validate_hypotheses(self, grid_size=256)

    @cached_property
    def constants(self):
        rep = self.validation  # noqa: F841  (raises if hypotheses fail)
        kappa1 = float(self.f0_tilde(0.0)) / 2.0
        kappa2 = float(self.inner_mean_tilde(1.0))
        f00 = float(self.f0_tilde(0.0))
        f01 = float(self.f0_tilde(1.0))
        return ProfileConstants(
            kappa1=kappa1,
            kappa2=kappa2,
            amplitude=f01 / f00,
            f0_at_0=f00,
            f0_at_1=f01,
            f0p_at_1=float(self.f0_prime(1.0)),
        )


def polynomial_profile(coeffs, beta=0.5):
    """Profile with f0(r) = sum_k coeffs[k] * r^(2k)."""
    coeffs = tuple(float(c) for c in coeffs)
    probe = np.polynomial.polynomial.polyval(
        np.linspace(0.0, 1.0, 101) ** 2, np.array(coeffs))
    sign = "positive" if probe[-1] > 0 else "negative"
    return Profile(kind="polynomial", coeffs=coeffs, sign=sign, beta=beta)


def tabulated_profile(x, values, beta=0.5):
    """Profile from sorted (x, ftilde(x)) samples on [0, 1]."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 4 or values.shape != x.shape:
        raise BadTable("need at least 4 matched (x, value) samples")
    if np.any(np.diff(x) <= 0):
        raise BadTable("table abscissae must be strictly increasing")
    if np.any(np.diff(values) <= 0):
        raise BadTable("table values must be strictly increasing "
                       "(monotone profile)")
    sign = "positive" if values[-1] > 0 else "negative"
    table = tuple((float(a), float(b)) for a, b in zip(x, values))
    return Profile(kind="tabulated", table=table, sign=sign, beta=beta)


def _chebyshev_points(n):
    j = np.arange(n)
    return 0.5 * (1.0 - np.cos(np.pi * j / (n - 1)))


def validate_hypotheses(profile, grid_size=256):
    """Certify monotonicity, constant sign and smoothness of a profile.

    Raises NonMonotone / SignChange / BadTable on failure; the raised
    error carries the report on its `.report` attribute.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    r = _chebyshev_points(grid_size)
    slopes = profile.slope(r)
    f0v = profile.f0(r)
    min_slope = float(np.min(slopes))
    f0_min, f0_max = float(np.min(f0v)), float(np.max(f0v))
    failures = []
    if not min_slope > 0.0:
        failures.append("NonMonotone")
    if f0_min > 0.0:
        sign = "positive"
    elif f0_max < 0.0:
        sign = "negative"
    else:
        sign = "indefinite"
        failures.append("SignChange")
    smoothness = "C2 in r^2 (exact)" if profile.kind == "polynomial" \
        else "C1 in r^2 (monotone cubic interpolant)"
    report = ValidationReport(
        grid_size=grid_size,
        min_slope=min_slope,
        f0_min=f0_min,
        f0_max=f0_max,
        sign=sign,
        smoothness=smoothness,
        passed=not failures,
        failures=tuple(failures),
    )
    if failures:
        err = NonMonotone if failures[0] == "NonMonotone" else SignChange
        exc = err(f"profile fails hypotheses: {', '.join(failures)}")
        exc.report = report
        raise exc
    if sign != profile.sign:
        exc = SignChange("declared sign disagrees with certified sign")
        exc.report = report
        raise exc
    return report


def constants(profile):
    """Scalar constants (kappa1, kappa2, amplitude, boundary data)."""
    return profile.constants


def inner_mean(profile, r):
    """J(r) = int_0^1 s f0(rs) ds; increases from kappa1 to kappa2."""
    profile.validation
    r = np.asarray(r, dtype=float)
    return profile.inner_mean_tilde(r * r)


def sigma(profile, omega):
    """Sign selector: -1 below kappa1 (defocusing), +1 above kappa2."""
    c = profile.constants
    if omega < c.kappa1:
        return -1.0
    if omega > c.kappa2:
        return 1.0
    raise ForbiddenOmega(omega, c.kappa1, c.kappa2)


def mu0(profile, omega, r):
    """Compatibility field mu0(r) = (f0'(r)/r) / (omega - J(r))."""
    sigma(profile, omega)  # validates omega and the profile
    r = np.asarray(r, dtype=float)
    out = profile.slope(r) / (omega - profile.inner_mean_tilde(r * r))
    return float(out) if out.ndim == 0 else out


def nu(profile, omega, r):
    """Positive potential nu = sigma * mu0 = |mu0|."""
    s = sigma(profile, omega)
    out = s * mu0(profile, omega, r)
    return out


def half_moment(profile, n):
    """int_0^1 s^(2n+1) f0(s) ds, exact for polynomial profiles."""
    if profile.kind == "polynomial":
        c = np.array(profile.coeffs)
        k = np.arange(c.size)
        return float(np.sum(c / (2.0 * (n + k + 1))))
    # substitute u = e^(-w/(n+1)) to keep the weight resolved for large n
    val, err = quad(
        lambda w: np.exp(-w) * profile.f0_tilde(np.exp(-w / (n + 1.0))),
        0.0, 40.0, epsabs=1e-14, epsrel=1e-12, limit=200,
    )
    return 0.5 * val / (n + 1.0)


def nu_tilde_derivative_at_zero(profile, omega):
    """d/dx of nu(sqrt(x)) at x = 0; feeds the generator's series start."""
    s = sigma(profile, omega)
    k1 = profile.constants.kappa1
    fp0 = float(profile.f0_tilde_prime(0.0))
    fpp0 = float(profile.f0_tilde_second(0.0))
    jp0 = fp0 / 4.0
    return s * 2.0 * (fpp0 * (omega - k1) + fp0 * jp0) / (omega - k1) ** 2


def estimate_c0(profile, theta, omega_count=24, r_count=400):
    """Empirical constant for the two-sided nu bound in the focusing band.

    Returns sup over (Omega, r) of
        nu(r) * (1-r)^(1-theta) * (Omega-kappa2)^theta * r / f0'(r),
    which the analysis only asserts to be finite (no explicit value);
    the sweep covers Omega - kappa2 from 1e-6 to 1e2 on a log scale.
    """
    c = profile.constants
    r = _chebyshev_points(r_count)[1:-1]
    j = profile.inner_mean_tilde(r * r)
    best = 0.0
    for gap in np.geomspace(1e-6, 1e2, omega_count):
        omega = c.kappa2 + gap
        vals = (1.0 - r) ** (1.0 - theta) * gap ** theta / (omega - j)
        best = max(best, float(np.max(vals)))
    return best


def load_profile(path):
    """Load a profile config (JSON or TOML-style key/value file)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = _parse_kv(text)
    kind = data.get("kind", "polynomial")
    beta = float(data.get("beta", 0.5))
    if kind == "polynomial":
        return polynomial_profile(data["coeffs"], beta=beta)
    if kind == "tabulated":
        table = np.asarray(data["table"], dtype=float)
        return tabulated_profile(table[:, 0], table[:, 1], beta=beta)
    raise BadTable(f"unknown profile kind {kind!r}")


def _parse_kv(text):
    """Minimal TOML-style parser: flat `key = value` lines.

    Values may be quoted strings, numbers, or bracketed number lists
    (one level of nesting for tables).
    """
    try:
        import tomllib

        return tomllib.loads(text)
    except ModuleNotFoundError:
        pass
    except Exception as exc:  # malformed TOML
        raise BadTable(f"cannot parse profile config: {exc}") from exc
    data = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadTable(f"cannot parse config line: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        data[key] = json.loads(value.replace("(", "[").replace(")", "]"))
    return data
