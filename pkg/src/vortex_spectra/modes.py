"""Mode-indexed coefficients of the boundary linearization.

For each angular mode n this module computes the singular angular
velocity omega_hat_n (where the boundary linearization loses
injectivity), the boundary coefficient field G_n, the smoothing
transforms H_n, and the scalar coupling A_n, which admits the two
algebraically equivalent forms used to cross-check each other:

    A_n[h] = int_0^1 s^(n+1) h(s) ds / (2n (omega_hat_n - omega))
           = -H_n[h](1) / (2 G_n(1)).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import SingularOmega
from .profile import half_moment

__all__ = [
    "ModeCoefficients",
    "omega_hat",
    "singular_set",
    "G_n",
    "H_n",
    "A_n",
    "mode_coefficients",
    "omega_hat_table_csv",
    "singular_set_json",
]


@dataclass(frozen=True)
class ModeCoefficients:
    n: int
    omega_hat: float
    boundary_gap: float  # G_n(1) = n (omega - omega_hat_n)


def omega_hat(profile, n):
    """Singular angular velocity of mode n.

    omega_hat_n = int_0^1 s f0 ds - ((n+1)/n) int_0^1 s^(2n+1) f0 ds;
    tends to kappa2 like kappa2 - f0(1)/(2n) + O(1/n^2).
    """
    if n < 1:
        raise ValueError("mode index n must be >= 1")
    kappa2 = profile.constants.kappa2
    return kappa2 - (n + 1.0) / n * half_moment(profile, n)


def mode_coefficients(profile, omega, n):
    """Bundle (n, omega_hat_n, G_n(1)) for a supplied omega."""
    oh = omega_hat(profile, n)
    return ModeCoefficients(n=n, omega_hat=oh, boundary_gap=n * (omega - oh))


def singular_set(profile, m, n_max):
    """{omega_hat_{m}, ..., omega_hat_{n_max*m}} with the limit kappa2.

    The returned list carries the n = infinity member (kappa2) last;
    it is strictly monotone for one-signed profiles.
    """
    if m < 1 or n_max < 1:
        raise ValueError("m and n_max must be >= 1")
    values = [omega_hat(profile, m * j) for j in range(1, n_max + 1)]
    values.append(profile.constants.kappa2)
    return values


def _lower_moment(profile, n, r):
    """int_0^r s^(2n+1) f0(s) ds, scaled stably as r^(2n+2) * m(r)."""
    if profile.kind == "polynomial":
        c = np.array(profile.coeffs)
        k = np.arange(c.size)
        powers = 2 * n + 2 * k + 2
        return float(np.sum(c * r ** powers / powers))
    # s = r e^(-w/(2n+2)) turns the weight into a plain exponential
    val, _ = quad(
        lambda w: np.exp(-w) * profile.f0(r * np.exp(-w / (2 * n + 2.0))),
        0.0, 40.0, epsabs=1e-14, epsrel=1e-12, limit=200,
    )
    return r ** (2 * n + 2) * val / (2 * n + 2.0)


def _first_moment(profile, r):
    """int_0^r s f0(s) ds."""
    if profile.kind == "polynomial":
        c = np.array(profile.coeffs)
        k = np.arange(c.size)
        powers = 2 * k + 2
        return float(np.sum(c * r ** powers / powers))
    val, _ = quad(lambda s: s * profile.f0(s), 0.0, r,
                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def G_n(profile, omega, n, r):
    """Boundary coefficient field G_n(r); G_n(1) = n (omega - omega_hat_n).

    The r^-(n+1) weighted moment is evaluated in ratio form so large n
    neither overflows nor cancels.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    profile.validation
    kappa2 = profile.constants.kappa2
    lower = _lower_moment(profile, n, r)       # ~ r^(2n+2)
    scaled = lower / r ** (n + 1)              # ~ r^(n+1), no overflow
    return (
        n * omega * r ** (n + 1)
        + kappa2 * r ** (n - 1)
        - (n + 1.0) * r ** (n - 1) * _first_moment(profile, r)
        + (n + 1.0) * scaled
    )


def H_n(h, n, r, *, tol=1e-12):
    """Smoothing transform H_n[h](r) for a callable radial function h.

    H_n[h](r) = r^(2n) int_r^1 s^(1-n) h ds + int_0^r s^(n+1) h ds.
    The first integrand is evaluated as (r^2/s)^n * s * h(s), which stays
    bounded by |h| for every n; the second uses the exponential
    substitution for large n.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    upper = 0.0
    if r < 1.0:
        upper, _ = quad(
            lambda s: np.exp(n * (2.0 * np.log(max(r, 1e-300)) - np.log(s)))
            * s * h(s),
            r, 1.0, epsabs=tol, epsrel=tol, limit=400,
        ) if r > 0.0 else (0.0, 0.0)
    if r > 0.0:
        lower, _ = quad(
            lambda w: np.exp(-w) * h(r * np.exp(-w / (n + 2.0))),
            0.0, 40.0, epsabs=tol, epsrel=tol, limit=400,
        )
        lower *= r ** (n + 2) / (n + 2.0)
    else:
        lower = 0.0
    return upper + lower


def A_n(profile, omega, n, h, *, tol=1e-12):
    """Scalar coupling A_n[h] at angular velocity omega.

    Uses the moment form with omega_hat_n; raises SingularOmega when
    omega sits within 1e-12*max(1, |kappa2|) of the singular point.
    """
    oh = omega_hat(profile, n)
    kappa2 = profile.constants.kappa2
    if abs(omega - oh) < 1e-12 * max(1.0, abs(kappa2)):
        raise SingularOmega(
            f"omega={omega!r} within guard band of omega_hat_{n}={oh!r}")
    moment, _ = quad(
        lambda w: np.exp(-w) * h(np.exp(-w / (n + 2.0))),
        0.0, 40.0, epsabs=tol, epsrel=tol, limit=400,
    )
    moment /= (n + 2.0)
    return moment / (2.0 * n * (oh - omega))


def omega_hat_table_csv(profile, n_values, header_comment=""):
    """CSV text with columns (n, omega_hat)."""
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "omega_hat"])
    for n in n_values:
        writer.writerow([n, repr(omega_hat(profile, n))])
    return buf.getvalue()


def singular_set_json(profile, m, n_max, **meta):
    """JSON text for a singular set, limit point kappa2 included."""
    values = singular_set(profile, m, n_max)
    payload = {
        "m": m,
        "indices": [m * j for j in range(1, n_max + 1)] + ["infinity"],
        "omega_hat": values,
        "kappa2": profile.constants.kappa2,
    }
    payload.update(meta)
    return json.dumps(payload, indent=2, sort_keys=True)
