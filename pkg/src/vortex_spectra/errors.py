"""Exception types shared across the toolkit.

Every failure mode raised by the numerical layers derives from
:class:`VortexSpectraError`, so callers (and the CLI) can distinguish
"the input is bad" from "the numerics gave up" with one except clause.
"""


class VortexSpectraError(Exception):
    """Base class for all toolkit errors."""


class ProfileError(VortexSpectraError):
    """Base class for profile validation failures."""


class NonMonotone(ProfileError):
    """inf f0'(r)/r over the validation grid is not strictly positive."""


class SignChange(ProfileError):
    """f0 does not keep one sign on [0, 1]."""


class BadTable(ProfileError):
    """Tabulated samples are not strictly increasing in x = r^2."""


class ForbiddenOmega(VortexSpectraError):
    """Angular velocity lies in the forbidden band [kappa1, kappa2]."""

    def __init__(self, omega, kappa1, kappa2):
        self.omega = omega
        self.kappa1 = kappa1
        self.kappa2 = kappa2
        super().__init__(
            f"omega={omega!r} lies in the forbidden band "
            f"[{kappa1!r}, {kappa2!r}]"
        )


class QuadratureFailure(VortexSpectraError):
    """An adaptive quadrature did not meet its tolerance."""


class SingularOmega(VortexSpectraError):
    """omega is too close to a singular point omega_hat_n."""


class NoContraction(VortexSpectraError):
    """Focusing fixed-point iteration failed to contract.

    Carries the measured Lipschitz estimate of the Picard map so the
    caller can see how badly the contraction margin was violated.
    """

    def __init__(self, lipschitz, message=""):
        self.lipschitz = lipschitz
        super().__init__(
            message or f"Picard iteration not contracting "
            f"(measured Lipschitz estimate {lipschitz:.3g})"
        )


class ToleranceNotMet(VortexSpectraError):
    """A solve finished but its residual exceeds the requested tolerance."""


class WrongRegime(VortexSpectraError):
    """Operation called in the wrong focusing/defocusing regime."""


class TailNotConverged(VortexSpectraError):
    """Phase integration could not certify its tail."""


class NotAdmissible(VortexSpectraError):
    """Mode number m outside the admissible range for this profile."""


class NoSignChange(VortexSpectraError):
    """A scan window shows no sign change of the dispersion function.

    The endpoint values are attached so the caller can widen the window
    or escalate m without re-evaluating.
    """

    def __init__(self, lo, hi, zeta_lo, zeta_hi):
        self.lo = lo
        self.hi = hi
        self.zeta_lo = zeta_lo
        self.zeta_hi = zeta_hi
        super().__init__(
            f"no sign change of zeta on ({lo!r}, {hi!r}): "
            f"endpoint values ({zeta_lo!r}, {zeta_hi!r})"
        )


class NearSingular(VortexSpectraError):
    """Linear solve close to singular; carries a condition estimate."""

    def __init__(self, cond, message=""):
        self.cond = cond
        super().__init__(message or f"matrix near singular (cond ~ {cond:.3g})")


class NotARoot(VortexSpectraError):
    """The supplied omega is not a certified dispersion root."""


class CertificateFailed(VortexSpectraError):
    """Kernel-dimension certificate failed; names the offending check."""


class EigenSolveFailure(VortexSpectraError):
    """Dense symmetric eigensolve did not converge."""
