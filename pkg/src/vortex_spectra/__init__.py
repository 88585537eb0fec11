"""Spectral and bifurcation analysis around radial monotone vortex profiles.

The package locates the angular velocities where the linearization of
the 2D Euler equations around a stationary radial vortex acquires a
nontrivial kernel, builds the kernel generators, and certifies the
transversal crossing condition, at desk scale and with closed-form
oracles for every building block.
"""

__version__ = "0.1.0"

from . import errors  # noqa: F401
from .profile import (  # noqa: F401
    Profile,
    ProfileConstants,
    ValidationReport,
    constants,
    inner_mean,
    load_profile,
    mu0,
    nu,
    polynomial_profile,
    tabulated_profile,
    validate_hypotheses,
)
from .modes import A_n, G_n, H_n, omega_hat, singular_set  # noqa: F401
from .sturm import GeneratorSolution, rho_gap, solve_generator  # noqa: F401
from .prufer import (  # noqa: F401
    PruferTrace,
    kneser_margin,
    mode0_exceptional_set,
    prufer_trace,
)
from .dispersion import (  # noqa: F401
    DispersionScan,
    EigenvalueCertificate,
    T_value,
    certify,
    find_abundance_root,
    scan_abundance,
    scan_scarcity,
    zeta,
)
from .operator_lab import (  # noqa: F401
    NystromOperator,
    discretize,
    quadratic_form,
    smallest_eigenvalue,
    solve_id_minus_L,
)
from .kernel_transversality import (  # noqa: F401
    KernelGenerator,
    TransversalityReport,
    kappa_constant,
    kernel_generator,
    range_density,
    range_membership,
    transversality,
)
