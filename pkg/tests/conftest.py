import numpy as np
import pytest

from vortex_spectra import dispersion
from vortex_spectra.profile import polynomial_profile, tabulated_profile


@pytest.fixture(scope="session")
def p_quad():
    """f0 = 1 + r^2: positive, steep (amplitude 2)."""
    return polynomial_profile([1.0, 1.0])


@pytest.fixture(scope="session")
def p_neg():
    """f0 = -2 + r^2: negative increasing (abundance regime)."""
    return polynomial_profile([-2.0, 1.0])


@pytest.fixture(scope="session")
def p_slow():
    """f0 = 1 + 0.01 r^2: positive, slowly varying (scarcity regime)."""
    return polynomial_profile([1.0, 0.01])


@pytest.fixture(scope="session")
def p_table():
    """Tabulated twin of f0 = 1 + r^2 (ftilde = 1 + x)."""
    x = np.linspace(0.0, 1.0, 41)
    return tabulated_profile(x, 1.0 + x)


@pytest.fixture(scope="session")
def scarcity_root3(p_slow):
    scan = dispersion.scan_scarcity(p_slow, 3, samples=9)
    return scan.best_root()


@pytest.fixture(scope="session")
def abundance_root40(p_neg):
    scan = dispersion.scan_abundance(p_neg, 40, samples=9)
    return scan.best_root()


@pytest.fixture(scope="session")
def abundance_root60(p_neg):
    scan = dispersion.scan_abundance(p_neg, 60, samples=9)
    return scan.best_root()
