import numpy as np
import pytest

from vortex_spectra import dispersion, modes, sturm
from vortex_spectra.errors import (
    CertificateFailed,
    NoSignChange,
    NotAdmissible,
    NotARoot,
    SingularOmega,
    WrongRegime,
)
from vortex_spectra.profile import polynomial_profile


def test_zeta_negative_below_min(p_slow):
    # omega below min(kappa1, omega_hat_n) forces zeta < 0
    oh = modes.omega_hat(p_slow, 3)
    for omega in (0.1, 0.3, oh):
        assert dispersion.zeta(p_slow, omega, 3) < 0


def test_zeta_positive_at_upper_marker(p_slow):
    # n <= kappa1/(kappa2-kappa1) gives zeta(n kappa2/(n+1)) > 0
    k2 = p_slow.constants.kappa2
    for n in (3, 5, 8):
        assert dispersion.zeta(p_slow, n * k2 / (n + 1), n) > 0


def test_zeta_flat_profile_closed_form():
    # with a nearly flat profile the generator is ~1 and
    # zeta_n ~ (n/(n+1)) (omega - (n-1)/(2n))
    p = polynomial_profile([1.0, 1e-7])
    for n, omega in ((2, -0.1), (4, 0.2)):
        expected = n / (n + 1) * (omega - (n - 1) / (2 * n))
        assert dispersion.zeta(p, omega, n) == pytest.approx(expected,
                                                             abs=1e-5)


def test_zeta_lipschitz_on_window(p_slow):
    omegas = np.linspace(0.34, 0.37, 7)
    values = [dispersion.zeta(p_slow, w, 3) for w in omegas]
    slopes = np.abs(np.diff(values) / np.diff(omegas))
    lips = slopes.max()
    assert np.isfinite(lips)
    assert slopes.max() < 3 * slopes.min() + 1.0  # smooth, no spikes


def test_scarcity_scan_finds_bracketed_root(p_slow):
    scan = dispersion.scan_scarcity(p_slow, 3, samples=9)
    assert scan.sign_change_found
    (root,) = scan.roots
    lo, hi = scan.brackets[0]
    assert lo < root < hi
    assert scan.window[0] < root < scan.window[1]
    assert abs(scan.root_residuals[0]) < 1e-12


def test_scarcity_regime_and_admissibility(p_quad, p_neg, p_slow):
    with pytest.raises(NotAdmissible):
        dispersion.scan_scarcity(p_quad, 3)  # bound = 0.1 < 3
    with pytest.raises(WrongRegime):
        dispersion.scan_scarcity(p_neg, 5)
    with pytest.raises(NotAdmissible):
        dispersion.scan_scarcity(p_slow, 11)  # bound = 10
    with pytest.raises(WrongRegime):
        dispersion.scan_abundance(p_slow, 40)


def test_abundance_scan_endpoints_and_root(p_neg, abundance_root40):
    scan = dispersion.scan_abundance(p_neg, 40, samples=9)
    z_lo, z_hi = scan.endpoint_values
    assert z_lo < 0 < z_hi
    oh = modes.omega_hat(p_neg, 40)
    assert oh - 40 ** -1.5 < abundance_root40 < oh
    assert abundance_root40 > p_neg.constants.kappa2


def test_abundance_below_threshold_reports_no_sign_change(p_neg):
    scan = dispersion.scan_abundance(p_neg, 3, samples=7)
    assert not scan.sign_change_found
    assert scan.endpoint_values[0] < 0 and scan.endpoint_values[1] < 0
    with pytest.raises(NoSignChange):
        scan.best_root()


def test_find_abundance_root_escalates(p_neg):
    m_used, scan = dispersion.find_abundance_root(p_neg, 3, samples=7)
    assert m_used == 13  # 3 -> 13 is the first escalation with a root
    assert scan.sign_change_found


def test_root_asymptotics(p_neg, abundance_root40):
    k2 = p_neg.constants.kappa2
    f01 = p_neg.constants.f0_at_1
    target = -f01 / 80.0
    assert abs((abundance_root40 - k2) - target) <= 0.2 * abs(target)


def test_certify_scarcity(p_slow, scarcity_root3):
    cert = dispersion.certify(p_slow, 3, scarcity_root3, N=8, tol=1e-8)
    assert cert.zeta_residual <= 1e-8
    assert len(cert.higher_mode_margins) == 7
    assert all(margin > 1e-7 for _, margin in cert.higher_mode_margins)
    assert cert.singular_set_distance > 0
    assert cert.mode0_distance > 0
    # in the defocusing regime the exceptional set sits above kappa2
    assert cert.mode0_distance == pytest.approx(
        p_slow.constants.kappa2 - scarcity_root3, abs=1e-14)


def test_certify_rejects_non_root(p_slow):
    with pytest.raises(NotARoot):
        dispersion.certify(p_slow, 3, 0.36, tol=1e-8)


def test_certify_trivial_N1(p_slow, scarcity_root3):
    cert = dispersion.certify(p_slow, 3, scarcity_root3, N=1, tol=1e-8)
    assert cert.higher_mode_margins == ()


def test_certify_margin_failure_branch(p_slow, scarcity_root3):
    # an absurdly loose tolerance turns real margins into failures
    with pytest.raises((CertificateFailed, NotARoot)):
        dispersion.certify(p_slow, 3, scarcity_root3, N=8, tol=2e-3)


def test_refinement_is_bracket_preserving(p_slow):
    calls = []

    def f(x):
        calls.append(x)
        return x - 0.3561

    root, fr = dispersion._refine_root(f, 0.1, 0.9, f(0.1), f(0.9), 1e-12)
    assert all(0.1 <= x <= 0.9 for x in calls)
    assert root == pytest.approx(0.3561, abs=1e-11)


def test_t_value_equals_one_at_root(p_slow, scarcity_root3):
    t = dispersion.T_value(p_slow, scarcity_root3, 3)
    assert abs(1.0 - t) < 1e-6


def test_t_value_identity_against_zeta(p_slow):
    # 1 - T = (n+1) zeta / (G_n(1) (F(1) + F'(1)/(2n)))
    n = 3
    for omega in (0.345, 0.36, 0.372):
        gen = sturm.solve_generator(p_slow, omega, n)
        z = dispersion.zeta(p_slow, omega, n)
        g1 = n * (omega - modes.omega_hat(p_slow, n))
        predicted = (n + 1) * z / (g1 * (gen.F_at_1
                                         + gen.Fprime[-1] / (2 * n)))
        t = dispersion.T_value(p_slow, omega, n)
        assert 1.0 - t == pytest.approx(predicted, rel=1e-8, abs=1e-12)


def test_t_value_sign_consistency(p_slow):
    # away from the root, T != 1 and sign(1-T) tracks sign(zeta) times a
    # fixed-sign normalization on the sampled window
    n = 3
    omegas = np.linspace(0.345, 0.374, 5)
    ratio_signs = set()
    for omega in omegas:
        z = dispersion.zeta(p_slow, omega, n)
        t = dispersion.T_value(p_slow, omega, n)
        assert abs(1.0 - t) > 1e-10
        ratio_signs.add(np.sign(1.0 - t) * np.sign(z))
    assert len(ratio_signs) == 1


def test_t_value_singular_guard(p_slow):
    with pytest.raises(SingularOmega):
        dispersion.T_value(p_slow, modes.omega_hat(p_slow, 3), 3)
