import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flplate.dispersion import (PlateParams, asymptotic_omega, branch_points,
                                c_minus_over_alpha, coefficients, discriminant_root,
                                dispersion_residual, domega_dk, omega_pm)
from flplate.errors import BranchPointProximity, ConfigError, DegenerateRoots

from oracles import quadratic_roots_mp, real_branch_point


def test_residual_sign_convention():
    # D(k, w) = -(1 + 1/k) w^2 + 2 U w + k^4 - U^2 k evaluated by hand
    assert dispersion_residual(2.0, 0.0, 1.0) == pytest.approx(14.0)
    assert dispersion_residual(1.0, 1.0, 1.0) == pytest.approx(-2 + 2 + 0)


def test_roots_at_k2():
    wp, wm = omega_pm(2.0, PlateParams())
    # roots of -1.5 w^2 + 2 w + 14 = 0
    disc = np.sqrt(4 + 4 * 1.5 * 14)
    assert wp == pytest.approx((2 + disc) / 3, abs=1e-14)
    assert wm == pytest.approx((2 - disc) / 3, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(-2.5, 0.0), st.sampled_from([0.5, 1.0, 2.0]))
def test_roots_match_high_precision(re_log, im_frac, U):
    k = 10**re_log * np.exp(1j * im_frac * np.pi / 2.2)
    bs = branch_points(U)
    if min(abs(k - b) for b in bs.branch_points) < 1e-2:
        return
    wp, wm = omega_pm(k, U)
    ref = quadratic_roots_mp(k, U)
    got = sorted([wp, wm], key=lambda w: (round(w.real, 6), w.imag))
    ref = sorted(ref, key=lambda w: (round(w.real, 6), w.imag))
    scale = 1 + abs(k) ** 2
    assert np.allclose(got, ref, atol=1e-12 * scale, rtol=0)


def test_roots_vieta_and_branch_on_cut():
    U = 1.0
    k = np.linspace(0.05, 0.7, 40)  # on the cut (0, r)
    wp, wm = omega_pm(k, PlateParams())
    assert np.allclose(wp + wm, 2 * U * k / (k + 1), rtol=1e-13)
    assert np.allclose(wp * wm, -(k**4 - U * U * k) * k / (k + 1), rtol=1e-12, atol=1e-15)
    # lower limit of the cut: Im Q < 0 from below the real axis
    Q = discriminant_root(k, U)
    Q_below = discriminant_root(k - 1e-12j, U)
    assert np.allclose(Q, Q_below, atol=1e-9)
    assert np.all(Q.imag < 0)


def test_upper_branch_is_conjugate_on_cut():
    k = np.array([0.3, 0.5])
    lo = discriminant_root(k, 1.0, "lower")
    hi = discriminant_root(k, 1.0, "upper")
    assert np.allclose(lo, hi.conj())


def test_branch_points_against_bracketing():
    for U in (0.5, 1.0, 2.0):
        bs = branch_points(PlateParams(U=U))
        assert bs.real_root == pytest.approx(real_branch_point(U), abs=1e-14)
        for b in bs.branch_points[1:]:
            assert abs(b**3 + b**2 - U * U) < 1e-13
        assert bs.branch_points[2] == pytest.approx(bs.branch_points[3].conjugate())


def test_cut_curves_satisfy_lambda_family():
    U = 1.0
    bs = branch_points(U)
    for cut in bs.cuts:
        for kk in cut[1:-1]:
            lam = (U * U - kk * kk) / kk**3 - 1
            assert abs(lam.imag) < 1e-9 * (1 + abs(lam))
            assert lam.real >= -1e-9


def test_real_root_for_unit_speed():
    assert branch_points(PlateParams()).real_root == pytest.approx(0.7548776662466927, abs=1e-15)


def test_exclusion_and_singular_inputs():
    p = PlateParams()
    r = branch_points(p).real_root
    with pytest.raises(BranchPointProximity):
        omega_pm(r + 1e-4, p)
    with pytest.raises(ConfigError):
        omega_pm(0.0, p)
    with pytest.raises(DegenerateRoots):
        # omega_+ + omega_- = 2 U k/(k+1) collapses as U -> 0
        coefficients(1.0, 1.0, 1e-14)
    with pytest.raises(ConfigError):
        PlateParams(U=0.0)
    with pytest.raises(ConfigError):
        PlateParams(k_min=2.0, k_max=1.0)


def test_derivative_matches_differences():
    k = np.array([1.3 - 0.4j, 2.0, 5.0 - 3.0j])
    h = 1e-6
    dp, dm = domega_dk(k, 1.0)
    fp = (np.array(omega_pm(k + h, 1.0)) - np.array(omega_pm(k - h, 1.0))) / (2 * h)
    assert np.allclose(dp, fp[0], rtol=1e-8)
    assert np.allclose(dm, fp[1], rtol=1e-8)


def test_coefficients_reproduce_initial_data():
    k = np.array([0.9, 1.5 - 0.2j, 3.0])
    e0 = np.array([1.0, 0.3 - 0.2j, 2.0])
    d = coefficients(k, e0, PlateParams())
    assert np.allclose(d.c_plus + d.c_minus, e0, rtol=1e-13)
    # initial velocity -i(w+ c+ + w- c-) matches the rest-relative start
    v = -1j * (d.omega_plus * d.c_plus + d.omega_minus * d.c_minus)
    assert np.allclose(v, -1j * k * (k * k + 1) * e0 / 2, rtol=1e-12)


@pytest.mark.parametrize("k", [0.9, 2.0 - 1.0j, 3.9, 8.0 - 5.0j, 40.0 - 30.0j, 300.0])
def test_c_minus_over_alpha_stable_form(k):
    import mpmath as mp
    with mp.workdps(50):
        kk = mp.mpc(k)
        Q = kk**2 * mp.sqrt(1 + 1 / kk - 1 / kk**3)
        wp = (1 + Q) * kk / (kk + 1)
        wm = (1 - Q) * kk / (kk + 1)
        ref = complex(-1j * (wp**2 - kk**4) / (wp + wm))
    got = c_minus_over_alpha(np.complex128(k), 1.0, PlateParams())
    assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref))


def test_asymptotic_expansion_leading_terms():
    k = 1e4
    wp, wm = omega_pm(k, 1.0)
    assert abs(wp - asymptotic_omega(k, 1.0, +1)) < 2e-4
    assert abs(wm - asymptotic_omega(k, 1.0, -1)) < 2e-4
