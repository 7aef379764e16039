import math

import numpy as np
import pytest

from flplate.dispersion import PlateParams, branch_points
from flplate.errors import (ClosureUnavailable, ConfigError, HingeViolation,
                            IllConditionedDeconvolution, UnderResolvedOscillation)
from flplate.fullline import free_eta_hat
from flplate.halfline.contour import ContourPath, deformed_path, gamma_path
from flplate.halfline.kernel import (compute_g, compute_kernel, growth_rate, kernel_laplace,
                                     kernel_moments)
from flplate.halfline.solver import (BoundaryTraces, F_t, global_relation_eta_hat,
                                     solve_half_line, surface_potential_relation)
from flplate.halfline.volterra import (convolve, deconvolve_laplace, deconvolve_time,
                                       kernel_product_weights, l2_norm, solve_first_kind)
from flplate.spectral import SQRT2PI, get_profile, make_grid

from oracles import forced_mode_mol, singular_convolution

P = PlateParams()


def K_of(t):
    return compute_kernel(P, t_nodes=np.atleast_1d(t)).K_values


# --- contours -------------------------------------------------------------------

def test_contours_connect_and_avoid_branch_points():
    pts = branch_points(P).branch_points
    for path in (gamma_path(P), deformed_path(P)):
        path.check_connected(1e-9)
        assert path.min_distance(pts) > P.exclusion_radius


def test_contour_json_round_trip():
    path = deformed_path(P)
    back = ContourPath.from_json(path.to_json())
    k1, w1 = path.quadrature(64)
    k2, w2 = back.quadrature(64)
    assert np.array_equal(k1, k2) and np.array_equal(w1, w2)
    assert back.meta == path.meta and back.label == path.label


def test_contour_parameter_validation():
    with pytest.raises(ConfigError):
        deformed_path(P, delta=0.5)
    with pytest.raises(ConfigError):
        gamma_path(P, R=1.0)


# --- kernel -----------------------------------------------------------------------

def test_kernel_small_time_singularity():
    t = np.array([1e-10, 1e-8])
    K = compute_kernel(P, t_nodes=t).K_values
    limit = 2 * np.exp(1j * math.pi / 4) * math.sqrt(math.pi)
    assert np.allclose(np.sqrt(t) * K, limit, rtol=1e-3)


@pytest.mark.parametrize("t", [0.3, 0.9])
def test_kernel_moments_against_direct_quadrature(t):
    one = singular_convolution(K_of, lambda s: np.ones_like(s), t, n=48)
    lin = singular_convolution(K_of, lambda s: s, t, n=48)
    assert abs(kernel_moments(P, np.array([t]), 1)[0] - one) < 1e-11
    assert abs(kernel_moments(P, np.array([t]), 2)[0] - lin) < 1e-11


def test_kernel_laplace_against_direct_quadrature():
    s = 3.0 + 1.0j
    T = 14.0
    x, w = np.polynomial.legendre.leggauss(32)
    edges = np.linspace(0, math.sqrt(T), 41)
    h = np.diff(edges)[:, None]
    u = (edges[:-1, None] + 0.5 * h * (x + 1)).ravel()
    wu = (0.5 * h * w).ravel()
    ref = np.sum(wu * 2 * u * K_of(u * u) * np.exp(-s * u * u))
    assert abs(kernel_laplace(P, np.array([s]))[0] - ref) < 1e-10


def test_kernel_paths_agree():
    t = np.linspace(0.1, 1.0, 10)
    Kd = compute_kernel(P, deformed_path(P), t).K_values
    Kg = compute_kernel(P, gamma_path(P), t).K_values
    assert np.max(np.abs(Kd - Kg) / np.abs(Kd)) < 1e-9


def test_kernel_bounded_growth():
    assert growth_rate(P) < 0.05


def test_kernel_rejects_nonpositive_times():
    with pytest.raises(ConfigError):
        compute_kernel(P, t_nodes=np.array([0.0, 0.5]))


def test_forcing_hinge_checks():
    with pytest.raises(HingeViolation):
        compute_g(get_profile("hinge2"), P, t_nodes=np.array([0.0]))
    with pytest.raises(ConfigError):
        compute_g(get_profile("gaussian"), P, t_nodes=np.array([0.0]))


def test_forcing_vanishes_at_zero_for_smooth_hinge():
    g = compute_g(get_profile("hinge5"), P, t_nodes=np.array([0.0, 1e-3])).g_values
    assert abs(g[0]) < 1e-8
    assert abs(g[1]) < 1.0


def test_kernel_table_csv(tmp_path):
    tab = compute_kernel(P, t_nodes=np.array([0.5, 1.0]))
    tab.to_csv(tmp_path / "k.csv")
    lines = (tmp_path / "k.csv").read_text().split("\n")
    assert lines[0] == "t,re,im" and lines[-1] == ""
    assert complex(float(lines[1].split(",")[1]), float(lines[1].split(",")[2])) == tab.K_values[0]


# --- Volterra ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def weights():
    return kernel_product_weights(P, 0.01, 100)


def test_product_integration_exact_for_linear_data(weights):
    t = 0.01 * np.arange(101)
    conv = convolve(weights, 1 + 2 * t)
    for n in (1, 37, 100):
        ref = singular_convolution(K_of, lambda s: 1 + 2 * s, t[n], n=48)
        assert abs(conv[n] - ref) < 1e-11


def test_deconvolution_round_trip_and_backends(weights):
    t = 0.01 * np.arange(101)
    theta = np.sin(3 * t) + 0.5
    rhs = convolve(weights, theta)
    back = deconvolve_time(weights, rhs, theta[0])
    assert l2_norm(back - theta, 0.01) < 1e-12
    lap = deconvolve_laplace(P, convolve(weights, theta - theta[0]), 0.01)
    assert l2_norm(lap - (theta - theta[0]), 0.01) < 1e-3
    zero = solve_first_kind(P, np.zeros(101), 0.01, pw=weights)
    assert not np.any(zero.theta) and not np.any(zero.theta_laplace)


def test_backend_disagreement_is_reported(weights):
    t = 0.01 * np.arange(101)
    with pytest.raises(IllConditionedDeconvolution):
        solve_first_kind(P, convolve(weights, t), 0.01, pw=weights, tol=1e-14)


# --- solver -----------------------------------------------------------------------

def test_filon_trace_integral_exact_for_constant_traces():
    tr = BoundaryTraces(np.linspace(0, 1, 11), np.full(11, 2.0), np.full(11, 3.0))
    w, k, t = np.array([0.0, 4.0 - 1.0j]), np.array([1.0, 2.0 - 0.5j]), 0.73
    got = F_t(w, k, tr, t)
    integral = np.where(w == 0, t, (np.exp(1j * w * t) - 1) / (1j * np.where(w == 0, 1, w)))
    assert np.allclose(got, (3.0 + 2.0j * k) * integral, atol=1e-15)
    with pytest.raises(UnderResolvedOscillation):
        F_t(np.array([1e3]), np.array([1.0]), tr, 0.5)


def test_zero_traces_reduce_to_full_line():
    k = make_grid(10.0).nodes
    e0 = np.exp(-k**2 / 2) + 0j
    dec = type("D", (), {"eta0_hat": e0})()
    tr = BoundaryTraces.zeros(1.0, 10)
    got = global_relation_eta_hat(k, 0.6, tr, dec, P)
    assert np.array_equal(got, free_eta_hat(k, e0, 1.0, 0.6)[0])


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 1.0 - 0.5j])
def test_forced_mode_matches_time_stepping(k):
    t_nodes = np.linspace(0, 1, 401)
    chi = np.sin(2 * t_nodes) * t_nodes
    theta = np.exp(-((t_nodes - 0.5) / 0.2) ** 2)
    tr = BoundaryTraces(t_nodes, chi, theta)

    def forcing(s):
        th = np.interp(s, t_nodes, theta)
        ch = np.interp(s, t_nodes, chi)
        return (th + 1j * k * ch) / SQRT2PI

    e0 = np.exp(-k * k / 2)
    dec = type("D", (), {"eta0_hat": np.array([e0])})()
    got = global_relation_eta_hat(np.array([k]), 0.8, tr, dec, P)[0]
    ref = forced_mode_mol(complex(k), complex(e0), 1.0, forcing, 0.8)
    assert abs(got - ref) < 1e-9


def test_potential_relation_rejects_zero():
    with pytest.raises(ConfigError):
        surface_potential_relation(np.ones(1), np.ones(1), np.zeros(1), P)


def test_closure_round_trip():
    prof = get_profile("hinge4")
    theta = lambda t: 0.1 * t * t
    a = solve_half_line(prof, P, closure="given-xxx", eta_xxx0=theta, T=0.5, nt=200)
    b = solve_half_line(prof, P, closure="given-xx", eta_xx0=a.traces.eta_xx0, T=0.5, nt=200)
    assert l2_norm(b.traces.eta_xxx0 - a.traces.eta_xxx0, 0.5 / 200) < 1e-8
    c = solve_half_line(prof, P, closure="free-edge-zero", eta_xx0=a.traces.eta_xx0,
                        eta_xxx0=a.traces.eta_xxx0, T=0.5, nt=200)
    assert c.closure_residual < 1e-12


def test_closure_policy_errors():
    prof = get_profile("hinge4")
    with pytest.raises(ClosureUnavailable):
        solve_half_line(prof, P, closure="given-xx", T=0.1, nt=10)
    with pytest.raises(ConfigError):
        solve_half_line(prof, P, closure="clamped", T=0.1, nt=10)
    with pytest.raises(ConfigError):
        solve_half_line(get_profile("gaussian"), P, T=0.1, nt=10)
    with pytest.raises(ConfigError):
        BoundaryTraces(np.array([0.0, 0.1, 0.3]), np.zeros(3), np.zeros(3))
