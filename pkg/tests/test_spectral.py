import numpy as np
import pytest

from flplate.errors import ConfigError, HingeViolation, NonconvergentQuadrature
from flplate.spectral import (CallableProfile, GaussianProfile, HingeProfile, SampledProfile,
                              extension_check, fourier_forward, fourier_inverse_real,
                              get_profile, hinge_moment, make_grid, sobolev_norm,
                              sobolev_norm_x)

from oracles import gauss_fourier


def test_gaussian_transform_matches_quadrature():
    k = np.array([0.0, 0.7, 2.5, 6.0])
    ref = gauss_fourier(lambda x: np.exp(-x * x / 2), k, -40, 40)
    assert np.allclose(fourier_forward(GaussianProfile(), k), ref, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("k", [0.0, 1.0 - 1.0j, 5.0 - 3.0j, 11.0, 13.0 - 0.5j, 20.0 - 2.0j,
                               30.0 - 30.0j])
def test_hinge_moment_matches_quadrature(n, k):
    ref = gauss_fourier(lambda x: x**n * np.exp(-x * x), k, 0.0, 14.0, panels=600)[0]
    got = hinge_moment(n, np.array([k]))[0] / np.sqrt(2 * np.pi)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_numeric_transform_agrees_with_closed_form():
    prof = get_profile("hinge4")
    k = np.array([0.3, 1.0 - 1.0j, 7.5])
    assert np.allclose(fourier_forward(prof, k, numeric=True), fourier_forward(prof, k),
                       rtol=1e-12, atol=1e-15)


def test_numeric_transform_rejects_slow_decay():
    prof = CallableProfile(name="flat", func=lambda x: np.ones_like(x), extent=10.0)
    with pytest.raises(NonconvergentQuadrature):
        fourier_forward(prof, np.array([1.0]))


def test_inverse_recovers_gaussian():
    grid = make_grid(12.0)
    x = np.linspace(-8, 8, 81)
    f = fourier_inverse_real(fourier_forward(GaussianProfile(), grid.nodes), grid, x)
    assert np.max(np.abs(f.values - np.exp(-x * x / 2))) < 1e-13


def test_parseval_and_sobolev_norms():
    g = GaussianProfile()
    for s in (0, 1, 2):
        assert sobolev_norm(g, s) == pytest.approx(sobolev_norm_x(g, s), rel=1e-12)
    h = get_profile("hinge4")
    assert sobolev_norm(h, 2) == pytest.approx(sobolev_norm_x(h, 2), rel=1e-8)


def test_extension_check_and_hinge_violation():
    assert extension_check(get_profile("hinge4"), 3) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(HingeViolation):
        extension_check(get_profile("hinge2"), 3)
    assert get_profile("hinge4").hinge_class == 3


def test_profile_registry():
    assert isinstance(get_profile("gaussian"), GaussianProfile)
    assert isinstance(get_profile("hinge5"), HingeProfile)
    assert not np.any(get_profile("zero")(np.linspace(-1, 1, 5)))
    with pytest.raises(ConfigError):
        get_profile("gaussian", support="half")
    with pytest.raises(ConfigError):
        get_profile("nope")


def test_hinge_profile_derivatives_against_differences():
    h = HingeProfile(power=4)
    x = np.linspace(0.2, 2.0, 7)
    step = 1e-4
    for d in range(1, 5):
        fd = (h(x + step, d - 1) - h(x - step, d - 1)) / (2 * step)
        assert np.allclose(h(x, d), fd, atol=1e-6)


def test_sampled_profile_from_csv(tmp_path):
    x = np.linspace(-12, 12, 481)
    path = tmp_path / "p.csv"
    np.savetxt(path, np.c_[x, np.exp(-x * x / 2)], delimiter=",", header="x,eta0", comments="")
    prof = get_profile(f"csv:{path}")
    assert prof.support == "full"
    k = np.array([0.0, 1.0, 3.0])
    assert np.allclose(fourier_forward(prof, k), np.exp(-k * k / 2), atol=1e-8)


def test_sampled_half_line_infers_hinge_class():
    x = np.linspace(0, 8, 801)
    prof = SampledProfile(x=x, values=x**4 * np.exp(-x * x))
    assert prof.support == "half"
    assert prof.hinge_class >= 0


def test_grid_layout():
    g = make_grid(10.0)
    assert g.nodes[0] > 0
    assert np.sum(g.weights) == pytest.approx(10.0, rel=1e-14)
    assert len(make_grid(10.0, refine=2)) == 2 * len(g)
    with pytest.raises(ConfigError):
        make_grid(10.0, k_min=1.0)
