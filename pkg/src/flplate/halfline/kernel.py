"""Kernel ``K(t)`` and forcing ``g(t)`` as contour integrals.

Both are integrals against the measure ``d mu = (1/k) d omega_-(k)``:

    K(t) = int e^{-i w_- t} d mu,        g(t) = int (c_-/alpha) e^{-i w_- t} d mu.

The measure carries orientation sign ``-1`` relative to the geometric
traversal of the contour (from ``1/4 - i inf`` through ``1/4`` out to
``+inf``).  Along that contour ``w_-`` runs from ``+inf`` to ``-inf``, so the
sign makes ``(1/2 pi) int e^{-i w_- (t - s)} d w_-`` the delta function with
positive weight; :func:`delta_identity_check` verifies it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._kernels import moment_sum
from ..dispersion import PlateParams, c_minus_over_alpha, domega_dk, omega_pm
from ..errors import ConfigError, HingeViolation, NonconvergentQuadrature
from ..io import write_complex_csv
from ..spectral import HINGE_TOL, composite_gauss, hinge_values
from .contour import ContourPath, deformed_path, gamma_path

ORIENTATION = -1.0
DEFAULT_DENSITY = 128.0


@dataclass
class KernelTable:
    """Samples of ``K`` and/or ``g``; missing parts are ``None``."""

    t_nodes: np.ndarray
    K_values: np.ndarray = None
    g_values: np.ndarray = None
    weak_sing_constant: float = float("nan")
    meta: dict = field(default_factory=dict)

    def to_csv(self, path, which="K"):
        vals = self.K_values if which == "K" else self.g_values
        if vals is None:
            raise ConfigError(f"table has no {which} values")
        write_complex_csv(path, self.t_nodes, vals)


def measure(path: ContourPath, params, density=DEFAULT_DENSITY, ray_scale=None):
    """Nodes, measure weights ``d mu`` and ``w_-`` along ``path``."""
    k, dk = path.quadrature(density, ray_scale)
    _, wm = omega_pm(k, params.U, check=False)
    _, dwm = domega_dk(k, params.U)
    return k, ORIENTATION * dwm / k * dk, wm


def _ray_scale(path, t):
    # tails of the truncated contour oscillate; shrink the mapped rule with t
    # (binned to powers of sqrt(2) so nearby times share one rule)
    if path.label == "gamma":
        R = path.meta.get("R", 13.0)
        if t <= 0 or R * t <= 1.0 / R:
            return R
        return float(2.0 ** (np.floor(2 * np.log2(1.0 / (R * t))) / 2))
    return None


def _contour_sum(path, params, t_nodes, amp_fn=None, order=0, density=DEFAULT_DENSITY):
    t_nodes = np.asarray(t_nodes, dtype=float)
    flat = t_nodes.ravel()
    out = np.empty(flat.shape, dtype=complex)
    scales = [_ray_scale(path, t) for t in flat]
    for scale in dict.fromkeys(scales):
        sel = np.array([s == scale for s in scales])
        k, mu, wm = measure(path, params, density, scale)
        amp = mu if amp_fn is None else mu * amp_fn(k)
        out[sel] = moment_sum(amp, wm, flat[sel], order)
    if not np.all(np.isfinite(out)):
        raise NonconvergentQuadrature("contour quadrature produced non-finite values")
    return out.reshape(t_nodes.shape)


def compute_kernel(params=None, contour=None, t_nodes=None, density=DEFAULT_DENSITY):
    """``K(t)`` on ``t_nodes > 0`` plus the measured ``sup sqrt(t) |K(t)|``."""
    params = params or PlateParams()
    contour = contour or deformed_path(params)
    t_nodes = np.asarray(t_nodes if t_nodes is not None else np.linspace(0.01, 1, 100), float)
    if np.any(t_nodes <= 0):
        raise ConfigError("K(t) is singular at t = 0; sample t > 0")
    K = _contour_sum(contour, params, t_nodes, density=density)
    small = t_nodes <= 1.0
    wsc = float(np.max(np.sqrt(t_nodes[small]) * np.abs(K[small]))) if small.any() else float("nan")
    return KernelTable(t_nodes, K_values=K, weak_sing_constant=wsc,
                       meta={"contour": contour.label, "density": density})


def kernel_moments(params, t_nodes, order, contour=None, density=DEFAULT_DENSITY):
    """Repeated integrals ``K_1(t) = int_0^t K``, ``K_2(t) = int_0^t K_1``."""
    if order not in (1, 2):
        raise ConfigError("order must be 1 or 2")
    contour = contour or deformed_path(params)
    return _contour_sum(contour, params, t_nodes, order=order, density=density)


def check_hinge(profile, min_class):
    if profile.support != "half":
        raise ConfigError("half-line computations need a half-line profile")
    if profile.hinge_class < min_class:
        raise HingeViolation(
            f"profile hinge class {profile.hinge_class} is below the required {min_class}")
    vals = hinge_values(profile, profile.hinge_class)
    if np.any(np.abs(vals) > HINGE_TOL):
        raise HingeViolation("profile derivatives do not vanish at the hinge as claimed")


def compute_g(profile, params=None, contour=None, t_nodes=None, density=DEFAULT_DENSITY,
              min_class=2):
    """``g(t)`` for a half-line profile with a closed-form transform."""
    params = params or PlateParams()
    check_hinge(profile, min_class)
    contour = contour or gamma_path(params)
    t_nodes = np.asarray(t_nodes if t_nodes is not None else np.linspace(0, 1, 101), float)
    if profile.transform(np.array([1.0 - 1.0j])) is None:
        raise ConfigError("g(t) needs a profile transform valid off the real axis")

    def amp(k):
        return c_minus_over_alpha(k, profile.transform(k), params)

    g = _contour_sum(contour, params, t_nodes, amp, density=density)
    return KernelTable(t_nodes, g_values=g, meta={"contour": contour.label, "density": density})


def kernel_laplace(params, s, contour=None, density=DEFAULT_DENSITY):
    """``L[K](s) = int d mu / (s + i w_-)`` for ``Re s`` beyond the growth rate."""
    contour = contour or deformed_path(params)
    s = np.asarray(s, dtype=complex)
    out = np.empty(s.shape, dtype=complex)
    flat = s.ravel()
    # the ray integrand decays like 1/(s + k^2): scale the mapped rule by sqrt|s|
    scales = np.maximum(contour.meta.get("delta", 2.0), np.sqrt(np.abs(flat)))
    bins = np.exp2(np.round(np.log2(scales) * 2) / 2)
    for b in np.unique(bins):
        sel = bins == b
        k, mu, wm = measure(contour, params, density, ray_scale=float(b))
        block = flat[sel]
        vals = np.empty(block.shape, dtype=complex)
        step = max(1, 2**22 // len(k))
        for a in range(0, len(block), step):
            vals[a:a + step] = (1.0 / (block[a:a + step, None] + 1j * wm[None, :])) @ mu
        out.flat[np.nonzero(sel)[0]] = vals
    return out


def growth_rate(params, t_fit=(4.0, 10.0), n=25, contour=None):
    """Exponential growth rate of ``|K(t)|`` from a least-squares fit of ``log|K|``."""
    t = np.linspace(t_fit[0], t_fit[1], n)
    K = compute_kernel(params, contour, t).K_values
    slope, _ = np.polyfit(t, np.log(np.abs(K)), 1)
    return float(slope)


def delta_identity_check(contour, f_test, t, params=None, T=2.0, density=DEFAULT_DENSITY,
                         n_tau=2048):
    """``(1/2 pi) int_gamma int_0^T e^{-i w_-(t - s)} f(s) ds dw_-``.

    The contour is used as given, without tails: the inner integral of a
    smooth test function already decays along it, so the documented
    truncation is the contour radius.
    """
    params = params or PlateParams()
    finite = ContourPath([s for s in contour.segments if np.isfinite(s.start) and
                          np.isfinite(s.end)], contour.label, contour.orientation)
    k, dk = finite.quadrature(density)
    _, wm = omega_pm(k, params.U, check=False)
    _, dwm = domega_dk(k, params.U)
    tau, wt = composite_gauss(np.linspace(0.0, T, n_tau // 16 + 1))
    ft = np.asarray(f_test(tau), dtype=complex) * wt
    if not np.any(ft):
        return 0j
    inner = np.exp(1j * np.outer(wm, tau)) @ ft
    return complex(ORIENTATION * np.sum(dwm * dk * np.exp(-1j * wm * t) * inner) / (2 * math.pi))
