"""First-kind convolution equations ``int_0^t K(t - s) theta(s) ds = r(t)``.

Two independent discretisations on the uniform grid ``t_n = n dt``:

* product integration: ``theta`` is piecewise linear and the kernel is
  integrated exactly through its repeated integrals ``K_1, K_2``, so the
  ``t^{-1/2}`` singularity costs nothing;
* convolution quadrature (BDF2): the weights are the Taylor coefficients of
  ``L[K](delta(z)/dt)``, ``delta(z) = (1 - z) + (1 - z)^2/2``, and the solve is a
  division of generating functions evaluated by FFT on a circle ``|z| = lam``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._kernels import toeplitz_apply, toeplitz_solve
from ..dispersion import PlateParams
from ..errors import ConfigError, IllConditionedDeconvolution
from .kernel import kernel_laplace, kernel_moments

REG_THRESHOLD = 1e-10
BACKEND_TOL = 1e-5


@dataclass
class ProductWeights:
    """``(K * theta)(t_n) = b_n theta_0 + sum_{j=1}^n w_{n-j} theta_j``."""

    dt: float
    w: np.ndarray
    b: np.ndarray

    @property
    def n_steps(self):
        return len(self.b) - 1


def product_weights(K1, K2, dt):
    """Weights from ``K1[m] = K_1(m dt)`` and ``K2[m] = K_2(m dt)``, ``m = 0..N``."""
    K1 = np.asarray(K1, dtype=complex)
    K2 = np.asarray(K2, dtype=complex)
    N = len(K2) - 1
    if N < 1 or len(K1) != len(K2):
        raise ConfigError("need K_1 and K_2 on at least two matching nodes")
    w = np.empty(N, dtype=complex)
    w[0] = K2[1] / dt
    w[1:] = (K2[2:] - 2 * K2[1:-1] + K2[:-2]) / dt
    b = np.zeros(N + 1, dtype=complex)
    b[1:] = (dt * K1[1:] - (K2[1:] - K2[:-1])) / dt
    return ProductWeights(dt, w, b)


def kernel_product_weights(params, dt, n_steps, contour=None):
    t = dt * np.arange(n_steps + 1)
    K1 = kernel_moments(params, t, 1, contour)
    K2 = kernel_moments(params, t, 2, contour)
    return product_weights(K1, K2, dt)


def convolve(pw: ProductWeights, theta):
    """Discrete ``K * theta`` at ``t_0..t_N`` (zero at ``t_0``)."""
    theta = np.asarray(theta, dtype=complex)
    n = len(theta)
    if n - 1 > pw.n_steps:
        raise ConfigError("more samples than product weights")
    out = np.zeros(n, dtype=complex)
    if n > 1:
        out[1:] = toeplitz_apply(pw.w, theta[1:]) + pw.b[1:n] * theta[0]
    return out


def deconvolve_time(pw: ProductWeights, rhs, theta0=0.0):
    """Recover ``theta_1..theta_N`` given ``theta_0`` by forward substitution."""
    rhs = np.asarray(rhs, dtype=complex)
    n = len(rhs)
    theta = np.empty(n, dtype=complex)
    theta[0] = theta0
    if n > 1:
        theta[1:] = toeplitz_solve(pw.w, rhs[1:] - pw.b[1:n] * theta0)
    return theta


def _bdf2(z):
    return (1 - z) + 0.5 * (1 - z) ** 2


def cq_symbol(params, dt, n, contour=None):
    """Circle points ``z_l``, radius ``lam`` and ``L[K](delta(z_l)/dt)``."""
    L = 2 * n
    lam = 1e-8 ** (1.0 / max(n, 1))
    z = lam * np.exp(2j * np.pi * np.arange(L) / L)
    return z, lam, kernel_laplace(params, _bdf2(z) / dt, contour)


def cq_weights(params, dt, n, contour=None):
    """First ``n`` convolution-quadrature weights of the kernel."""
    z, lam, sym = cq_symbol(params, dt, n, contour)
    coeffs = np.fft.fft(sym) / len(z)
    return coeffs[:n] / lam ** np.arange(n)


def deconvolve_laplace(params, rhs, dt, contour=None, reg=REG_THRESHOLD, symbol=None):
    """Divide generating functions: ``Theta(z) = R(z) / L[K](delta(z)/dt)``.

    Symbol values below ``reg * max|L[K]|`` are treated as zero (the
    corresponding components of ``theta`` are dropped).
    """
    rhs = np.asarray(rhs, dtype=complex)
    n = len(rhs)
    z, lam, sym = symbol if symbol is not None else cq_symbol(params, dt, n, contour)
    L = len(z)
    scale = lam ** np.arange(n)
    R = np.fft.ifft(np.concatenate([rhs * scale, np.zeros(L - n)])) * L
    keep = np.abs(sym) >= reg * np.max(np.abs(sym))
    Theta = np.where(keep, R / np.where(keep, sym, 1.0), 0.0)
    return (np.fft.fft(Theta) / L)[:n] / scale


@dataclass
class DeconvolutionResult:
    theta: np.ndarray
    theta_laplace: np.ndarray
    backend_gap: float


def l2_norm(values, dt):
    """Trapezoidal ``L^2`` norm of samples on a uniform grid."""
    v = np.abs(np.asarray(values)) ** 2
    if len(v) < 2:
        return 0.0
    return float(np.sqrt(dt * (v.sum() - 0.5 * (v[0] + v[-1]))))


def solve_first_kind(params, rhs, dt, theta0=0.0, pw=None, contour=None, tol=BACKEND_TOL):
    """Solve with both backends and compare them.

    Raises
    ------
    IllConditionedDeconvolution
        When the two reconstructions differ by more than ``tol`` in ``L^2``.
    """
    params = params or PlateParams()
    rhs = np.asarray(rhs, dtype=complex)
    pw = pw or kernel_product_weights(params, dt, len(rhs) - 1, contour)
    th_t = deconvolve_time(pw, rhs, theta0)
    th_l = deconvolve_laplace(params, rhs, dt, contour)
    gap = l2_norm(th_t - th_l, dt)
    if not np.isfinite(gap) or gap > tol:
        raise IllConditionedDeconvolution(
            f"time-domain and Laplace reconstructions differ by {gap:.3e} in L2")
    return DeconvolutionResult(th_t, th_l, gap)
