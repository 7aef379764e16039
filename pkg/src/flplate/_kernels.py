"""Inner loops shared by the solvers.

Each kernel has a pure-numpy version (``*_np``) and, when numba is usable, a
compiled twin (``*_nb``).  The public names dispatch on
:data:`flplate._accel.USE_NUMBA`.
"""
import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from ._accel import USE_NUMBA, njit, prange

_SERIES_TERMS = 24
_SERIES_RADIUS = 1.0


def _phi_np(z, order):
    """``phi_1(z) = (e^z - 1)/z`` and ``phi_2(z) = (e^z - 1 - z)/z^2``.

    ``order = 3`` gives ``psi(z) = int_0^1 u e^{zu} du``.  Taylor series inside
    the unit disc, closed forms outside.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small]
    acc = np.zeros_like(zs)
    term = np.ones_like(zs)
    # series coefficients: phi_p -> 1/(n+p)!, psi -> 1/(n! (n+2))
    for n in range(_SERIES_TERMS):
        if order == 3:
            acc += term / (n + 2)
            term = term * zs / (n + 1)
        else:
            if n == 0:
                term = term / float(np.prod(np.arange(1, order + 1)))
            acc += term
            term = term * zs / (n + order + 1)
    out[small] = acc
    zb = z[~small]
    ez = np.exp(zb)
    if order == 1:
        out[~small] = (ez - 1) / zb
    elif order == 2:
        out[~small] = (ez - 1 - zb) / zb**2
    else:
        out[~small] = (ez * (zb - 1) + 1) / zb**2
    return out


@njit(cache=True)
def _phi_scalar(z, order):
    if abs(z) < _SERIES_RADIUS:
        acc = 0j
        if order == 3:
            term = 1.0 + 0j
            for n in range(_SERIES_TERMS):
                acc += term / (n + 2)
                term = term * z / (n + 1)
            return acc
        term = 1.0 + 0j
        for m in range(1, order + 1):
            term = term / m
        for n in range(_SERIES_TERMS):
            acc += term
            term = term * z / (n + order + 1)
        return acc
    ez = np.exp(z)
    if order == 1:
        return (ez - 1) / z
    if order == 2:
        return (ez - 1 - z) / (z * z)
    return (ez * (z - 1) + 1) / (z * z)


def phi(z, order):
    """Entire functions used by the product-integration and Filon weights."""
    return _phi_np(z, order)


# --- contour sums -------------------------------------------------------------

def moment_sum_np(amp, omega, t, order):
    """``sum_j amp_j t^p phi_p(-i omega_j t)`` (``p = order``; ``p = 0`` is exp)."""
    amp = np.asarray(amp, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    for i, ti in enumerate(t.ravel()):
        z = -1j * omega * ti
        if order == 0:
            vals = np.exp(z)
        else:
            vals = ti**order * _phi_np(z, order)
        out.flat[i] = np.dot(amp, vals)
    return out


@njit(parallel=True, cache=True)
def _moment_sum_nb(amp, omega, t, order):
    n = t.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in prange(n):
        ti = t[i]
        acc = 0j
        for j in range(amp.shape[0]):
            z = -1j * omega[j] * ti
            if order == 0:
                acc += amp[j] * np.exp(z)
            else:
                acc += amp[j] * ti**order * _phi_scalar(z, order)
        out[i] = acc
    return out


def moment_sum(amp, omega, t, order=0):
    if not USE_NUMBA:
        return moment_sum_np(amp, omega, t, order)
    t = np.asarray(t, dtype=float)
    flat = _moment_sum_nb(np.ascontiguousarray(amp, dtype=np.complex128),
                          np.ascontiguousarray(omega, dtype=np.complex128),
                          np.ascontiguousarray(t.ravel()), int(order))
    return flat.reshape(t.shape)


# --- real Fourier synthesis ---------------------------------------------------

def real_synthesis_np(coef, k, x):
    """``sum_j Re(coef_j exp(i k_j x))`` for every ``x``."""
    coef = np.asarray(coef, dtype=complex)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    chunk = max(1, 2**20 // max(1, len(k)))
    xf = x.ravel()
    of = out.ravel()
    for s in range(0, xf.size, chunk):
        ph = np.exp(1j * np.outer(xf[s:s + chunk], k))
        of[s:s + chunk] = (ph @ coef).real
    return of.reshape(x.shape)


@njit(parallel=True, cache=True)
def _real_synthesis_nb(cr, ci, k, x):
    n = x.shape[0]
    out = np.empty(n)
    for i in prange(n):
        acc = 0.0
        xi = x[i]
        for j in range(k.shape[0]):
            a = k[j] * xi
            acc += cr[j] * np.cos(a) - ci[j] * np.sin(a)
        out[i] = acc
    return out


def real_synthesis(coef, k, x):
    if not USE_NUMBA:
        return real_synthesis_np(coef, k, x)
    coef = np.asarray(coef, dtype=complex)
    x = np.asarray(x, dtype=float)
    flat = _real_synthesis_nb(np.ascontiguousarray(coef.real), np.ascontiguousarray(coef.imag),
                              np.ascontiguousarray(k, dtype=float),
                              np.ascontiguousarray(x.ravel()))
    return flat.reshape(x.shape)


# --- lower-triangular Toeplitz systems -----------------------------------------

def toeplitz_apply_np(w, x):
    """``y_i = sum_{j<=i} w_{i-j} x_j``."""
    w = np.asarray(w, dtype=complex)
    x = np.asarray(x, dtype=complex)
    return np.convolve(w[: len(x)], x)[: len(x)]


def toeplitz_solve_np(w, b):
    """Solve ``sum_{j<=i} w_{i-j} x_j = b_i`` by back-substitution."""
    w = np.asarray(w, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = len(b)
    if n == 0:
        return b.copy()
    T = toeplitz(w[:n], np.zeros(n))
    return solve_triangular(T, b, lower=True, check_finite=False)


@njit(cache=True)
def _toeplitz_apply_nb(w, x):
    n = x.shape[0]
    y = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0j
        for j in range(i + 1):
            acc += w[i - j] * x[j]
        y[i] = acc
    return y


@njit(cache=True)
def _toeplitz_solve_nb(w, b):
    n = b.shape[0]
    x = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = b[i]
        for j in range(i):
            acc -= w[i - j] * x[j]
        x[i] = acc / w[0]
    return x


def toeplitz_apply(w, x):
    if not USE_NUMBA:
        return toeplitz_apply_np(w, x)
    return _toeplitz_apply_nb(np.ascontiguousarray(w, dtype=np.complex128),
                              np.ascontiguousarray(x, dtype=np.complex128))


def toeplitz_solve(w, b):
    if not USE_NUMBA:
        return toeplitz_solve_np(w, b)
    return _toeplitz_solve_nb(np.ascontiguousarray(w, dtype=np.complex128),
                              np.ascontiguousarray(b, dtype=np.complex128))


# --- Filon accumulation -------------------------------------------------------

def filon_cumulative_np(f, omega, h):
    """``int_0^{t_n} exp(i w s) f(s) ds`` for piecewise-linear ``f`` on ``t_n = n h``.

    Returns an array of shape ``(len(omega), len(f))``; exact for linear data.
    """
    f = np.asarray(f, dtype=complex)
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    n = len(f)
    z = 1j * omega * h
    p1 = _phi_np(z, 1)
    ps = _phi_np(z, 3)
    a = h * (p1 - ps)
    b = h * ps
    out = np.zeros((len(omega), n), dtype=complex)
    if n > 1:
        steps = np.exp(1j * np.outer(omega, np.arange(n - 1) * h))
        pieces = steps * (a[:, None] * f[None, :-1] + b[:, None] * f[None, 1:])
        out[:, 1:] = np.cumsum(pieces, axis=1)
    return out


@njit(parallel=True, cache=True)
def _filon_cumulative_nb(f, omega, h):
    m = omega.shape[0]
    n = f.shape[0]
    out = np.zeros((m, n), dtype=np.complex128)
    for i in prange(m):
        z = 1j * omega[i] * h
        p1 = _phi_scalar(z, 1)
        ps = _phi_scalar(z, 3)
        a = h * (p1 - ps)
        b = h * ps
        acc = 0j
        for j in range(n - 1):
            acc += np.exp(1j * omega[i] * (j * h)) * (a * f[j] + b * f[j + 1])
            out[i, j + 1] = acc
    return out


def filon_cumulative(f, omega, h):
    if not USE_NUMBA:
        return filon_cumulative_np(f, omega, h)
    omega = np.atleast_1d(np.asarray(omega, dtype=np.complex128))
    return _filon_cumulative_nb(np.ascontiguousarray(f, dtype=np.complex128),
                                np.ascontiguousarray(omega), float(h))
