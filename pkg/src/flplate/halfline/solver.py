"""Half-line problem: global relation, boundary traces and assembly.

For ``Im k <= 0`` the half-line transform obeys the forced mode equation

    (1 + 1/k) eta_tt + 2 i U eta_t + (k^4 - U^2 k) eta = f(k, t) / sqrt(2 pi),
    f(k, t) = eta_xxx(0, t) + i k eta_xx(0, t),

whose solution is the free evolution plus

    beta(k) [F_t(w_+) e^{-i w_+ t} - F_t(w_-) e^{-i w_- t}],
    beta = alpha k / ((k + 1) sqrt(2 pi)) = i / (2 Q sqrt(2 pi)),

with ``F_t(w) = int_0^t e^{i w s} f(k, s) ds``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._kernels import filon_cumulative, phi
from ..dispersion import PlateParams, discriminant_root, omega_pm
from ..errors import ClosureUnavailable, ConfigError, UnderResolvedOscillation
from ..fullline import SpectralDecomposition, free_eta_hat, potential_hat
from ..spectral import SQRT2PI, FieldSlice, fourier_forward, fourier_inverse_real, make_grid
from ..io import write_complex_csv
from .kernel import KernelTable, compute_g
from .volterra import (ProductWeights, convolve, kernel_product_weights, l2_norm,
                       solve_first_kind)

OSCILLATION_LIMIT = 4 * math.pi
CLOSURES = ("given-xxx", "given-xx", "free-edge-zero")


def surface_potential_relation(eta_hat, eta_hat_t, k, params):
    """``phi_hat = eta_hat_t / k + i U eta_hat``."""
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ConfigError("the potential relation is singular at k = 0")
    U = params.U if isinstance(params, PlateParams) else float(params)
    out = potential_hat(k, np.asarray(eta_hat), np.asarray(eta_hat_t), U)
    return out[()] if np.ndim(out) == 0 else out


@dataclass
class BoundaryTraces:
    """``eta_xx(0, t)`` and ``eta_xxx(0, t)`` on a uniform grid starting at 0."""

    t_nodes: np.ndarray
    eta_xx0: np.ndarray
    eta_xxx0: np.ndarray

    def __post_init__(self):
        self.t_nodes = np.asarray(self.t_nodes, dtype=float)
        self.eta_xx0 = np.asarray(self.eta_xx0, dtype=complex)
        self.eta_xxx0 = np.asarray(self.eta_xxx0, dtype=complex)
        n = len(self.t_nodes)
        if n < 2 or len(self.eta_xx0) != n or len(self.eta_xxx0) != n:
            raise ConfigError("traces need matching samples on at least two nodes")
        if self.t_nodes[0] != 0.0:
            raise ConfigError("trace samples must start at t = 0")
        steps = np.diff(self.t_nodes)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise ConfigError("trace samples must be uniformly spaced")

    @property
    def dt(self):
        return float(self.t_nodes[1] - self.t_nodes[0])

    @classmethod
    def zeros(cls, T=1.0, nt=1000):
        t = np.linspace(0.0, T, nt + 1)
        return cls(t, np.zeros(nt + 1), np.zeros(nt + 1))

    @classmethod
    def from_functions(cls, eta_xx, eta_xxx, T=1.0, nt=1000):
        t = np.linspace(0.0, T, nt + 1)
        return cls(t, eta_xx(t), eta_xxx(t))

    def to_csv(self, path, which="xx"):
        vals = self.eta_xx0 if which == "xx" else self.eta_xxx0
        write_complex_csv(path, self.t_nodes, vals)


def _filon_to(values, omega, dt, t):
    """``int_0^t e^{i w s} v(s) ds`` for piecewise-linear samples ``v``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    n = int(math.floor(t / dt + 1e-9))
    n = min(n, len(values) - 1)
    out = np.zeros(omega.shape, dtype=complex)
    if not np.any(values[: n + 2]):
        return out
    step = 1024
    for a in range(0, len(omega), step):
        out[a:a + step] = filon_cumulative(values[: n + 1], omega[a:a + step], dt)[:, -1]
    rest = t - n * dt
    if rest > 1e-12 * dt and n + 1 < len(values):
        vt = values[n] + (values[n + 1] - values[n]) * rest / dt
        z = 1j * omega * rest
        p1, ps = phi(z, 1), phi(z, 3)
        out += np.exp(1j * omega * n * dt) * rest * ((p1 - ps) * values[n] + ps * vt)
    return out


def F_t(omega, k, traces: BoundaryTraces, t, threshold=OSCILLATION_LIMIT):
    """``int_0^t e^{i w s} [eta_xxx(0, s) + i k eta_xx(0, s)] ds`` (Filon, linear data).

    Raises
    ------
    UnderResolvedOscillation
        If ``|w| dt`` exceeds ``threshold`` for any requested frequency.
    """
    omega = np.asarray(omega, dtype=complex)
    k = np.broadcast_to(np.asarray(k, dtype=complex), omega.shape)
    if t < 0 or t > traces.t_nodes[-1] * (1 + 1e-12):
        raise ConfigError("t outside the sampled trace interval")
    worst = float(np.max(np.abs(omega))) * traces.dt if omega.size else 0.0
    if worst > threshold:
        raise UnderResolvedOscillation(
            f"|omega| dt = {worst:.3g} exceeds {threshold:.3g}; refine the trace grid")
    flat_w = omega.ravel()
    a = _filon_to(traces.eta_xxx0, flat_w, traces.dt, t)
    b = _filon_to(traces.eta_xx0, flat_w, traces.dt, t)
    out = (a + 1j * k.ravel() * b).reshape(omega.shape)
    return out[()] if out.ndim == 0 else out


def global_relation_eta_hat(k, t, traces, decomposition, params=None, with_derivative=False):
    """Half-line ``eta_hat(k, t)`` from initial data and boundary traces.

    ``decomposition`` supplies ``k`` and ``eta0_hat`` (a
    :class:`SpectralDecomposition`, or any object with an ``eta0_hat``
    attribute aligned with ``k``).  With zero traces this is exactly the
    whole-line evolution.
    """
    params = params or PlateParams()
    U = params.U
    k = np.asarray(k, dtype=complex)
    eta0_hat = np.asarray(decomposition.eta0_hat, dtype=complex)
    e, et = free_eta_hat(k, eta0_hat, U, float(t))
    if traces is not None and t > 0 and (np.any(traces.eta_xx0) or np.any(traces.eta_xxx0)):
        wp, wm = omega_pm(k, U, check=False)
        Q = discriminant_root(k, U)
        beta = 1j / (2 * Q * SQRT2PI)
        Fp = F_t(wp, k, traces, t)
        Fm = F_t(wm, k, traces, t)
        ep, em = np.exp(-1j * wp * t), np.exp(-1j * wm * t)
        e = e + beta * (Fp * ep - Fm * em)
        et = et + beta * (-1j * wp * Fp * ep + 1j * wm * Fm * em)
    if with_derivative:
        return e, et
    return e


def forcing_hat(k, t, traces):
    """Right side ``f(k, t) / sqrt(2 pi)`` of the forced mode equation at sample times."""
    i = np.searchsorted(traces.t_nodes, t)
    if i >= len(traces.t_nodes) or abs(traces.t_nodes[i] - t) > 1e-12:
        th = np.interp(t, traces.t_nodes, traces.eta_xxx0.real) + 1j * np.interp(
            t, traces.t_nodes, traces.eta_xxx0.imag)
        ch = np.interp(t, traces.t_nodes, traces.eta_xx0.real) + 1j * np.interp(
            t, traces.t_nodes, traces.eta_xx0.imag)
    else:
        th, ch = traces.eta_xxx0[i], traces.eta_xx0[i]
    return (th + 1j * np.asarray(k) * ch) / SQRT2PI


# --- trace equations -----------------------------------------------------------

def _weights_for(K, dt, n_steps, params):
    if isinstance(K, ProductWeights):
        return K
    return kernel_product_weights(params or PlateParams(), dt, n_steps)


def solve_eta_xx_given_eta_xxx(g, K, eta_xxx0, params=None):
    """``eta_xx(0, t) = [g(t) - (K * eta_xxx(0, .))(t)] / (2 pi i)``.

    Parameters
    ----------
    g : KernelTable or array
        Forcing samples on the uniform grid.
    K : ProductWeights or KernelTable
        Product-integration weights (built from the kernel when a table is
        given; its ``t_nodes`` fix the grid).
    eta_xxx0 : array
    """
    gv = g.g_values if isinstance(g, KernelTable) else np.asarray(g, dtype=complex)
    theta = np.asarray(eta_xxx0, dtype=complex)
    if len(gv) != len(theta):
        raise ConfigError("g and eta_xxx samples are not aligned")
    if isinstance(K, KernelTable):
        dt = float(K.t_nodes[1] - K.t_nodes[0])
        K = _weights_for(None, dt, len(theta) - 1, params)
    conv = convolve(K, theta) if np.any(theta) else np.zeros_like(gv)
    return (gv - conv) / (2j * math.pi)


def solve_eta_xxx_given_eta_xx(g, K, eta_xx0, params=None, theta0=0.0, dt=None):
    """Recover ``eta_xxx(0, .)`` from ``K * theta = g - 2 pi i eta_xx(0, .)``.

    Both the product-integration and the convolution-quadrature solutions are
    computed; they must agree (see :func:`solve_first_kind`).  Returns the
    product-integration samples; the full result is available through
    :func:`solve_first_kind`.
    """
    params = params or PlateParams()
    gv = g.g_values if isinstance(g, KernelTable) else np.asarray(g, dtype=complex)
    chi = np.asarray(eta_xx0, dtype=complex)
    if len(gv) != len(chi):
        raise ConfigError("g and eta_xx samples are not aligned")
    rhs = gv - 2j * math.pi * chi
    if isinstance(K, ProductWeights):
        pw, dt = K, K.dt
    else:
        if dt is None:
            if not isinstance(g, KernelTable):
                raise ConfigError("time step unknown; pass dt or a KernelTable")
            dt = float(g.t_nodes[1] - g.t_nodes[0])
        pw = kernel_product_weights(params, dt, len(rhs) - 1)
    return solve_first_kind(params, rhs, dt, theta0, pw).theta


# --- assembly -------------------------------------------------------------------

@dataclass
class HalfLineSolution:
    params: PlateParams
    traces: BoundaryTraces
    grid: object
    eta0_hat: np.ndarray
    closure: str
    g: np.ndarray = None
    closure_residual: float = 0.0
    hinge_residuals: dict = field(default_factory=dict)
    fields: list = field(default_factory=list)

    @property
    def k(self):
        return self.grid.nodes

    def eta_hat(self, t, with_derivative=False):
        dec = SpectralDecomposition(self.k, self.eta0_hat, None, None, None, None, None)
        return global_relation_eta_hat(self.k, t, self.traces, dec, self.params,
                                       with_derivative)

    def field(self, x_nodes, t):
        return fourier_inverse_real(self.eta_hat(t), self.grid, x_nodes, t)

    def hinge_values(self, t):
        """``eta(0, t)`` and ``eta_x(0, t)`` reconstructed from the transform."""
        e = self.eta_hat(t)
        z = np.zeros(1)
        return (float(fourier_inverse_real(e, self.grid, z).values[0]),
                float(fourier_inverse_real(1j * self.k * e, self.grid, z).values[0]))


def _as_samples(v, t):
    if v is None:
        return None
    if callable(v):
        return np.asarray(v(t), dtype=complex)
    v = np.asarray(v, dtype=complex)
    if v.shape != t.shape:
        raise ConfigError("trace samples do not match the time grid")
    return v


def solve_half_line(profile, params=None, grid=None, closure="given-xxx", eta_xxx0=None,
                    eta_xx0=None, T=1.0, nt=1000, x_nodes=None, output_times=None,
                    theta0=0.0):
    """Assemble the half-line solution under a trace-closure policy.

    Parameters
    ----------
    closure : {"given-xxx", "given-xx", "free-edge-zero"}
        ``given-xxx`` takes ``eta_xxx0`` (zero when omitted) and computes the
        second trace from the trace equation; ``given-xx`` requires
        ``eta_xx0`` and recovers the third-derivative trace by
        deconvolution; ``free-edge-zero`` uses the supplied traces (zero by
        default) and reports how far they are from satisfying the equation.
    eta_xxx0, eta_xx0 : array or callable of t, optional
    output_times : sequence of float, optional
        Times at which field slices (on ``x_nodes``) are stored.

    Notes
    -----
    The clamped-hinge values ``eta(0, t)``, ``eta_x(0, t)`` are reported in
    ``hinge_residuals``, not enforced.
    """
    params = params or PlateParams()
    if closure not in CLOSURES:
        raise ConfigError(f"unknown closure {closure!r}; choose from {CLOSURES}")
    if profile.support != "half":
        raise ConfigError("the half-line solver needs a half-line profile")
    grid = grid or make_grid(k_max=60.0)
    t = np.linspace(0.0, T, nt + 1)
    dt = t[1] - t[0]
    theta = _as_samples(eta_xxx0, t)
    chi = _as_samples(eta_xx0, t)
    eta0_hat = np.asarray(fourier_forward(profile, grid.nodes), dtype=complex)
    is_zero = not np.any(eta0_hat) and not any(
        v is not None and np.any(v) for v in (theta, chi))

    if is_zero:
        gv = np.zeros(nt + 1, dtype=complex)
    else:
        gv = compute_g(profile, params, t_nodes=t).g_values

    residual = 0.0
    if closure == "given-xxx":
        theta = np.zeros(nt + 1, dtype=complex) if theta is None else theta
        pw = None if not np.any(theta) else kernel_product_weights(params, dt, nt)
        chi = gv / (2j * math.pi) if pw is None else solve_eta_xx_given_eta_xxx(gv, pw, theta)
    elif closure == "given-xx":
        if chi is None:
            raise ClosureUnavailable("closure 'given-xx' needs eta_xx(0, t) samples")
        if is_zero:
            theta = np.zeros(nt + 1, dtype=complex)
        else:
            pw = kernel_product_weights(params, dt, nt)
            theta = solve_eta_xxx_given_eta_xx(gv, pw, chi, params, theta0)
    else:
        theta = np.zeros(nt + 1, dtype=complex) if theta is None else theta
        chi = np.zeros(nt + 1, dtype=complex) if chi is None else chi
        if not is_zero:
            pw = kernel_product_weights(params, dt, nt)
            mismatch = 2j * math.pi * chi - gv + convolve(pw, theta)
            residual = l2_norm(mismatch, dt)

    traces = BoundaryTraces(t, chi, theta)
    sol = HalfLineSolution(params, traces, grid, eta0_hat, closure, gv, residual)
    times = list(output_times) if output_times is not None else [0.0, T]
    h_eta, h_x = [], []
    for tt in times:
        a, b = sol.hinge_values(tt)
        h_eta.append(abs(a))
        h_x.append(abs(b))
        if x_nodes is not None:
            sol.fields.append(sol.field(x_nodes, tt))
    sol.hinge_residuals = {"t": np.array(times), "eta": np.array(h_eta), "eta_x": np.array(h_x)}
    return sol
