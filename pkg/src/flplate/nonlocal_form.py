"""Residuals of the nonlinear non-local formulation for sampled surface data.

The plate deflection ``eta(x, t)`` and the surface potential
``varphi(x, t) = phi(x, eta(x, t), t)`` solve the nonlinear problem when

    int_R e^{-ikx + k eta} (eta_t + U eta_x + i varphi_x) dx = 0,   k > 0,
    eta_tt + eta_xxxx + varphi_t - eta_t^2/2 - U^2/2
        + (U + varphi_x - eta_x eta_t)^2 / (2 (1 + eta_x^2)) = 0.

Nothing here differentiates the samples: callers pass every derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
from scipy.special import exp1

from .errors import ConfigError
from .io import read_table, write_table
from .spectral import fourier_inverse_real

TAIL_ORDER = 6
TAIL_FRACTION = 0.75

_REQUIRED = ("eta", "eta_t", "eta_x", "eta_xx", "eta_xxxx", "varphi", "varphi_t", "varphi_x")


@dataclass
class SurfaceState:
    """Samples of the surface fields at one instant.

    ``eta_tt`` is optional; the beam residual needs it.
    """

    x_nodes: np.ndarray
    eta: np.ndarray
    eta_t: np.ndarray
    eta_x: np.ndarray
    eta_xx: np.ndarray
    eta_xxxx: np.ndarray
    varphi: np.ndarray
    varphi_t: np.ndarray
    varphi_x: np.ndarray
    eta_tt: np.ndarray = None

    def __post_init__(self):
        self.x_nodes = np.asarray(self.x_nodes, dtype=float)
        n = self.x_nodes.shape
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            v = np.asarray(v, dtype=float)
            if v.shape != n:
                raise ConfigError(f"field {f.name} has shape {v.shape}, expected {n}")
            setattr(self, f.name, v)

    @classmethod
    def rest(cls, x_nodes, level=0.0):
        z = np.zeros_like(np.asarray(x_nodes, dtype=float))
        return cls(x_nodes, z + level, z, z, z, z, z, z, z, z)

    @classmethod
    def from_csv(cls, path):
        cols = read_table(path)
        missing = {"x", *_REQUIRED} - set(cols)
        if missing:
            raise ConfigError(f"state CSV lacks columns {sorted(missing)}")
        kw = {n: cols[n] for n in _REQUIRED}
        if "eta_tt" in cols:
            kw["eta_tt"] = cols["eta_tt"]
        return cls(cols["x"], **kw)

    def to_csv(self, path):
        names = list(_REQUIRED) + (["eta_tt"] if self.eta_tt is not None else [])
        write_table(path, ["x", *names], [self.x_nodes] + [getattr(self, c) for c in names])

    def derivative_mismatch(self):
        """Largest gap between supplied x-derivatives and second-order differences."""
        x = self.x_nodes
        d = lambda f: np.gradient(f, x, edge_order=2)
        return {"eta_x": float(np.max(np.abs(d(self.eta) - self.eta_x))),
                "eta_xx": float(np.max(np.abs(d(self.eta_x) - self.eta_xx))),
                "varphi_x": float(np.max(np.abs(d(self.varphi) - self.varphi_x)))}


def _speed(params):
    return params.U if hasattr(params, "U") else float(params)


def surface_gradients(state: SurfaceState, params):
    """``(phi_x, phi_y, phi_t)`` on the surface from the surface data.

    Inverts the chain rule ``varphi_x = phi_x + eta_x phi_y``,
    ``varphi_t = phi_t + eta_t phi_y`` together with the kinematic condition.
    """
    U = _speed(params)
    ex, et = state.eta_x, state.eta_t
    vx, vt = state.varphi_x, state.varphi_t
    m = 1.0 + ex * ex
    kin = et + U * ex
    phi_x = (vx - ex * kin) / m
    phi_y = (vx * ex + kin) / m
    phi_t = vt - et * (kin + ex * vx) / m
    return phi_x, phi_y, phi_t


def chain_rule(state: SurfaceState, phi_x, phi_y, phi_t):
    """``(varphi_x, varphi_t)`` rebuilt from the bulk gradients."""
    return phi_x + state.eta_x * phi_y, phi_t + state.eta_t * phi_y


def bernoulli_beam_residual(state: SurfaceState, params):
    """Pointwise residual of the combined beam/Bernoulli equation."""
    if state.eta_tt is None:
        raise ConfigError("the beam residual needs eta_tt samples")
    U = _speed(params)
    ex, et = state.eta_x, state.eta_t
    flux = U + state.varphi_x - ex * et
    return (state.eta_tt + state.eta_xxxx + state.varphi_t - 0.5 * et * et - 0.5 * U * U
            + flux * flux / (2.0 * (1.0 + ex * ex)))


def _weights(x):
    # trapezoid weights; spectrally accurate for decaying data on uniform grids
    w = np.empty_like(x)
    dx = np.diff(x)
    w[0], w[-1] = dx[0] / 2, dx[-1] / 2
    w[1:-1] = (dx[:-1] + dx[1:]) / 2
    return w


def _expn(m, z):
    """``E_m(z)`` for complex ``z`` by upward recurrence from ``E_1``."""
    E = exp1(z)
    for j in range(1, m):
        E = (np.exp(-z) - z * E) / j
    return E


def _tail(s, g, k, order=TAIL_ORDER, frac=TAIL_FRACTION):
    """``int_X^inf e^{-iks} g(s) ds`` for ``g`` fitted by ``sum c_m (X/s)^m`` on ``s >= frac X``."""
    X = s[-1]
    sel = s >= frac * X
    if X <= 0 or sel.sum() < 2 * order:
        return 0j
    A = np.stack([(X / s[sel]) ** m for m in range(1, order + 1)], axis=1)
    c, *_ = np.linalg.lstsq(A, g[sel], rcond=None)
    z = 1j * k * X
    return complex(sum(c[m - 1] * X * _expn(m, z) for m in range(1, order + 1)))


def global_relation_residual(state: SurfaceState, k, params, linear=False, tails=True):
    """``int e^{-ikx + k eta} (eta_t + U eta_x + i varphi_x) dx`` for ``k > 0``.

    ``linear=True`` drops the factor ``e^{k eta}``; the result is then
    ``sqrt(2 pi) (eta_hat_t + i k U eta_hat - k varphi_hat)``.

    The surface potential of a localised disturbance decays only like
    ``1/x``, so the sampled window is closed off with algebraic tails: the
    non-oscillatory factor is fitted by inverse powers on the outer quarter of
    each side and integrated in closed form through exponential integrals.
    ``tails=False`` gives the plain truncated trapezoid sum.
    """
    k = float(k)
    if k <= 0:
        raise ConfigError("the global relation holds for k > 0")
    U = _speed(params)
    x = state.x_nodes
    lift = 0.0 if linear else k * state.eta
    g = np.exp(lift) * (state.eta_t + U * state.eta_x + 1j * state.varphi_x)
    total = complex(np.dot(_weights(x), np.exp(-1j * k * x) * g))
    if tails:
        total += _tail(x, g, k) + _tail(-x[::-1], g[::-1], -k)
    return total


def state_from_full_line(sol, x_nodes, t):
    """Linearised surface state from a whole-line spectral solution."""
    k = sol.k
    e, et = sol.eta_hat(t), sol.eta_hat_t(t)
    ett = sol.eta_hat_tt(t)
    ph, pht = sol.phi_hat(t), sol.phi_hat_t(t)

    def real(vals, power=0):
        return fourier_inverse_real(vals * (1j * k) ** power, sol.grid, x_nodes).values

    return SurfaceState(x_nodes, real(e), real(et), real(e, 1), real(e, 2), real(e, 4),
                        real(ph), real(pht), real(ph, 1), eta_tt=real(ett))
