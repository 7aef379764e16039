"""Cauchy problem on the whole line.

Each Fourier mode obeys

    (1 + 1/k) eta_tt + 2 i U eta_t + (k^4 - U^2 k) eta = 0,

with ``eta(k, 0) = eta0_hat`` and ``eta_t(k, 0) = -i k (k^2 + U^2) eta0_hat / (2U)``
(the latter from the potential vanishing initially).  The modal solution
``c_+ e^{-i w_+ t} + c_- e^{-i w_- t}`` is rewritten about the mean frequency

    eta_hat = e^{-i s t} [eta0_hat cos(d t) - i B sin(d t)],
    s = U k/(k+1),  d = k Q/(k+1),

in which every term is an even function of ``Q``.  That form is analytic at
``k = 0`` and at the real branch point, where the modal coefficients blow up.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dispersion import PlateParams, branch_points, discriminant_root, omega_pm
from .errors import ConfigError
from .spectral import (FieldSlice, SpectralGrid, fourier_forward, fourier_inverse_real,
                       make_grid, sobolev_norm)


def _sinc(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    zz = z * z
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 - zz / 6 + zz * zz / 120, np.sin(safe) / safe)


def _mode_parts(k, U):
    k = np.asarray(k, dtype=complex)
    Q2 = k * (k**3 + k**2 - U**2)
    kp1 = k + 1
    sigma = U * k / kp1
    d2 = Q2 * k * k / kp1**2
    d = np.sqrt(d2)
    # B d and B / d up to the common factor eta0_hat
    bd = (Q2 / U + k * k * U) / (2 * kp1)
    return sigma, d, d2, bd


def free_eta_hat(k, eta0_hat, U, t):
    """``eta_hat(k, t)`` and ``eta_hat_t(k, t)`` for the unforced problem.

    ``t`` may be an array; the result broadcasts to ``t.shape + k.shape``.
    """
    sigma, d, d2, bd = _mode_parts(k, U)
    t = np.asarray(t, dtype=float)[..., None] if np.ndim(t) else float(t)
    s = _sinc(d * t)
    c = np.cos(d * t)
    A = eta0_hat * c - 1j * eta0_hat * bd * t * s
    dA = -eta0_hat * d2 * t * s - 1j * eta0_hat * bd * c
    rot = np.exp(-1j * sigma * t)
    return rot * A, rot * (-1j * sigma * A + dA)


def mode_acceleration(k, eta_hat, eta_hat_t, U, forcing=0.0):
    """``eta_tt`` from the mode equation (right side ``forcing``)."""
    k = np.asarray(k, dtype=complex)
    return (k * forcing - k * (2j * U * eta_hat_t + (k**4 - U**2 * k) * eta_hat)) / (k + 1)


def mode_residual(k, eta_hat, eta_hat_t, eta_hat_tt, U):
    """``(1 + 1/k) eta_tt + 2 i U eta_t + (k^4 - U^2 k) eta``."""
    k = np.asarray(k, dtype=complex)
    return (1 + 1 / k) * eta_hat_tt + 2j * U * eta_hat_t + (k**4 - U**2 * k) * eta_hat


def initial_velocity(k, eta0_hat, U):
    k = np.asarray(k, dtype=complex)
    return -1j * k * (k * k + U * U) * eta0_hat / (2 * U)


def potential_hat(k, eta_hat, eta_hat_t, U):
    """``phi_hat = eta_hat_t / k + i U eta_hat``."""
    return eta_hat_t / k + 1j * U * eta_hat


@dataclass
class SpectralDecomposition:
    """Modal data ``w_pm, c_pm, alpha`` on a set of k values.

    Entries within ``exclusion_radius`` of a branch point are NaN: there the
    modal split is singular although the solution itself is smooth.
    """

    k: np.ndarray
    eta0_hat: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    alpha: np.ndarray


def decompose(k, eta0_hat, params, branch="lower"):
    k = np.asarray(k, dtype=complex)
    eta0_hat = np.broadcast_to(np.asarray(eta0_hat, dtype=complex), k.shape)
    U = params.U
    wp, wm = omega_pm(k, U, branch, check=False)
    wp, wm = np.atleast_1d(wp), np.atleast_1d(wm)
    den = wm**2 - wp**2
    with np.errstate(divide="ignore", invalid="ignore"):
        cp = (wm**2 - k**4) / den * eta0_hat
        cm = -(wp**2 - k**4) / den * eta0_hat
        alpha = 1 / (1j * (wm - wp))
    pts = np.asarray(branch_points(params).branch_points)
    near = np.min(np.abs(k.reshape(-1, 1) - pts), axis=1).reshape(k.shape) < params.exclusion_radius
    for arr in (cp, cm, alpha):
        arr[near] = np.nan
    return SpectralDecomposition(k, np.array(eta0_hat), wp, wm, cp, cm, alpha)


@dataclass
class FullLineSolution:
    params: PlateParams
    grid: SpectralGrid
    eta0_hat: np.ndarray
    profile: object = None
    _decomp: SpectralDecomposition = field(default=None, repr=False)

    @property
    def k(self):
        return self.grid.nodes

    @property
    def decomposition(self) -> SpectralDecomposition:
        if self._decomp is None:
            self._decomp = decompose(self.k, self.eta0_hat, self.params)
        return self._decomp

    def eta_hat(self, t):
        return free_eta_hat(self.k, self.eta0_hat, self.params.U, t)[0]

    def eta_hat_t(self, t):
        return free_eta_hat(self.k, self.eta0_hat, self.params.U, t)[1]

    def eta_hat_tt(self, t):
        e, et = free_eta_hat(self.k, self.eta0_hat, self.params.U, t)
        return mode_acceleration(self.k, e, et, self.params.U)

    def phi_hat(self, t):
        e, et = free_eta_hat(self.k, self.eta0_hat, self.params.U, t)
        return potential_hat(self.k, e, et, self.params.U)

    def phi_hat_t(self, t):
        e, et = free_eta_hat(self.k, self.eta0_hat, self.params.U, t)
        ett = mode_acceleration(self.k, e, et, self.params.U)
        return potential_hat(self.k, et, ett, self.params.U)


def solve_full_line(profile, params=None, grid=None):
    """Spectral solution of the whole-line Cauchy problem for ``profile``."""
    params = params or PlateParams()
    if profile.support != "full":
        raise ConfigError("the full-line solver needs a full-line profile")
    grid = grid or make_grid(params.k_max, params.k_min)
    eta0_hat = np.asarray(fourier_forward(profile, grid.nodes), dtype=complex)
    return FullLineSolution(params, grid, eta0_hat, profile)


def evaluate_field(sol, x_nodes, t):
    """``(eta, phi)`` slices at time ``t``."""
    e, et = free_eta_hat(sol.k, sol.eta0_hat, sol.params.U, float(t))
    ph = potential_hat(sol.k, e, et, sol.params.U)
    return (fourier_inverse_real(e, sol.grid, x_nodes, t),
            fourier_inverse_real(ph, sol.grid, x_nodes, t))


def evaluate_grid(sol, x_nodes, t_nodes):
    """Arrays ``eta[i_t, i_x]`` and ``phi[i_t, i_x]``."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    eta = np.empty((len(t_nodes), len(x_nodes)))
    phi = np.empty_like(eta)
    for i, t in enumerate(t_nodes):
        a, b = evaluate_field(sol, x_nodes, t)
        eta[i], phi[i] = a.values, b.values
    return eta, phi


# --- well-posedness ----------------------------------------------------------

def trig_identity_sides(k, U, t):
    """Both sides of ``|c~_- e^{-i w_- t} + c~_+ e^{-i w_+ t}|^2 = |cos + ... sin|^2``.

    ``c~ = c / eta0_hat`` comes from the modal split; the right side uses
    ``Q = sqrt(k (k^3 + k^2 - U^2))`` (imaginary where ``Q^2 < 0``, i.e. the
    continuation ``cos(iy) = cosh(y)``).
    """
    k = np.asarray(k, dtype=complex)
    wp, wm = omega_pm(k, U, check=False)
    den = wm**2 - wp**2
    cp = (wm**2 - k**4) / den
    cm = -(wp**2 - k**4) / den
    lhs = np.abs(cm * np.exp(-1j * wm * t) + cp * np.exp(-1j * wp * t)) ** 2
    Q = np.sqrt(k * (k**3 + k**2 - U**2))
    arg = k * Q * t / (1 + k)
    rhs = np.abs(np.cos(arg) + (Q / U + k * k * U / Q) * np.sin(arg) / (2j * k)) ** 2
    return lhs, rhs


def trig_identity_residual(k, U, t):
    lhs, rhs = trig_identity_sides(k, U, t)
    return np.abs(lhs - rhs)


@dataclass
class WellposednessReport:
    t: np.ndarray
    l2_eta: np.ndarray
    h2_eta0: float
    ratio: np.ndarray
    identity_residual_real: np.ndarray
    identity_residual_continued: np.ndarray

    @property
    def sup_ratio(self) -> float:
        return float(np.max(self.ratio))

    def as_rows(self):
        return [(float(t), float(a), self.h2_eta0, float(r), float(i1), float(i2))
                for t, a, r, i1, i2 in zip(self.t, self.l2_eta, self.ratio,
                                           self.identity_residual_real,
                                           self.identity_residual_continued)]


def wellposedness_report(sol, t_nodes):
    """Norm ratio ``||eta(t)||_{L2} / ||eta0||_{H2}`` and identity residuals.

    Norms use Parseval on the solution grid.  Identity residuals are maxima
    over grid nodes away from branch points, split by the sign of ``Q^2``.
    """
    U = sol.params.U
    k = sol.k
    w = sol.grid.weights
    h2 = float(np.sqrt(2 * np.dot(w, np.abs(sol.eta0_hat) ** 2 * (1 + k * k) ** 2)))
    if sol.profile is not None and h2 == 0:
        h2 = sobolev_norm(sol.profile, 2, sol.grid)
    r = branch_points(sol.params).real_root
    keep = (np.abs(k - r) > sol.params.exclusion_radius) & (k > sol.params.exclusion_radius)
    real_q = keep & (k > r)
    cont_q = keep & (k < r)
    t_nodes = np.asarray(t_nodes, dtype=float)
    l2, res_r, res_c = [], [], []
    for t in t_nodes:
        e = sol.eta_hat(t)
        l2.append(np.sqrt(2 * np.dot(w, np.abs(e) ** 2)))
        res = trig_identity_residual(k, U, t)
        res_r.append(res[real_q].max() if real_q.any() else 0.0)
        res_c.append(res[cont_q].max() if cont_q.any() else 0.0)
    l2 = np.array(l2)
    ratio = l2 / h2 if h2 > 0 else np.zeros_like(l2)
    return WellposednessReport(t_nodes, l2, h2, ratio, np.array(res_r), np.array(res_c))
