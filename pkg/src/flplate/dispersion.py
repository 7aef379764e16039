"""Dispersion relation of the linearised fluid-loaded plate.

A plane wave ``exp(i(kx - w t))`` solves the linear problem when

    D(k, w) = -(1 + 1/k) w**2 + 2 U w + (k**4 - U**2 k) = 0,

with roots

    w_pm = (U +- Q) / (1 + 1/k),      Q = k**2 sqrt(1 + 1/k - U**2/k**3).

The square root is the principal one.  Its cuts are the curves traced by the
roots of ``(1 + lam) k**3 + k**2 - U**2`` for ``lam >= 0``; they join ``k = 0``
to the three roots of ``k**3 + k**2 - U**2`` and stay inside the disc through
the complex pair, so the branch is analytic in the quarter plane
``Re k > 0, Im k < 0`` and matches the large-``k`` expansions there.  On the
real segment ``(0, r)`` (``r`` the real cubic root) values are the limits from
below.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchPointProximity, ConfigError, DegenerateRoots


@dataclass(frozen=True)
class PlateParams:
    """Flow speed plus the numerical tolerances shared by the solvers."""

    U: float = 1.0
    tol_root: float = 1e-12
    k_min: float = 1e-6
    k_max: float = 10.0
    exclusion_radius: float = 1e-3

    def __post_init__(self):
        if not np.isfinite(self.U) or self.U <= 0:
            raise ConfigError(f"flow speed U must be > 0, got {self.U!r}")
        if not 0 < self.k_min < self.k_max:
            raise ConfigError(f"need 0 < k_min < k_max, got {self.k_min}, {self.k_max}")
        if self.tol_root <= 0 or self.exclusion_radius < 0:
            raise ConfigError("tolerances must be positive")


@dataclass
class DispersionData:
    k: complex
    omega_plus: complex
    omega_minus: complex
    c_plus: complex
    c_minus: complex
    alpha: complex


@dataclass
class BranchStructure:
    branch_points: list
    cuts: list = field(default_factory=list)

    @property
    def real_root(self) -> float:
        return float(self.branch_points[1].real)

    @property
    def max_modulus(self) -> float:
        return float(max(abs(b) for b in self.branch_points))


def _speed(params) -> float:
    # a bare float is accepted so the roots can be probed at U = 0
    if isinstance(params, PlateParams):
        return params.U
    return float(params)


def _as_complex(k):
    return np.asarray(k, dtype=complex)


def dispersion_residual(k, omega, params):
    k = _as_complex(k)
    if np.any(k == 0):
        raise ConfigError("dispersion relation is singular at k = 0")
    U = _speed(params)
    omega = np.asarray(omega, dtype=complex)
    out = -(1 + 1 / k) * omega**2 + 2 * U * omega + (k**4 - U**2 * k)
    return out[()] if out.ndim == 0 else out


def _sqrt_S(k, U, side="lower"):
    S = 1 + 1 / k - U**2 / k**3
    S = np.array(S, dtype=complex, copy=True)
    on_cut = (k.imag == 0) & (k.real > 0) & (S.real < 0)
    if np.any(on_cut):
        S.imag[on_cut] = -0.0 if side == "lower" else 0.0
    return np.sqrt(S)


def discriminant_root(k, params, side="lower"):
    """The branch ``Q(k)`` with ``Q**2 = k (k**3 + k**2 - U**2)``, ``Q ~ k**2``."""
    k = _as_complex(k)
    return k**2 * _sqrt_S(k, _speed(params), side)


def _check_exclusion(k, params):
    if not isinstance(params, PlateParams) or params.exclusion_radius == 0:
        return
    pts = branch_points(params).branch_points
    d = np.min(np.abs(k[..., None] - np.asarray(pts)), axis=-1)
    if np.any(d < params.exclusion_radius):
        bad = k[d < params.exclusion_radius].ravel()[0]
        raise BranchPointProximity(
            f"k = {bad} lies within {params.exclusion_radius} of a branch point")


def omega_pm(k, params, branch="lower", check=True):
    """Return ``(omega_plus, omega_minus)`` at ``k``.

    Parameters
    ----------
    k : complex or array
    params : PlateParams or float
        A bare float is read as ``U`` and skips the branch-point check.
    branch : {"lower", "upper"}
        Side of the real cut ``(0, r)`` to use for real ``k`` on it.
    check : bool
        Raise :class:`BranchPointProximity` inside the exclusion radius.
    """
    k = _as_complex(k)
    if np.any(k == 0):
        raise ConfigError("omega is singular at k = 0")
    if check:
        _check_exclusion(k, params)
    U = _speed(params)
    Q = discriminant_root(k, U, branch)
    scale = k / (k + 1)
    wp, wm = (U + Q) * scale, (U - Q) * scale
    if wp.ndim == 0:
        return wp[()], wm[()]
    return wp, wm


def domega_dk(k, params, branch="lower"):
    """Derivatives ``(d omega_plus/dk, d omega_minus/dk)`` (no proximity check)."""
    k = _as_complex(k)
    U = _speed(params)
    Q = discriminant_root(k, U, branch)
    dQ = (4 * k**3 + 3 * k**2 - U**2) / (2 * Q)
    s, ds = k / (k + 1), 1 / (k + 1) ** 2
    dp = dQ * s + (U + Q) * ds
    dm = -dQ * s + (U - Q) * ds
    if dp.ndim == 0:
        return dp[()], dm[()]
    return dp, dm


def coefficients(k, eta0_hat, params, branch="lower"):
    """Spectral data ``c_pm`` and ``alpha`` for initial transform ``eta0_hat``.

    Raises
    ------
    DegenerateRoots
        When ``|omega_-**2 - omega_+**2|`` falls below the root tolerance,
        i.e. at a branch point or as ``U -> 0``.
    """
    k = _as_complex(k)
    wp, wm = omega_pm(k, params, branch)
    wp, wm = np.asarray(wp), np.asarray(wm)
    den = wm**2 - wp**2
    tol = params.tol_root if isinstance(params, PlateParams) else 1e-12
    if np.any(np.abs(den) <= tol * (1 + np.abs(k) ** 4)):
        raise DegenerateRoots("omega_- ** 2 - omega_+ ** 2 vanishes")
    eta0_hat = np.asarray(eta0_hat, dtype=complex)
    kk = k**4
    cp = (wm**2 - kk) / den * eta0_hat
    cm = -(wp**2 - kk) / den * eta0_hat
    alpha = 1 / (1j * (wm - wp))
    if k.ndim == 0 and eta0_hat.ndim == 0:
        return DispersionData(complex(k), complex(wp), complex(wm), complex(cp),
                              complex(cm), complex(alpha))
    return DispersionData(k, wp, wm, cp, cm, alpha)


def c_minus_over_alpha(k, eta0_hat, params, branch="lower"):
    """``c_-(k) / alpha(k)`` in the cancellation-free form.

    ``c_-/alpha = -i (omega_+**2 - k**4) / (omega_+ + omega_-) * eta0_hat`` and
    ``omega_+ + omega_- = 2 U k / (k + 1)``, so the ratio stays finite at the
    branch points where ``c_-`` and ``alpha`` individually blow up.  For large
    ``|k|`` the difference ``omega_+ - k**2`` is formed from
    ``Q - k(k+1) = -(k**3 + k**2 + U**2 k) / (Q + k(k+1))``.
    """
    k = _as_complex(k)
    U = _speed(params)
    Q = discriminant_root(k, U, branch)
    wp = (U + Q) * k / (k + 1)
    big = np.abs(k) > 4.0
    q_gap = np.where(big, -(k**3 + k**2 + U**2 * k) / np.where(big, Q + k * (k + 1), 1.0),
                     Q - k * (k + 1))
    wp_gap = np.where(big, k * (U + q_gap) / (k + 1), wp - k**2)
    return -1j * wp_gap * (wp + k**2) * (k + 1) / (2 * U * k) * eta0_hat


def _cubic_roots(a3, U):
    """Roots of ``a3 k**3 + k**2 - U**2`` ordered (real, upper, lower)."""
    r = np.roots([a3, 1.0, 0.0, -U**2]).astype(complex)
    for _ in range(3):
        p = a3 * r**3 + r**2 - U**2
        r = r - p / (3 * a3 * r**2 + 2 * r)
    real = r[np.argmin(np.abs(r.imag))].real
    cplx = r[np.argmax(np.abs(r.imag))]
    up = complex(cplx.real, abs(cplx.imag))
    return real, up, up.conjugate()


def branch_points(params, n_cut=64) -> BranchStructure:
    """``k = 0`` and the roots of ``k**3 + k**2 - U**2``.

    Cuts are returned as arrays of points on the curves
    ``(1 + lam) k**3 + k**2 = U**2``, ``lam in [0, inf)``, each running from a
    cubic root (``lam = 0``) into ``k = 0``.
    """
    U = _speed(params)
    if U <= 0:
        raise ConfigError("branch structure requires U > 0")
    r, p, pc = _cubic_roots(1.0, U)
    lam = np.tan(np.linspace(0.0, np.pi / 2, n_cut, endpoint=False)) ** 2
    curves = np.array([_cubic_roots(1 + l, U) for l in lam])
    cuts = [np.append(curves[:, j].astype(complex), 0j) for j in range(3)]
    return BranchStructure([0j, complex(r), p, pc], cuts)


def asymptotic_omega(k, params, sign=+1):
    """Large-``k`` expansion ``+-k**2 -+ k/2 + (U +- 3/8)``."""
    U = _speed(params)
    k = _as_complex(k)
    s = 1 if sign > 0 else -1
    out = s * k**2 - s * k / 2 + (U + s * 0.375)
    return out[()] if out.ndim == 0 else out
