"""Profiles, Fourier transforms on the full and half line, grids and norms.

Transforms use the unitary convention

    eta_hat(k) = (2 pi)^(-1/2) int exp(-i k x) eta(x) dx

over the support of the profile (the whole line, or ``x > 0`` for half-line
profiles).  Half-line transforms are analytic in ``Im k < 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite, hermite_e
from numpy.polynomial import polynomial as P
from scipy.special import binom, wofz

from ._kernels import real_synthesis
from .errors import ConfigError, HingeViolation, NonconvergentQuadrature
from .io import read_table

SQRT2PI = math.sqrt(2 * math.pi)
HINGE_TOL = 1e-10
FD_STEP = 1e-5

# 16-point Gauss-Legendre on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1)
_GL_W = 0.5 * _GL_W


def composite_gauss(edges, order=16):
    """Nodes and weights of panel-wise Gauss-Legendre on consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    if order == 16:
        gx, gw = _GL_X, _GL_W
    else:
        gx, gw = np.polynomial.legendre.leggauss(order)
        gx, gw = 0.5 * (gx + 1), 0.5 * gw
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * gx[None, :]).ravel()
    weights = (h[:, None] * gw[None, :]).ravel()
    return nodes, weights


# --- profiles -----------------------------------------------------------------

@dataclass
class Profile:
    """Initial plate shape.

    Attributes
    ----------
    name : str
    support : {"full", "half"}
    hinge_class : int
        Derivatives ``0..hinge_class`` vanish at ``x = 0`` (half line only);
        ``-1`` when nothing is claimed.
    extent : float
        Half-width (full line) or length (half line) outside which the profile
        is negligible; used by numerical quadrature.
    """

    name: str = "profile"
    support: str = "full"
    hinge_class: int = -1
    extent: float = 40.0

    def __post_init__(self):
        if self.support not in ("full", "half"):
            raise ConfigError(f"support must be 'full' or 'half', got {self.support!r}")

    def _eval(self, x, deriv):
        raise NotImplementedError

    def __call__(self, x, deriv=0):
        x = np.asarray(x, dtype=float)
        if not 0 <= deriv <= 4:
            raise ConfigError("derivatives are available up to order 4")
        out = np.asarray(self._eval(x, deriv), dtype=float)
        if self.support == "half":
            out = np.where(x < 0, 0.0, out)
        return out

    def transform(self, k):
        """Closed-form transform, or ``None`` when only quadrature is available."""
        return None

    @property
    def interval(self):
        return (0.0, self.extent) if self.support == "half" else (-self.extent, self.extent)

    def __mul__(self, c):
        return CombinedProfile([(float(c), self)])

    __rmul__ = __mul__

    def __add__(self, other):
        return CombinedProfile([(1.0, self), (1.0, other)])


@dataclass
class GaussianProfile(Profile):
    """``amplitude * exp(-x**2/2)`` on the whole line."""

    name: str = "gaussian"
    amplitude: float = 1.0

    def _eval(self, x, deriv):
        c = np.zeros(deriv + 1)
        c[deriv] = 1.0
        return self.amplitude * (-1) ** deriv * hermite_e.hermeval(x, c) * np.exp(-x * x / 2)

    def transform(self, k):
        k = np.asarray(k, dtype=complex)
        return self.amplitude * np.exp(-k * k / 2)


def _hinge_moments_small(n, k):
    # upward recurrence J_{m+1} = [m==0]/2 + (m/2) J_{m-1} - (ik/2) J_m
    J = [0.5 * math.sqrt(math.pi) * wofz(-k / 2)]
    prev = np.zeros_like(J[0])
    for m in range(n):
        nxt = (0.5 if m == 0 else 0.0) + 0.5 * m * prev - 0.5j * k * J[-1]
        prev = J[-1]
        J.append(nxt)
    return J[n]


def _hinge_moments_asym(n, k):
    # J_n(k) ~ sum_j (-1)^j (n+2j)! / (j! (ik)^(n+2j+1)), optimally truncated
    ik = 1j * k
    term = math.factorial(n) / ik ** (n + 1)
    acc = term.copy()
    best = np.abs(term)
    live = np.ones(k.shape, dtype=bool)
    for j in range(1, 200):
        term = term * (-(n + 2 * j) * (n + 2 * j - 1)) / (j * ik * ik)
        mag = np.abs(term)
        live &= mag < best
        acc = np.where(live, acc + term, acc)
        best = np.where(live, mag, best)
        if not live.any() or (best < 1e-18 * np.abs(acc)).all():
            break
    return acc


def hinge_moment(n, k):
    """``J_n(k) = int_0^inf x^n exp(-x^2 - i k x) dx`` for any complex ``k``."""
    k = np.asarray(k, dtype=complex)
    out = np.empty_like(k)
    big = np.abs(k) >= 12.0
    direct = big & ((k.imag <= 0) | ((k * k).real >= 150.0))
    reflect = big & ~direct
    small = ~big
    if small.any():
        out[small] = _hinge_moments_small(n, k[small])
    if direct.any():
        out[direct] = _hinge_moments_asym(n, k[direct])
    if reflect.any():
        kr = k[reflect]
        c = np.zeros(n + 1)
        c[n] = 1.0
        full = math.sqrt(math.pi) * (-0.5j) ** n * hermite.hermval(kr / 2, c) * np.exp(-kr * kr / 4)
        out[reflect] = full - (-1) ** n * _hinge_moments_asym(n, -kr)
    return out


@dataclass
class HingeProfile(Profile):
    """``amplitude * x**n * exp(-x**2)`` on the half line.

    Derivatives ``0..n-1`` vanish at the hinge, so ``hinge_class = n - 1``.
    """

    name: str = "hinge4"
    support: str = "half"
    power: int = 4
    amplitude: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.power < 0:
            raise ConfigError("hinge power must be non-negative")
        self.hinge_class = self.power - 1
        polys = [np.zeros(self.power + 1)]
        polys[0][self.power] = 1.0
        for _ in range(4):
            p = polys[-1]
            polys.append(P.polysub(P.polyder(p), P.polymulx(2 * p)))
        self._polys = polys

    def _eval(self, x, deriv):
        return self.amplitude * P.polyval(x, self._polys[deriv]) * np.exp(-x * x)

    def transform(self, k):
        return self.amplitude * hinge_moment(self.power, k) / SQRT2PI


@dataclass
class ZeroProfile(Profile):
    name: str = "zero"
    hinge_class: int = 4

    def _eval(self, x, deriv):
        return np.zeros_like(x)

    def transform(self, k):
        return np.zeros(np.shape(k), dtype=complex)


def _fd_derivative(f, x, deriv):
    # 5-point stencils; the step grows with the order to balance round-off
    if deriv == 0:
        return f(x)
    h = max(FD_STEP, np.finfo(float).eps ** (1.0 / (deriv + 2)))
    fm2, fm1, fp1, fp2 = f(x - 2 * h), f(x - h), f(x + h), f(x + 2 * h)
    if deriv == 1:
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    f0 = f(x)
    if deriv == 2:
        return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    if deriv == 3:
        return (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)
    return (fp2 - 4 * fp1 + 6 * f0 - 4 * fm1 + fm2) / h**4


@dataclass
class CallableProfile(Profile):
    """Wraps ``func(x)``; derivatives by finite differences unless supplied.

    Parameters
    ----------
    func : callable
    derivatives : sequence of callables, optional
        ``derivatives[j]`` evaluates the ``(j+1)``-th derivative.
    """

    name: str = "callable"
    func: object = None
    derivatives: tuple = ()

    def _eval(self, x, deriv):
        if deriv == 0:
            return self.func(x)
        if deriv <= len(self.derivatives):
            return self.derivatives[deriv - 1](x)
        return _fd_derivative(self.func, x, deriv)


@dataclass
class SampledProfile(Profile):
    """Quintic interpolating spline through samples ``(x, eta0)``.

    Outside the sampled range the profile is zero.  ``hinge_class`` is
    inferred from the spline derivatives at 0 when not given.
    """

    name: str = "sampled"
    x: np.ndarray = None
    values: np.ndarray = None

    def __post_init__(self):
        from scipy.interpolate import make_interp_spline

        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or len(x) < 6:
            raise ConfigError("sampled profile needs at least 6 matching (x, eta0) samples")
        if np.any(np.diff(x) <= 0):
            raise ConfigError("sample abscissae must be strictly increasing")
        self.x, self.values = x, y
        self._spline = make_interp_spline(x, y, k=5)
        if self.support == "full" and x[0] >= 0:
            self.support = "half"
        super().__post_init__()
        self.extent = float(max(abs(x[0]), abs(x[-1])))
        if self.support == "half" and self.hinge_class < 0:
            s = -1
            while s < 4 and abs(float(self._spline(0.0, s + 1))) <= HINGE_TOL:
                s += 1
            self.hinge_class = s

    def _eval(self, x, deriv):
        inside = (x >= self.x[0]) & (x <= self.x[-1])
        return np.where(inside, self._spline(np.clip(x, self.x[0], self.x[-1]), deriv), 0.0)

    @classmethod
    def from_csv(cls, path, **kwargs):
        try:
            cols = read_table(path)
        except OSError as exc:
            raise ConfigError(f"cannot read profile CSV {path}: {exc}") from exc
        if not {"x", "eta0"} <= set(cols):
            raise ConfigError("profile CSV needs columns x, eta0")
        return cls(x=cols["x"], values=cols["eta0"], **kwargs)


@dataclass
class CombinedProfile(Profile):
    """Finite linear combination of profiles sharing one support."""

    name: str = "combination"
    terms: list = field(default_factory=list)

    def __init__(self, terms):
        supports = {p.support for _, p in terms}
        if len(supports) != 1:
            raise ConfigError("cannot combine full-line and half-line profiles")
        support = supports.pop()
        hinge = min(p.hinge_class for _, p in terms)
        extent = max(p.extent for _, p in terms)
        super().__init__("combination", support, hinge, extent)
        self.terms = list(terms)

    def _eval(self, x, deriv):
        return sum(c * p(x, deriv) for c, p in self.terms)

    def transform(self, k):
        parts = [p.transform(k) for _, p in self.terms]
        if any(v is None for v in parts):
            return None
        return sum(c * v for (c, _), v in zip(self.terms, parts))


def get_profile(name, support=None, amplitude=1.0):
    """Build a bundled profile by name.

    ``gaussian``, ``zero``, ``hinge<n>`` (``x**n exp(-x**2)``) or
    ``csv:<path>`` for samples with columns ``x, eta0``.
    """
    name = name.strip()
    low = name.lower()
    if low == "gaussian":
        if support == "half":
            raise ConfigError("the gaussian profile lives on the full line")
        return GaussianProfile(amplitude=amplitude)
    if low == "zero":
        return ZeroProfile(support=support or "full")
    if low.startswith("hinge") and low[5:].isdigit():
        if support == "full":
            raise ConfigError("hinge profiles live on the half line")
        return HingeProfile(name=low, power=int(low[5:]), amplitude=amplitude)
    if low.startswith("csv:"):
        kw = {"support": support} if support else {}
        prof = SampledProfile.from_csv(name[4:], **kw)
        return prof if amplitude == 1.0 else amplitude * prof
    raise ConfigError(f"unknown profile {name!r}")


# --- grids and slices ---------------------------------------------------------

@dataclass
class SpectralGrid:
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str = "graded+uniform"

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape != self.weights.shape:
            raise ConfigError("nodes and weights differ in length")
        if np.any(np.diff(self.nodes) <= 0) or np.any(self.weights <= 0):
            raise ConfigError("grid nodes must increase and weights be positive")

    def __len__(self):
        return len(self.nodes)


def make_grid(k_max=10.0, k_min=1e-6, panel_width=0.25, order=16, refine=1):
    """Gauss-Legendre panels covering ``[0, k_max]``.

    Panel edges are ``0, k_min, 2 k_min, 4 k_min, ...`` up to ``panel_width``
    (grading toward the ``1/k`` factors at the origin) and uniform beyond.
    ``refine`` splits every panel into that many pieces.  No node sits at
    ``k = 0``.
    """
    if not 0 < k_min < min(panel_width, k_max):
        raise ConfigError("need 0 < k_min < min(panel_width, k_max)")
    graded = [0.0]
    e = k_min
    while e < panel_width:
        graded.append(e)
        e *= 2
    top = min(panel_width, k_max)
    graded.append(top)
    n_uniform = int(math.ceil((k_max - top) / panel_width - 1e-12))
    uniform = np.linspace(top, k_max, n_uniform + 1)[1:] if n_uniform > 0 else []
    edges = np.concatenate([graded, uniform])
    if refine > 1:
        fine = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
        edges = np.append(np.concatenate(fine), edges[-1])
    nodes, weights = composite_gauss(edges, order)
    return SpectralGrid(nodes, weights, f"graded({k_min:g})+uniform({panel_width:g})x{refine}")


@dataclass
class FieldSlice:
    x_nodes: np.ndarray
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.x_nodes = np.asarray(self.x_nodes, dtype=float)
        self.values = np.asarray(self.values)
        if self.x_nodes.shape != self.values.shape:
            raise ConfigError("x_nodes and values differ in length")


# --- transforms ---------------------------------------------------------------

def _numeric_transform(profile, k, rtol=1e-13, max_doublings=9):
    a, b = profile.interval
    if profile.support == "full" and np.any(k.imag != 0):
        raise ConfigError("full-line transforms need real k")
    if profile.support == "half" and np.any(k.imag > 0):
        raise ConfigError("numerical half-line transforms need Im k <= 0")
    # tail: value at the truncation edge, scaled by the exponential weight
    edge = float(np.max(np.abs(profile(np.array([a, b])))))
    grow = np.exp(np.max(np.abs(k.imag)) * max(abs(a), abs(b))) if k.size else 1.0
    if edge * grow > 1e-12:
        raise NonconvergentQuadrature(
            f"profile not negligible at the truncation edge ({edge:.2e})")
    L = b - a
    n_panels = max(8, int(np.ceil(L * (np.max(np.abs(k.real), initial=0.0) + 1) / 4)))
    prev = None
    for _ in range(max_doublings):
        xs, ws = composite_gauss(np.linspace(a, b, n_panels + 1))
        vals = ws * profile(xs)
        cur = np.exp(-1j * np.outer(k, xs)) @ vals / SQRT2PI
        if prev is not None:
            err = np.abs(cur - prev)
            if np.all(err <= rtol * np.maximum(1.0, np.abs(cur)) + 1e-15):
                return cur
        prev = cur
        n_panels *= 2
    raise NonconvergentQuadrature("transform quadrature did not converge")


def fourier_forward(profile, k, numeric=False):
    """Transform of ``profile`` at (possibly complex) ``k``.

    Closed forms are used when the profile provides one; otherwise, or with
    ``numeric=True``, composite Gauss-Legendre over the support with panel
    doubling until successive values agree.

    Raises
    ------
    NonconvergentQuadrature
        If the profile does not decay within its extent or doubling stalls.
    """
    k = np.asarray(k, dtype=complex)
    flat = k.ravel()
    out = None if numeric else profile.transform(flat)
    if out is None:
        out = _numeric_transform(profile, flat)
    out = np.asarray(out, dtype=complex).reshape(k.shape)
    return out[()] if out.ndim == 0 else out


def fourier_inverse_real(eta_hat, grid, x_nodes, time=0.0):
    """Real field from transform values on the positive grid.

    ``eta(x) = (2 pi)^(-1/2) int_0^inf (e^{ikx} eta_hat + c.c.) dk``.
    ``eta_hat`` may be an array on ``grid.nodes`` or a callable of ``k``.
    """
    vals = eta_hat(grid.nodes) if callable(eta_hat) else np.asarray(eta_hat)
    coef = 2.0 * grid.weights * vals / SQRT2PI
    x_nodes = np.asarray(x_nodes, dtype=float)
    return FieldSlice(x_nodes, real_synthesis(coef, grid.nodes, x_nodes), float(time))


# --- norms --------------------------------------------------------------------

def _norm_grid(profile, k_max=None):
    if k_max is None:
        k_max = 12.0 if profile.support == "full" else 400.0
    return make_grid(k_max=k_max, panel_width=0.25 if profile.support == "full" else 1.0)


def sobolev_norm(profile, s, grid=None):
    """``|| (1 + k^2)^(s/2) eta_hat ||_{L^2(R)}`` computed in k-space.

    Half-line profiles are extended by zero.  Real profiles have
    ``|eta_hat(-k)| = |eta_hat(k)|`` so the integral folds onto ``k > 0``.
    """
    grid = grid or _norm_grid(profile)
    k = grid.nodes
    vals = np.abs(fourier_forward(profile, k)) ** 2 * (1 + k * k) ** s
    return float(np.sqrt(2 * np.dot(grid.weights, vals)))


def sobolev_norm_x(profile, s, panels=None):
    """Same norm from derivatives in x: ``sum_j C(s, j) ||eta^(j)||^2``."""
    a, b = profile.interval
    panels = panels or int(np.ceil((b - a) / 0.25))
    xs, ws = composite_gauss(np.linspace(a, b, panels + 1))
    total = sum(binom(s, j) * np.dot(ws, profile(xs, j) ** 2) for j in range(s + 1))
    return float(np.sqrt(total))


def hinge_values(profile, order):
    """Derivatives ``0..order`` of the profile at ``x = 0`` (from the right)."""
    x0 = np.array([0.0])
    return np.array([float(profile._eval(x0, j)[0]) for j in range(order + 1)])


def extension_check(profile, s=None, tol=HINGE_TOL):
    """Ratio of the zero-extension ``H^s(R)`` norm to the ``H^s(R+)`` norm.

    Raises
    ------
    HingeViolation
        If any derivative of order ``0..s`` exceeds ``tol`` at the hinge.
    """
    if profile.support != "half":
        raise ConfigError("extension check applies to half-line profiles")
    s = profile.hinge_class if s is None else s
    if s < 0:
        raise HingeViolation("profile claims no vanishing derivatives at the hinge")
    vals = hinge_values(profile, s)
    bad = np.nonzero(np.abs(vals) > tol)[0]
    if bad.size:
        j = int(bad[0])
        raise HingeViolation(f"derivative {j} at the hinge is {vals[j]:.3e}")
    inner = sobolev_norm_x(profile, s)
    if inner == 0:
        return 1.0
    return sobolev_norm(profile, s) / inner
