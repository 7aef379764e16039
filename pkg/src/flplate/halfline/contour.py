"""Piecewise contours in the complex k-plane and their quadrature rules.

Two families are built here.

``gamma_path``
    The half-line contour itself, the vertical line ``Re k = 1/4`` below the
    real axis joined to ``[1/4, inf)``, truncated at radius ``R`` and closed off
    with straight tails that turn into the sectors where the time exponential
    decays.
``deformed_path``
    The same contour inside the disc ``|k| <= delta`` with the far parts
    rotated onto the rays ``arg k = -3 pi/4`` (incoming) and ``arg k = pi/4``
    (outgoing), joined by arcs of ``|k| = delta``.

Both dip below the real branch point ``r`` with a small semicircle when
``r > 1/4`` so the integrands stay analytic on the path.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..dispersion import PlateParams, branch_points
from ..errors import ConfigError
from ..spectral import composite_gauss

ANCHOR = 0.25


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def points(self, density):
        length = abs(self.end - self.start)
        n = max(1, int(math.ceil(length * density)))
        u, w = composite_gauss(np.linspace(0.0, 1.0, n + 1))
        dk = self.end - self.start
        return self.start + u * dk, w * dk

    def to_dict(self):
        return {"type": "line", "start": [self.start.real, self.start.imag],
                "end": [self.end.real, self.end.imag]}


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    @property
    def start(self):
        return self.center + self.radius * np.exp(1j * self.theta0)

    @property
    def end(self):
        return self.center + self.radius * np.exp(1j * self.theta1)

    def points(self, density):
        length = abs(self.theta1 - self.theta0) * self.radius
        n = max(2, int(math.ceil(length * density)))
        u, w = composite_gauss(np.linspace(self.theta0, self.theta1, n + 1))
        z = np.exp(1j * u)
        return self.center + self.radius * z, w * 1j * self.radius * z

    def to_dict(self):
        return {"type": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "theta0": self.theta0, "theta1": self.theta1}


@dataclass(frozen=True)
class Ray:
    """Half-line ``anchor + s e^{i angle}``, ``s >= 0``.

    ``inward`` rays are traversed from infinity toward the anchor.
    """

    anchor: complex
    angle: float
    inward: bool = False

    @property
    def start(self):
        return complex("inf") if self.inward else self.anchor

    @property
    def end(self):
        return self.anchor if self.inward else complex("inf")

    def points(self, density, scale=1.0, panels=48):
        # s = L u / (1 - u) on geometrically graded panels in u
        L = float(scale)
        edges = np.concatenate([[0.0], 1 - 0.5 ** np.arange(1, panels + 1)])
        u, w = composite_gauss(edges)
        s = L * u / (1 - u)
        ds = L * w / (1 - u) ** 2
        e = np.exp(1j * self.angle)
        k = self.anchor + s * e
        dk = ds * e
        if self.inward:
            return k[::-1], -dk[::-1]
        return k, dk

    def to_dict(self):
        return {"type": "ray", "anchor": [self.anchor.real, self.anchor.imag],
                "angle": self.angle, "inward": self.inward}


@dataclass
class ContourPath:
    segments: list
    label: str = "gamma"
    orientation: str = "forward"
    meta: dict = field(default_factory=dict)

    def check_connected(self, tol=1e-12):
        for a, b in zip(self.segments[:-1], self.segments[1:]):
            if abs(a.end - b.start) > tol:
                raise ConfigError(f"contour segments do not join: {a.end} vs {b.start}")

    def quadrature(self, density=64.0, ray_scale=None, ray_panels=48):
        """Nodes ``k`` and complex weights ``dk`` along the whole path.

        ``density`` is nodes per unit length on finite pieces (rounded up to
        whole 16-point panels); ``ray_scale`` sets the length scale of the
        mapped rule on the infinite rays.
        """
        ks, ws = [], []
        for seg in self.segments:
            if isinstance(seg, Ray):
                scale = ray_scale if ray_scale is not None else max(1.0, abs(seg.anchor))
                k, w = seg.points(density, scale, ray_panels)
            else:
                k, w = seg.points(density / 16.0)
            ks.append(k)
            ws.append(w)
        k = np.concatenate(ks)
        w = np.concatenate(ws)
        if self.orientation == "reverse":
            w = -w
        return k, w

    def min_distance(self, points, density=64.0):
        k, _ = self.quadrature(density)
        pts = np.asarray(points, dtype=complex)
        return float(np.min(np.abs(k[:, None] - pts[None, :])))

    def to_json(self):
        return json.dumps({"label": self.label, "orientation": self.orientation,
                           "meta": self.meta,
                           "segments": [s.to_dict() for s in self.segments]},
                          indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        segs = []
        for d in data["segments"]:
            if d["type"] == "line":
                segs.append(Line(complex(*d["start"]), complex(*d["end"])))
            elif d["type"] == "arc":
                segs.append(Arc(complex(*d["center"]), d["radius"], d["theta0"], d["theta1"]))
            elif d["type"] == "ray":
                segs.append(Ray(complex(*d["anchor"]), d["angle"], d["inward"]))
            else:
                raise ConfigError(f"unknown segment type {d['type']!r}")
        return cls(segs, data.get("label", "gamma"), data.get("orientation", "forward"),
                   data.get("meta", {}))


def _indent_radius(params, r, limit):
    if r <= ANCHOR:
        return 0.0
    rho = min(0.25, 0.5 * (r - ANCHOR), 0.5 * (limit - r))
    if rho <= params.exclusion_radius:
        raise ConfigError("real branch point too close to the contour corner")
    return rho


def _real_part(params, r, stop):
    """``[1/4, stop]`` along the real axis, dipping below ``r``."""
    rho = _indent_radius(params, r, stop)
    if rho == 0.0:
        return [Line(complex(ANCHOR), complex(stop))]
    return [Line(complex(ANCHOR), complex(r - rho)),
            Arc(complex(r), rho, math.pi, 2 * math.pi),
            Line(complex(r + rho), complex(stop))]


def default_delta(params):
    return 1.0 + branch_points(params).max_modulus


def gamma_path(params=None, R=13.0):
    """Truncated contour with decaying tails, suitable for slowly decaying data."""
    params = params or PlateParams()
    r = branch_points(params).real_root
    if R <= max(2.0, r + 0.5):
        raise ConfigError("truncation radius too small")
    bottom = complex(ANCHOR, -math.sqrt(R * R - ANCHOR**2))
    segs = [Ray(bottom, -3 * math.pi / 4, inward=True), Line(bottom, complex(ANCHOR))]
    segs += _real_part(params, r, R)
    segs.append(Ray(complex(R), math.pi / 4))
    path = ContourPath(segs, "gamma", meta={"R": R, "U": params.U})
    path.check_connected()
    return path


def deformed_path(params=None, delta=None):
    """Contour rotated onto the rays ``arg k = -3 pi/4, pi/4`` outside ``|k| = delta``."""
    params = params or PlateParams()
    bs = branch_points(params)
    delta = default_delta(params) if delta is None else float(delta)
    if delta <= max(bs.max_modulus, ANCHOR) + params.exclusion_radius:
        raise ConfigError("delta must exceed every branch-point modulus")
    p1 = complex(ANCHOR, -math.sqrt(delta**2 - ANCHOR**2))
    a_in = -3 * math.pi / 4
    segs = [Ray(delta * np.exp(1j * a_in), a_in, inward=True),
            Arc(0j, delta, a_in, math.atan2(p1.imag, p1.real)),
            Line(p1, complex(ANCHOR))]
    segs += _real_part(params, bs.real_root, delta)
    segs += [Arc(0j, delta, 0.0, math.pi / 4),
             Ray(delta * np.exp(1j * math.pi / 4), math.pi / 4)]
    path = ContourPath(segs, "deformed-ray", meta={"delta": delta, "U": params.U})
    # the arc ends are computed in floating point; snap-check loosely
    path.check_connected(tol=1e-9)
    return path
