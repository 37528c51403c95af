"""Convex boundary curves, incidence geometry and region labels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import ConfigError

EPS_REGION = 0.05

Region = Literal["illuminated", "shadow_boundary", "deep_shadow"]


@dataclass(frozen=True)
class CurveGeometry:
    """Circle of radius ``a`` or ellipse with semi-axes ``a`` (x) and ``b`` (y).

    Parametrised counter-clockwise by theta in [0, 2 pi).
    """

    kind: Literal["circle", "ellipse"]
    a: float
    b: float | None = None

    def __post_init__(self):
        if self.kind == "circle":
            if not self.a > 0:
                raise ConfigError("circle radius must be positive")
            object.__setattr__(self, "b", float(self.a))
        elif self.kind == "ellipse":
            if self.b is None or not (self.a > 0 and self.b > 0):
                raise ConfigError("ellipse semi-axes must be positive")
        else:
            raise ConfigError(f"unknown geometry kind {self.kind!r}")

    @classmethod
    def circle(cls, radius: float = 1.0) -> "CurveGeometry":
        return cls("circle", float(radius))

    @classmethod
    def ellipse(cls, a: float, b: float) -> "CurveGeometry":
        return cls("ellipse", float(a), float(b))

    @property
    def scale(self) -> float:
        return max(self.a, self.b)

    def speed(self, theta):
        """|dx/dtheta|."""
        theta = np.asarray(theta, dtype=float)
        return np.hypot(self.a * np.sin(theta), self.b * np.cos(theta))

    def speed_derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (self.a**2 - self.b**2) * np.sin(theta) * np.cos(theta) / self.speed(theta)

    def perimeter(self) -> float:
        if self.kind == "circle":
            return 2.0 * math.pi * self.a
        x, w = np.polynomial.legendre.leggauss(64)
        th = math.pi * (x + 1.0)
        return float(math.pi * np.sum(w * self.speed(th)))


@dataclass(frozen=True)
class WaveConfig:
    """Wavenumber and unit incidence direction."""

    k: float
    omega: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigError("wavenumber must be positive")
        norm = math.hypot(*self.omega)
        if abs(norm - 1.0) > 1e-14:
            raise ConfigError("incidence direction must be a unit vector")

    @classmethod
    def from_angle(cls, k: float, angle: float) -> "WaveConfig":
        return cls(float(k), (math.cos(angle), math.sin(angle)))

    @property
    def angle(self) -> float:
        return math.atan2(self.omega[1], self.omega[0])


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    n_dot_omega: float


def boundary_point(geom: CurveGeometry, theta):
    """Point, outward unit normal and curvature at parameter ``theta``.

    Works elementwise on arrays; points and normals have a trailing axis of 2.
    """
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    point = np.stack([geom.a * c, geom.b * s], axis=-1)
    if geom.kind == "circle":
        normal = np.stack([c, s], axis=-1)
        curvature = np.full(theta.shape, 1.0 / geom.a)
    else:
        v = geom.speed(theta)
        normal = np.stack([geom.b * c / v, geom.a * s / v], axis=-1)
        curvature = geom.a * geom.b / v**3
    return point, normal, curvature


def unit_tangent(geom: CurveGeometry, theta):
    theta = np.asarray(theta, dtype=float)
    v = geom.speed(theta)
    return np.stack([-geom.a * np.sin(theta) / v, geom.b * np.cos(theta) / v], axis=-1)


def n_dot_omega(geom: CurveGeometry, wave: WaveConfig, theta):
    _, n, _ = boundary_point(geom, theta)
    return n[..., 0] * wave.omega[0] + n[..., 1] * wave.omega[1]


def x_dot_omega(geom: CurveGeometry, wave: WaveConfig, theta):
    x, _, _ = boundary_point(geom, theta)
    return x[..., 0] * wave.omega[0] + x[..., 1] * wave.omega[1]


def incident_field(geom: CurveGeometry, wave: WaveConfig, theta):
    """e^{i k x.omega} on the boundary."""
    return np.exp(1j * wave.k * x_dot_omega(geom, wave, theta))


def z_function(geom: CurveGeometry, wave: WaveConfig, theta):
    """Z = -n.omega: positive when lit, negative in shadow, simple zero between."""
    return -n_dot_omega(geom, wave, theta)


def classify(geom: CurveGeometry, wave: WaveConfig, theta: float, eps_region: float = EPS_REGION) -> RegionLabel:
    if not 0 < eps_region < 0.5:
        raise ConfigError("eps_region must lie in (0, 0.5)")
    nw = float(n_dot_omega(geom, wave, theta))
    return RegionLabel(region_of(nw, eps_region), nw)


def region_of(nw: float, eps_region: float = EPS_REGION) -> Region:
    if nw < -eps_region:
        return "illuminated"
    if nw > eps_region:
        return "deep_shadow"
    return "shadow_boundary"


def tangential_second_derivative(geom: CurveGeometry, wave: WaveConfig, theta):
    """Second arc-length derivative of the incident field along the boundary.

    With t the unit tangent and d t/ds = -c n,
    d^2/ds^2 e^{ik x.w} = (-k^2 (t.w)^2 - i k c (n.w)) e^{ik x.w}.
    """
    _, n, c = boundary_point(geom, theta)
    t = unit_tangent(geom, theta)
    tw = t[..., 0] * wave.omega[0] + t[..., 1] * wave.omega[1]
    nw = n[..., 0] * wave.omega[0] + n[..., 1] * wave.omega[1]
    k = wave.k
    return (-(k**2) * tw**2 - 1j * k * c * nw) * incident_field(geom, wave, theta)


def arc_length_second_derivative(
    geom: CurveGeometry, func: Callable[[np.ndarray], np.ndarray], theta, h: float | None = None
):
    """d^2 f/ds^2 of a function of theta, by fourth-order central differences.

    ``h`` is the arc-length step (default 2 pi * scale / 4096); derivatives in
    theta are converted with s' = |x'(theta)|.
    """
    theta = np.asarray(theta, dtype=float)
    if h is None:
        h = 2.0 * math.pi * geom.scale / 4096
    v = geom.speed(theta)
    dth = h / v
    f = [func(theta + m * dth) for m in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * dth)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * dth**2)
    return (d2 - d1 * geom.speed_derivative(theta) / v) / v**2
