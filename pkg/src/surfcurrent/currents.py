"""Closed-form approximate surface currents.

Every function returns d_n w^t = d_n w^s + d_n w^i on the boundary, with the
scattered normal derivative taken from the corresponding local condition and
d_n w^i = i k (n.omega) e^{i k x.omega}.
"""
from __future__ import annotations

from typing import Literal

import numpy as np

from .geometry import (
    CurveGeometry,
    WaveConfig,
    boundary_point,
    incident_field,
    tangential_second_derivative,
)

CURRENT_KINDS = (
    "kirchhoff",
    "bt1",
    "bt2_2d",
    "bt2_3d_form",
    "exact",
    "ansatz_mt",
    "ansatz_bt1",
    "ansatz_bt2",
)


def _nw(geom, wave, theta):
    _, n, c = boundary_point(geom, theta)
    nw = n[..., 0] * wave.omega[0] + n[..., 1] * wave.omega[1]
    return nw, c


def kirchhoff_current(
    geom: CurveGeometry, wave: WaveConfig, theta, shadow_mode: Literal["zero", "extended"] = "zero"
):
    """Physical optics 2 i k (n.omega) e^{i k x.omega}; zero where n.omega >= 0 unless extended."""
    if shadow_mode not in ("zero", "extended"):
        raise ValueError("shadow_mode must be 'zero' or 'extended'")
    nw, _ = _nw(geom, wave, theta)
    val = 2j * wave.k * nw * incident_field(geom, wave, theta)
    if shadow_mode == "zero":
        val = np.where(nw < 0, val, 0.0)
    return val


def bt1_current(geom: CurveGeometry, wave: WaveConfig, theta):
    nw, c = _nw(geom, wave, theta)
    k = wave.k
    return (-1j * k * (1.0 - nw) + c / 2.0) * incident_field(geom, wave, theta)


def _check_denominator(c, k):
    # |c - ik| >= c > 0 for k > 0; the condition below can only fail on bad input
    assert np.all(np.abs(c - 1j * k) >= c) and np.all(c > 0)


def bt2_current_2d(geom: CurveGeometry, wave: WaveConfig, theta):
    """Second-order condition, direct form with 1/(c - ik)."""
    _, c = _nw(geom, wave, theta)
    k = wave.k
    _check_denominator(c, k)
    wi = incident_field(geom, wave, theta)
    d2 = tangential_second_derivative(geom, wave, theta)
    corr = -(c**2) / (8.0 * (c - 1j * k)) * wi - d2 / (2.0 * (c - 1j * k))
    return bt1_current(geom, wave, theta) + corr


def bt2_current_2d_rationalized(geom: CurveGeometry, wave: WaveConfig, theta):
    """Same condition written as -(c + ik)(c^2/4 + d_s^2) w^i / (2 (c^2 + k^2))."""
    _, c = _nw(geom, wave, theta)
    k = wave.k
    wi = incident_field(geom, wave, theta)
    d2 = tangential_second_derivative(geom, wave, theta)
    corr = -(c + 1j * k) / (2.0 * (c**2 + k**2)) * (c**2 / 4.0 * wi + d2)
    return bt1_current(geom, wave, theta) + corr


def bt2_current_3d_form(geom: CurveGeometry, wave: WaveConfig, theta):
    """Three-dimensional second-order condition evaluated along a planar curve."""
    nw, c = _nw(geom, wave, theta)
    k = wave.k
    wi = incident_field(geom, wave, theta)
    d2 = tangential_second_derivative(geom, wave, theta)
    dn_ws = -(1j * k - c) * wi - c**2 * (c + 1j * k) / (2.0 * (c**2 + k**2)) * d2
    return dn_ws + 1j * k * nw * wi


def envelope(geom: CurveGeometry, wave: WaveConfig, theta, values):
    """Current with the incident phase e^{ikx.omega} divided out."""
    return np.asarray(values) / incident_field(geom, wave, theta)


def envelope_slope(geom: CurveGeometry, wave: WaveConfig, theta: float, current_fn, h: float = 1e-4):
    """|d/dtheta| of the envelope at ``theta`` by central differences.

    ``current_fn(theta_array)`` evaluates the current. Returns the absolute
    slope and the slope divided by the envelope modulus.
    """
    th = np.array([theta - h, theta, theta + h])
    env = envelope(geom, wave, th, current_fn(th))
    slope = abs(env[2] - env[0]) / (2.0 * h)
    return float(slope), float(slope / abs(env[1]))
