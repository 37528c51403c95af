"""Exact surface current on a sound-soft circle from the Mie series.

For a circle of radius a and incidence angle theta_w, with phi = theta - theta_w,

    d_n w^t(a, phi) = -(2i / (pi a)) * sum_{n=-N}^{N} i^n e^{i n phi} / H_n^{(1)}(k a),

which follows from the Bessel Wronskian J_n' H_n - J_n H_n' = -2i / (pi k a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import WaveConfig
from .specfun import bessel_jy_sequence

MAX_KA = 2000.0
TAIL_TOL = 1e-12


def truncation_order(ka: float) -> int:
    return math.ceil(ka + 10.0 * ka ** (1.0 / 3.0) + 20.0)


@dataclass(frozen=True)
class MieSolution:
    radius: float
    k: float
    n_terms: int
    coefficients: np.ndarray  # 1 / H_n^{(1)}(k a), n = 0..n_terms

    @property
    def modal_weights(self) -> np.ndarray:
        """i^n / H_n(ka); the current is a cosine series in these."""
        n = np.arange(self.n_terms + 1)
        return (1j ** (n % 4)) * self.coefficients


def mie_build(radius: float, k: float, n_terms: int | None = None) -> MieSolution:
    """Mie coefficients for a sound-soft circle, truncated per ``truncation_order``.

    Adds modes until the last one is below ``TAIL_TOL`` of the largest
    current amplitude. Raises ``OverflowError`` if Y_n overflows first.
    """
    if not (radius > 0 and k > 0):
        raise DomainError("radius and k must be positive")
    ka = k * radius
    if ka > MAX_KA:
        raise DomainError(f"k*radius = {ka} exceeds the supported {MAX_KA}")
    n = truncation_order(ka) if n_terms is None else int(n_terms)
    while True:
        j, y = bessel_jy_sequence(ka, n)
        coeffs = 1.0 / (j + 1j * y)
        scale = 2.0 * np.sum(np.abs(coeffs))  # bound on the series' modulus
        if abs(coeffs[-1]) < TAIL_TOL * scale or n_terms is not None:
            break
        n += 10
    if not np.all(np.isfinite(coeffs)):
        raise OverflowError("Hankel evaluation overflowed")
    return MieSolution(float(radius), float(k), n, coeffs)


def _cosine_series(weights: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # sum_{n=-N}^{N} w_|n| e^{i n phi} = p(q) + p(conj q) - w_0, p Horner in q = e^{i phi}
    q = np.exp(1j * phi)
    qc = np.conj(q)
    p = np.zeros_like(q)
    pc = np.zeros_like(q)
    for w in weights[::-1]:
        p = p * q + w
        pc = pc * qc + w
    return p + pc - weights[0]


def exact_current(sol: MieSolution, theta, wave: WaveConfig):
    """Normal derivative of the total field at boundary angle ``theta``.

    ``wave.k`` must match the wavenumber the solution was built for.
    """
    if not math.isclose(wave.k, sol.k, rel_tol=1e-14):
        raise DomainError("wave.k does not match the MieSolution")
    phi = np.asarray(theta, dtype=float) - wave.angle
    s = _cosine_series(sol.modal_weights, phi)
    return -(2j / (np.pi * sol.radius)) * s


def total_field(sol: MieSolution, r: float, theta, wave: WaveConfig):
    """Total field at radius ``r >= radius`` from the series (incident part summed too)."""
    phi = np.asarray(theta, dtype=float) - wave.angle
    kr = sol.k * r
    j_r, y_r = bessel_jy_sequence(kr, sol.n_terms)
    j_a, _ = bessel_jy_sequence(sol.k * sol.radius, sol.n_terms)
    n = np.arange(sol.n_terms + 1)
    modes = (1j ** (n % 4)) * (j_r - j_a * (j_r + 1j * y_r) * sol.coefficients)
    return _cosine_series(modes, phi)


def scattered_field_on_boundary(sol: MieSolution, theta, wave: WaveConfig):
    """Scattered field at r = radius from the series, for the Dirichlet check."""
    phi = np.asarray(theta, dtype=float) - wave.angle
    j_a, y_a = bessel_jy_sequence(sol.k * sol.radius, sol.n_terms)
    n = np.arange(sol.n_terms + 1)
    modes = -(1j ** (n % 4)) * j_a * (j_a + 1j * y_a) * sol.coefficients
    return _cosine_series(modes, phi)
