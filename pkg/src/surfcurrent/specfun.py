"""Airy and integer-order Bessel/Hankel functions.

Ai and Ai' are evaluated from the Maclaurin series inside a disc of radius
``SWITCH_RADIUS`` and from the large-argument expansion outside it; for
``|arg z| > 2*pi/3`` the connection formula maps the argument back into the
sector where the expansion has a single dominant exponential.

Inside the disc, where Ai is exponentially small (Re zeta > ``ODE_ZETA``) the
series loses relative accuracy to cancellation. There Ai is instead carried
inward along the ray from radius ``ODE_START`` by Taylor steps of the Airy
equation, which is stable because Ai grows in that direction.

Bessel J_n uses Miller's downward recurrence normalised by the Neumann sum
``J_0 + 2 sum J_2k = 1``; Y_0 and Y_1 come from Neumann series in the same
J values and Y_n from upward recurrence.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

AIRY_MAX_ABS = 200.0
SWITCH_RADIUS = 7.0
_N_MACLAURIN = 64
_N_ASYMPTOTIC = 40
ODE_START = 9.0           # expansion is accurate to ~1e-16 here
ODE_ZETA = 2.0
_ODE_STEPS = 18
_ODE_TERMS = 30

OMEGA = np.exp(2j * np.pi / 3)  # rotation used by A_+ and the connection formula
_SQRT_PI = math.sqrt(math.pi)
_EULER_GAMMA = 0.57721566490153286061


class AiryPair(NamedTuple):
    value: complex | np.ndarray
    derivative: complex | np.ndarray


def _asymptotic_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    k = np.arange(n)
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


_U, _V = _asymptotic_coefficients(_N_ASYMPTOTIC)


def _maclaurin(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z3 = z**3
    t = np.ones_like(z)   # z^{3k} / prod (3j-1)(3j)
    v = np.ones_like(z)   # z^{3k} / prod (3j)(3j+1)
    f = t.copy()
    fp = np.zeros_like(z)
    gs = v.copy()
    gp = v.copy()
    for k in range(1, _N_MACLAURIN):
        fp = fp + z * z * t / (3 * k - 1)
        t = t * z3 / ((3 * k - 1) * (3 * k))
        v = v * z3 / ((3 * k) * (3 * k + 1))
        f = f + t
        gs = gs + v
        gp = gp + (3 * k + 1) * v
    ai = AI0 * f + AIP0 * z * gs
    aip = AI0 * fp + AIP0 * gp
    return ai, aip


def _asymptotic_scaled(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Ai e^zeta, Ai' e^zeta, zeta) for |arg z| <= 2pi/3, |z| large.

    The series is truncated at its smallest term (or at machine precision).
    """
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    inv = -1.0 / zeta
    su = np.ones_like(z)
    sv = np.ones_like(z)
    term_u = np.ones_like(z)
    term_v = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    power = np.ones_like(z)
    for k in range(1, _N_ASYMPTOTIC):
        power = power * inv
        term_u = _U[k] * power
        term_v = _V[k] * power
        mag = np.abs(term_u)
        active &= (mag < prev) & (mag > 1e-17 * np.abs(su))
        if not active.any():
            break
        su = np.where(active, su + term_u, su)
        sv = np.where(active, sv + term_v, sv)
        prev = mag
    z14 = z**0.25
    ai = su / (2.0 * _SQRT_PI * z14)
    aip = -z14 * sv / (2.0 * _SQRT_PI)
    return ai, aip, zeta


def _asymptotic(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ai, aip, zeta = _asymptotic_scaled(z)
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.exp(-zeta)
        return ai * e, aip * e


def _taylor_step(c: np.ndarray, y: np.ndarray, yp: np.ndarray, h: np.ndarray):
    # y'' = c y + (t - c) y around t = c: a_{n+2} = (c a_n + a_{n-1}) / ((n+1)(n+2))
    a_prev, a0, a1 = np.zeros_like(y), y, yp
    val = a0 + a1 * h
    der = a1.copy()
    hn = h.copy()          # h^{n-1} for the derivative
    coeffs = [a0, a1]
    for n in range(0, _ODE_TERMS):
        a_next = (c * coeffs[n] + (coeffs[n - 1] if n >= 1 else a_prev)) / ((n + 1) * (n + 2))
        coeffs.append(a_next)
        der = der + (n + 2) * a_next * hn
        hn = hn * h
        val = val + a_next * hn
    return val, der


def _ode_inward(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    start = z * (ODE_START / np.abs(z))
    ai, aip = _asymptotic(start)
    h = (z - start) / _ODE_STEPS
    c = start
    for _ in range(_ODE_STEPS):
        ai, aip = _taylor_step(c, ai, aip, h)
        c = c + h
    return ai, aip


def _inner_disc(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluator used for |z| <= SWITCH_RADIUS."""
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    recessive = ((2.0 / 3.0) * z * np.sqrt(z)).real > ODE_ZETA
    if (~recessive).any():
        ai[~recessive], aip[~recessive] = _maclaurin(z[~recessive])
    if recessive.any():
        ai[recessive], aip[recessive] = _ode_inward(z[recessive])
    return ai, aip


def _airy_upper(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Im z >= 0 only; the lower half-plane follows by conjugation.
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    small = np.abs(z) <= SWITCH_RADIUS
    if small.any():
        ai[small], aip[small] = _inner_disc(z[small])
    big = ~small
    direct = big & (np.angle(z) <= 2 * np.pi / 3)
    if direct.any():
        ai[direct], aip[direct] = _asymptotic(z[direct])
    conn = big & ~direct
    if conn.any():
        # Ai(z) = -w Ai(w z) - conj(w) Ai(conj(w) z), w = e^{2 pi i/3}
        zc = z[conn]
        a1, d1 = _asymptotic(OMEGA * zc)
        a2, d2 = _asymptotic(np.conj(OMEGA) * zc)
        ai[conn] = -OMEGA * a1 - np.conj(OMEGA) * a2
        aip[conn] = -OMEGA**2 * d1 - np.conj(OMEGA) ** 2 * d2
    return ai, aip


def airy_core(z) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Ai, Ai' without range checks (internal use)."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    lower = z.imag < 0
    zu = np.where(lower, np.conj(z), z)
    ai, aip = _airy_upper(zu)
    ai = np.where(lower, np.conj(ai), ai)
    aip = np.where(lower, np.conj(aip), aip)
    real = z.imag == 0
    ai = np.where(real, ai.real + 0j, ai)
    aip = np.where(real, aip.real + 0j, aip)
    return ai.reshape(shape), aip.reshape(shape)


def airy_ai(z) -> AiryPair:
    """Ai(z) and Ai'(z) for complex ``z`` with ``|z| <= 200``.

    Accepts a scalar or an array; scalars in give Python complex out.
    Raises ``DomainError`` outside the validated disc and ``OverflowError``
    if a value is not representable.
    """
    za = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(za)) or np.any(np.abs(za) > AIRY_MAX_ABS):
        raise DomainError(f"airy_ai validated only for |z| <= {AIRY_MAX_ABS}")
    ai, aip = airy_core(za)
    if not (np.all(np.isfinite(ai)) and np.all(np.isfinite(aip))):
        raise OverflowError("Airy function value exceeds floating point range")
    if za.ndim == 0:
        return AiryPair(complex(ai), complex(aip))
    return AiryPair(ai, aip)


def airy_aplus(s, sign: int = +1) -> AiryPair:
    """Rotated Airy function A_{+/-}(s) = Ai(e^{+/-2 pi i/3} s) and its s-derivative."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rot = OMEGA if sign == 1 else np.conj(OMEGA)
    pair = airy_ai(rot * np.asarray(s, dtype=complex))
    return AiryPair(pair.value, rot * pair.derivative)


def airy_bi_from_rotations(x) -> AiryPair:
    """Bi(x) reconstructed as e^{i pi/6} A_+(x) + e^{-i pi/6} A_-(x)."""
    p = airy_aplus(x, +1)
    m = airy_aplus(x, -1)
    ep = np.exp(1j * np.pi / 6)
    em = np.exp(-1j * np.pi / 6)
    return AiryPair(ep * p.value + em * m.value, ep * p.derivative + em * m.derivative)


# --------------------------------------------------------------------------
# Bessel / Hankel


def miller_start(x: float, n_max: int) -> int:
    """Starting order of the downward recurrence.

    The offset ``15 + ceil(x^{1/3})`` is applied above whichever is larger of
    ``n_max`` and the turning-point margin ``x + 10 x^{1/3} + 20``, so that the
    recurrence always starts deep in the region where J_n decays.
    """
    c = x ** (1.0 / 3.0)
    base = max(n_max, math.ceil(x + 10.0 * c + 20.0))
    return base + 15 + math.ceil(c)


def bessel_jy_sequence(x: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """J_n(x), Y_n(x) for n = 0..n_max."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError("Bessel sequence requires finite x > 0")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    top = miller_start(x, n_max)
    j = np.zeros(top + 2)
    j[top] = 1e-300
    for n in range(top, 0, -1):
        j[n - 1] = (2.0 * n / x) * j[n] - j[n + 1]
        if abs(j[n - 1]) > 1e250:
            j[n - 1 :] *= 1e-250
    norm = j[0] + 2.0 * j[2::2].sum()
    j /= norm

    # Neumann series for Y_0 and Y_1 in terms of the normalised J's.
    log_term = math.log(x / 2.0) + _EULER_GAMMA
    kk = np.arange(1, top // 2 + 1)
    sign = np.where(kk % 2 == 0, 1.0, -1.0)
    y0 = (2.0 / np.pi) * log_term * j[0] - (4.0 / np.pi) * np.sum(sign * j[2 * kk] / kk)
    y1 = (2.0 / np.pi) * (log_term * j[1] - j[0] / x) + (2.0 / np.pi) * np.sum(
        sign * (j[2 * kk - 1] - j[np.minimum(2 * kk + 1, top + 1)]) / kk
    )
    y = np.empty(n_max + 1)
    y[0] = y0
    if n_max >= 1:
        y[1] = y1
    for n in range(1, n_max):
        with np.errstate(over="ignore"):
            y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1]
        if not math.isfinite(y[n + 1]):
            raise OverflowError(f"|Y_{n + 1}({x})| exceeds the floating point range")
    return j[: n_max + 1].copy(), y


def hankel1_sequence(x: float, n_max: int) -> np.ndarray:
    """H_n^{(1)}(x) = J_n(x) + i Y_n(x) for n = 0..n_max."""
    j, y = bessel_jy_sequence(x, n_max)
    return j + 1j * y


def sequence_derivative(c: np.ndarray, x: float) -> np.ndarray:
    """C_n'(x) from a cylinder-function sequence via C_n' = C_{n-1} - (n/x) C_n.

    The last entry is dropped (it would need C_{n_max+1}); ``C_0' = -C_1``.
    """
    n = np.arange(len(c) - 1)
    d = np.empty(len(c) - 1, dtype=c.dtype)
    d[0] = -c[1]
    d[1:] = c[:-2] - (n[1:] / x) * c[1:-1]
    return d


def bessel_wronskian_residual(x: float, n_max: int) -> np.ndarray:
    """Relative residual |J_n Y_n' - J_n' Y_n - 2/(pi x)| / (2/(pi x)), n = 0..n_max."""
    j, y = bessel_jy_sequence(x, n_max + 1)
    jp = sequence_derivative(j, x)
    yp = sequence_derivative(y, x)
    w = 2.0 / (np.pi * x)
    return np.abs(j[:-1] * yp - jp * y[:-1] - w) / w
