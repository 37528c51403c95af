"""Truncated asymptotic amplitudes built on the transition function Psi.

All amplitudes share the form

    sum_{p,l} k^{2/3 - p - 2l/3} W_{p,l}(omega, x) Psi^{(l)}(k^{1/3} Z(omega, x)) e^{i k x.omega}

with Z = -n.omega. Only the (0, 0) coefficient is known in closed form;
higher terms can be supplied as callables through ``ExpansionConfig``.
The partner coefficient of every term is b = -a/(ik); it is derived, never
stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import ConfigError, DomainError, FitError
from .fock import TAU_SWITCH, psi_values
from .geometry import (
    CurveGeometry,
    WaveConfig,
    arc_length_second_derivative,
    boundary_point,
    incident_field,
    n_dot_omega,
    region_of,
    z_function,
)
from .currents import bt1_current

Convention = Literal["kirchhoff", "unit_over_z", "calibrated"]
CoefficientFn = Callable[[CurveGeometry, WaveConfig, np.ndarray], np.ndarray]

Z_FLOOR = 1e-12


@dataclass(frozen=True)
class ExpansionTerm:
    """One (p, l) term; ``b`` is always -a/(ik)."""

    p: int
    l: int
    a: CoefficientFn

    def b(self, geom: CurveGeometry, wave: WaveConfig, theta):
        return -self.a(geom, wave, theta) / (1j * wave.k)


def leading_coefficient(convention: Convention, calibration: complex = 1.0) -> CoefficientFn:
    """a_00 under one of the three conventions.

    ``kirchhoff``: -(n.omega)/Z = 1, the choice that reproduces physical optics
    with Psi ~ -2i tau. ``unit_over_z``: 1/Z. ``calibrated``: 1/(2Z), for which
    the lit-side limit is exactly the first-order local-condition current.
    The 1/Z forms take the value ``calibration`` where |Z| < Z_FLOOR.
    """
    if convention == "kirchhoff":
        def a00(geom, wave, theta):
            return np.full(np.shape(theta), calibration, dtype=complex)
        return a00
    if convention not in ("unit_over_z", "calibrated"):
        raise ConfigError(f"unknown convention {convention!r}")
    factor = 1.0 if convention == "unit_over_z" else 0.5

    def a00(geom, wave, theta):
        z = z_function(geom, wave, theta)
        safe = np.where(np.abs(z) < Z_FLOOR, 1.0, z)
        return np.where(np.abs(z) < Z_FLOOR, calibration, calibration * factor / safe)

    return a00


@dataclass(frozen=True)
class ExpansionConfig:
    P: int = 0
    L: int = 0
    leading_coeff_convention: Convention = "calibrated"
    calibration: complex = 1.0
    extra_terms: tuple[ExpansionTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.P < 0 or self.L < 0:
            raise ConfigError("truncation orders must be non-negative")
        cal = complex(self.calibration)
        if not (math.isfinite(cal.real) and math.isfinite(cal.imag)) or cal == 0:
            raise ConfigError("calibration must be finite and nonzero")
        if self.leading_coeff_convention not in ("kirchhoff", "unit_over_z", "calibrated"):
            raise ConfigError(f"unknown convention {self.leading_coeff_convention!r}")
        for t in self.extra_terms:
            if (t.p, t.l) == (0, 0):
                raise ConfigError("the (0, 0) term is fixed by the convention")
            if t.p > self.P or t.l > self.L:
                raise ConfigError(f"term ({t.p}, {t.l}) exceeds the truncation orders")
            if t.l > 2:
                raise ConfigError("Psi derivatives are available up to order 2")

    def terms(self) -> list[ExpansionTerm]:
        lead = ExpansionTerm(0, 0, leading_coefficient(self.leading_coeff_convention, self.calibration))
        return [lead, *self.extra_terms]


def _common(geom, wave, theta):
    theta = np.asarray(theta, dtype=float)
    k = wave.k
    z = z_function(geom, wave, theta)
    tau = k ** (1.0 / 3.0) * z
    return theta, k, z, tau, incident_field(geom, wave, theta)


def _psi_l(tau, l, tau_switch):
    return psi_values(tau, l, tau_switch=tau_switch)


def mt_leading_amplitude(geom: CurveGeometry, wave: WaveConfig, theta, tau_switch: float = TAU_SWITCH):
    """Leading term k^{2/3} a_00 Psi(k^{1/3} Z) e^{ikx.omega} with the kirchhoff a_00."""
    theta, k, _, tau, wi = _common(geom, wave, theta)
    a00 = leading_coefficient("kirchhoff")(geom, wave, theta)
    return k ** (2.0 / 3.0) * a00 * _psi_l(tau, 0, tau_switch) * wi


def bt1_leading_amplitude(
    geom: CurveGeometry, wave: WaveConfig, theta, cfg: ExpansionConfig | None = None,
    tau_switch: float = TAU_SWITCH,
):
    """First-order expansion: sum k^{...} ((1 - n.omega) a + (c/2) b) Psi^{(l)} e^{ikx.omega}."""
    cfg = cfg or ExpansionConfig()
    theta, k, _, tau, wi = _common(geom, wave, theta)
    _, n, c = boundary_point(geom, theta)
    nw = n_dot_omega(geom, wave, theta)
    half_c = c / 2.0
    total = np.zeros(theta.shape, dtype=complex)
    for term in cfg.terms():
        a = term.a(geom, wave, theta)
        b = -a / (1j * k)  # never read from the term, so b cannot drift from a
        weight = (1.0 - nw) * a + half_c * b
        total = total + k ** (2.0 / 3.0 - term.p - 2.0 * term.l / 3.0) * weight * _psi_l(tau, term.l, tau_switch)
    return total * wi


def bt2_leading_amplitude(
    geom: CurveGeometry, wave: WaveConfig, theta, cfg: ExpansionConfig | None = None,
    tau_switch: float = TAU_SWITCH,
):
    """Second-order expansion: first-order part plus the curvature correction.

    The correction is -(1/2) c/(c^2 + k^2) sum k^{...} (b# - a#/c) Psi^{(l)},
    with a# = (c^2/4 + d_s^2) a and b# = -a#/(ik).
    """
    cfg = cfg or ExpansionConfig()
    theta, k, _, tau, wi = _common(geom, wave, theta)
    _, _, c = boundary_point(geom, theta)
    first = bt1_leading_amplitude(geom, wave, theta, cfg, tau_switch)
    corr = np.zeros(theta.shape, dtype=complex)
    for term in cfg.terms():
        a_sharp = sharp(geom, wave, theta, term.a)
        b_sharp = -a_sharp / (1j * k)
        corr = corr + k ** (2.0 / 3.0 - term.p - 2.0 * term.l / 3.0) * (b_sharp - a_sharp / c) * _psi_l(
            tau, term.l, tau_switch
        )
    return first - 0.5 * c / (c**2 + k**2) * corr * wi


def sharp(geom: CurveGeometry, wave: WaveConfig, theta, a: CoefficientFn):
    """(c^2/4 + d_s^2) applied to a coefficient function."""
    theta = np.asarray(theta, dtype=float)
    _, _, c = boundary_point(geom, theta)
    d2 = arc_length_second_derivative(geom, lambda th: a(geom, wave, th), theta)
    return c**2 / 4.0 * a(geom, wave, theta) + d2


# --------------------------------------------------------------------------
# scaling estimates


@dataclass(frozen=True)
class ScalingFit:
    """log(values) = log(constant) + rate * log(ks), with goodness of fit."""

    ks: np.ndarray
    values: np.ndarray
    rate: float
    constant: float
    r_squared: float


def fit_power_law(ks: Sequence[float], values: Sequence[float]) -> ScalingFit:
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ks) < 2:
        raise FitError("need at least two wavenumbers to fit a rate")
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise FitError("values underflow or are not finite; cannot take logs")
    x, y = np.log(ks), np.log(values)
    rate, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + rate * x)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(ks, values, float(rate), float(math.exp(intercept)), float(r2))


@dataclass(frozen=True)
class Prop1Estimate:
    """Gap between the first-order expansion and its closed-form target.

    ``fit`` is the contract fit of the relative gap on the lit part of the
    grid; ``abs_fit`` fits the absolute gap there. ``region_max`` holds the
    per-k maximum absolute gap for every region label present on the grid.
    """

    fit: ScalingFit
    abs_fit: ScalingFit | None
    region_max: dict[str, np.ndarray]

    @property
    def rate(self) -> float:
        return self.fit.rate

    @property
    def C(self) -> float:
        return self.fit.constant


def _check_wave_list(wave_list, k_min: float, n_min: int):
    if len(wave_list) < n_min:
        raise FitError(f"need at least {n_min} wavenumbers, got {len(wave_list)}")
    ks = np.array([w.k for w in wave_list])
    if np.any(ks < k_min):
        raise DomainError(f"wavenumbers must be >= {k_min}")
    if np.any(np.diff(ks) <= 0):
        raise DomainError("wavenumbers must be strictly increasing")
    return ks


def estimate_prop1(
    geom: CurveGeometry, wave_list: Sequence[WaveConfig], theta_grid, cfg: ExpansionConfig | None = None,
    eps_region: float = 0.05,
) -> Prop1Estimate:
    """Fit how fast the first-order expansion approaches its target as k grows.

    The target is (-ik(1 - n.omega) + c/2) e^{ikx.omega}. The contract fit uses
    the lit points of ``theta_grid`` and the gap relative to the target.
    """
    cfg = cfg or ExpansionConfig(leading_coeff_convention="calibrated")
    ks = _check_wave_list(wave_list, 50.0, 4)
    theta = np.asarray(theta_grid, dtype=float)
    regions = np.array([region_of(float(v), eps_region) for v in n_dot_omega(geom, wave_list[0], theta)])
    lit = regions == "illuminated"
    if not lit.any():
        raise FitError("theta_grid has no illuminated points")
    rel, absg = [], []
    region_max: dict[str, list[float]] = {r: [] for r in np.unique(regions)}
    for w in wave_list:
        eta = bt1_leading_amplitude(geom, w, theta, cfg)
        target = bt1_current(geom, w, theta)
        gap = np.abs(eta - target)
        rel.append(np.max(gap[lit] / np.abs(target[lit])))
        absg.append(np.max(gap[lit]))
        for r in region_max:
            region_max[r].append(float(np.max(gap[regions == r])))
    fit = fit_power_law(ks, rel)
    try:
        abs_fit = fit_power_law(ks, absg)
    except FitError:
        abs_fit = None
    return Prop1Estimate(fit, abs_fit, {r: np.array(v) for r, v in region_max.items()})


def band_samples(geom: CurveGeometry, wave: WaveConfig, width: float, n_grid: int = 8192):
    """Grid points whose Fock variable satisfies |k^{1/3} Z| <= width."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    tau = wave.k ** (1.0 / 3.0) * z_function(geom, wave, theta)
    return theta[np.abs(tau) <= width]


def estimate_prop2(
    geom: CurveGeometry, wave_list: Sequence[WaveConfig], shadow_band_width: float = 1.0,
    cfg: ExpansionConfig | None = None, source: Literal["ansatz", "exact"] = "ansatz",
    n_grid: int = 8192,
) -> ScalingFit:
    """Exponent of sup_{band} |amplitude| / k^{2/3} against k.

    ``source="ansatz"`` uses the first-order expansion (kirchhoff a_00 unless
    ``cfg`` says otherwise); ``"exact"`` uses the Mie current (circle only).
    """
    from .reference import exact_current, mie_build

    cfg = cfg or ExpansionConfig(leading_coeff_convention="kirchhoff")
    ks = _check_wave_list(wave_list, 0.0, 2)
    if not shadow_band_width > 0:
        raise DomainError("empty band: width must be positive")
    sups = []
    for w in wave_list:
        theta = band_samples(geom, w, shadow_band_width, n_grid)
        if theta.size == 0:
            raise DomainError("empty band: no grid points satisfy |k^{1/3} Z| <= width")
        if source == "ansatz":
            amp = bt1_leading_amplitude(geom, w, theta, cfg)
        elif source == "exact":
            if geom.kind != "circle":
                raise ConfigError("exact current is available for the circle only")
            amp = exact_current(mie_build(geom.a, w.k), theta, w)
        else:
            raise ValueError(f"unknown source {source!r}")
        sups.append(np.max(np.abs(amp)) / w.k ** (2.0 / 3.0))
    return fit_power_law(ks, sups)
