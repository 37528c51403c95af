"""Property checks run by ``validate``.

Every check is deterministic (fixed seeds, fixed grids) and returns one or
more ``CheckResult`` lines, so reports are byte-identical across runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import fock
from .ansatz import ExpansionConfig, estimate_prop1, estimate_prop2, mt_leading_amplitude
from .currents import bt1_current, bt2_current_2d, bt2_current_2d_rationalized, kirchhoff_current
from .geometry import CurveGeometry, WaveConfig, incident_field, n_dot_omega, region_of
from .reference import exact_current, mie_build, scattered_field_on_boundary
from .specfun import OMEGA, airy_ai, bessel_wronskian_residual

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def bound(name: str, value: float, limit: float, op: str = "<") -> CheckResult:
    ops = {"<": value < limit, "<=": value <= limit, ">=": value >= limit}
    return CheckResult(name, bool(ops[op]), f"{value:.6e} {op} {limit:g}")


def within(name: str, value: float, lo: float, hi: float) -> CheckResult:
    return CheckResult(name, bool(lo <= value <= hi), f"{value:.6f} in [{lo:g}, {hi:g}]")


# --------------------------------------------------------------------------
# special functions and reference


def airy_connection_residual(n: int = 100, radius: float = 10.0, seed: int = SEED) -> float:
    """max |Ai(z) + w Ai(wz) + w^2 Ai(w^2 z)| / max |term| over random z in a disk."""
    rng = np.random.default_rng(seed)
    z = radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    terms = [airy_ai(z).value, OMEGA * airy_ai(OMEGA * z).value, OMEGA**2 * airy_ai(OMEGA**2 * z).value]
    scale = np.max(np.abs(terms), axis=0)
    return float(np.max(np.abs(sum(terms)) / scale))


def bessel_wronskian_max(n: int = 50, x_max: float = 600.0, seed: int = SEED) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        x = float(0.1 + (x_max - 0.1) * rng.random())
        order = int(rng.integers(0, int(x) + 21))
        worst = max(worst, float(bessel_wronskian_residual(x, order)[order]))
    return worst


def mie_residuals(radius: float, k: float, n_theta: int = 512) -> tuple[float, float]:
    """Dirichlet residual and self-convergence of the Mie current.

    Self-convergence compares the default truncation with ten extra modes of
    the same coefficient sequence.
    """
    sol = mie_build(radius, k)
    wave = WaveConfig(k)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    geom = CurveGeometry.circle(radius)
    dirichlet = np.max(np.abs(scattered_field_on_boundary(sol, theta, wave) + incident_field(geom, wave, theta)))
    longer = mie_build(radius, k, sol.n_terms + 10)
    shorter = replace(longer, n_terms=sol.n_terms, coefficients=longer.coefficients[: sol.n_terms + 1])
    a = exact_current(shorter, theta, wave)
    b = exact_current(longer, theta, wave)
    return float(dirichlet), float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# --------------------------------------------------------------------------
# exact vs approximate currents at one wavenumber


@dataclass(frozen=True)
class ComparisonStats:
    lit_gap: float                 # max_lit |kirchhoff - exact| / max_lit |exact|
    shadow_bt1_max: float          # max over the deep_shadow label
    shadow_exact_max: float
    shadow_extended_max: float
    pole_bt1: float                # at the sample nearest n.omega = 1
    pole_exact: float
    labels_consistent: bool


def comparison_stats(radius: float = 1.0, k: float = 150.0, samples: int = 2048, eps: float = 0.05,
                  omega_angle: float = 0.0) -> ComparisonStats:
    geom = CurveGeometry.circle(radius)
    wave = WaveConfig.from_angle(k, omega_angle)
    theta = 2.0 * np.pi * np.arange(samples) / samples
    nw = n_dot_omega(geom, wave, theta)
    regions = np.array([region_of(float(v), eps) for v in nw])
    exact = exact_current(mie_build(radius, k), theta, wave)
    kir = kirchhoff_current(geom, wave, theta)
    ext = kirchhoff_current(geom, wave, theta, "extended")
    bt1 = bt1_current(geom, wave, theta)
    lit = regions == "illuminated"
    ds = regions == "deep_shadow"
    pole = int(np.argmax(nw))
    consistent = bool(np.all((nw < -eps) == lit) and np.all((nw > eps) == ds))
    return ComparisonStats(
        float(np.max(np.abs(kir - exact)[lit]) / np.max(np.abs(exact)[lit])),
        float(np.max(np.abs(bt1[ds]))),
        float(np.max(np.abs(exact[ds]))),
        float(np.max(np.abs(ext[ds]))),
        float(abs(bt1[pole])),
        float(abs(exact[pole])),
        consistent,
    )


def kirchhoff_recovery_ratio(k: float = 800.0, radius: float = 1.0) -> complex:
    """mt amplitude over 2ik(n.omega)e^{ikx.omega} at the lit pole."""
    geom = CurveGeometry.circle(radius)
    wave = WaveConfig(k)
    theta = np.array([np.pi])
    mt = mt_leading_amplitude(geom, wave, theta)
    kir = kirchhoff_current(geom, wave, theta)
    return complex(mt[0] / kir[0])


# --------------------------------------------------------------------------
# Fock function


def fock_path_consistency(lo: float = 6.0, hi: float = 12.0, n: int = 25) -> float:
    """max over l and tau of |quad - series| / (err_quad + err_series)."""
    taus = np.linspace(lo, hi, n)
    worst = 0.0
    for l in (0, 1, 2):
        q, eq = fock.psi_quadrature(taus, l)
        a, ea = fock.psi_asymptotic(taus, l)
        worst = max(worst, float(np.max(np.abs(q - a) / (eq + ea))))
    return worst


def fock_decay_ratio() -> float:
    return abs(fock.psi(-6.0).value) / abs(fock.psi(2.0).value)


def fock_derivative_error(h: float = 1e-3) -> float:
    """Central differences of Psi^{(l)} against Psi^{(l+1)}, relative to max(1, |Psi^{(l+1)}|)."""
    worst = 0.0
    for taus, path in ((np.linspace(-6.0, 6.0, 25), "quad"), (np.linspace(8.0, 14.0, 13), "series")):
        fn = fock.psi_quadrature if path == "quad" else fock.psi_asymptotic
        for l in (0, 1):
            plus = fn(taus + h, l)[0]
            minus = fn(taus - h, l)[0]
            d = fn(taus, l + 1)[0]
            err = np.abs((plus - minus) / (2 * h) - d) / np.maximum(1.0, np.abs(d))
            worst = max(worst, float(np.max(err)))
    return worst


# --------------------------------------------------------------------------
# algebraic identities


def coupling_residual(n: int = 200, seed: int = SEED) -> float:
    """|b - (-a/(ik))| for the leading term under every convention, random k and theta."""
    rng = np.random.default_rng(seed)
    geom = CurveGeometry.ellipse(1.3, 0.8)
    worst = 0.0
    for conv in ("kirchhoff", "unit_over_z", "calibrated"):
        term = ExpansionConfig(leading_coeff_convention=conv, calibration=0.7 - 0.2j).terms()[0]
        for _ in range(n // 3 + 1):
            wave = WaveConfig.from_angle(float(10 ** rng.uniform(1, 3)), float(rng.uniform(0, 2 * np.pi)))
            theta = rng.uniform(0, 2 * np.pi, 8)
            a = term.a(geom, wave, theta)
            b = term.b(geom, wave, theta)
            worst = max(worst, float(np.max(np.abs(b + a / (1j * wave.k)))))
    return worst


def ordre2_equivalence(n: int = 200, seed: int = SEED) -> float:
    """Relative gap between the direct and rationalised second-order currents."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        geom = CurveGeometry.ellipse(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0)))
        wave = WaveConfig.from_angle(float(10 ** rng.uniform(0, 3)), float(rng.uniform(0, 2 * np.pi)))
        theta = rng.uniform(0, 2 * np.pi, 4)
        a = bt2_current_2d(geom, wave, theta)
        b = bt2_current_2d_rationalized(geom, wave, theta)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(b))))
    return worst


# --------------------------------------------------------------------------
# suite


def suite(cfg) -> list[Callable[[], list[CheckResult]]]:
    """Checks for an ``ExperimentConfig``; circle-only items are skipped otherwise."""
    from .harness import deep_lit_grid

    geom = cfg.geometry()
    waves = [cfg.wave(k) for k in cfg.k_list]

    def special_functions():
        return [
            bound("airy.connection_identity", airy_connection_residual(), 1e-12),
            bound("bessel.wronskian", bessel_wronskian_max(), 1e-9),
        ]

    def reference():
        if geom.kind != "circle":
            return []
        dirichlet, conv = mie_residuals(geom.a, cfg.k)
        return [bound("mie.dirichlet_residual", dirichlet, 1e-9), bound("mie.self_convergence", conv, 1e-10)]

    def comparison():
        if geom.kind != "circle":
            return []
        st = comparison_stats(geom.a, cfg.k, max(cfg.samples, 64), cfg.epsilon, math.radians(cfg.omega_deg))
        return [
            bound("comparison.lit_kirchhoff_gap", st.lit_gap, 0.15, "<="),
            bound("comparison.shadow_pole_bt1", st.pole_bt1, 1.0, "<="),
            bound("comparison.shadow_pole_exact", st.pole_exact, 1.0, "<="),
            bound("comparison.deep_shadow_extended_kirchhoff", st.shadow_extended_max, 100.0, ">="),
            CheckResult("comparison.region_labels", st.labels_consistent, "labels match sign(n.omega) within epsilon"),
        ]

    def kirchhoff_recovery():
        ratio = kirchhoff_recovery_ratio(800.0, geom.a if geom.kind == "circle" else 1.0)
        return [bound("ansatz.kirchhoff_recovery_k800", abs(ratio - 1.0), 0.05, "<=")]

    def fock_function():
        return [
            bound("fock.path_consistency", fock_path_consistency(), 1.0, "<="),
            bound("fock.decay_ratio", fock_decay_ratio(), 1e-2),
            bound("fock.derivative_consistency", fock_derivative_error(), 1e-4),
        ]

    def identities():
        return [
            bound("ansatz.b_coupling", coupling_residual(), 1e-12),
            bound("currents.ordre2_equivalence", ordre2_equivalence(), 1e-12),
        ]

    def propositions():
        out = []
        if len(waves) >= 4 and waves[0].k >= 50:
            est = estimate_prop1(geom, waves, deep_lit_grid(geom, waves[0]), cfg.expansion(), cfg.epsilon)
            out.append(bound("prop1.rate", est.rate, -0.8, "<="))
            out.append(bound("prop1.r_squared", est.fit.r_squared, 0.95, ">="))
        if len(waves) >= 2:
            out.append(within("prop2.exponent_ansatz", estimate_prop2(geom, waves).rate, -0.15, 0.15))
            if geom.kind == "circle":
                out.append(within("prop2.exponent_exact", estimate_prop2(geom, waves, source="exact").rate, -0.15, 0.15))
        return out

    return [special_functions, reference, comparison, kirchhoff_recovery, fock_function, identities, propositions]
