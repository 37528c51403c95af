"""Experiment orchestration: config files, traces, k-sweeps, Psi tables, validation.

All text output is comma-delimited with one header row and 17 significant
digits, so files round-trip exactly and can be diffed.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import fock
from .ansatz import (
    ExpansionConfig,
    bt1_leading_amplitude,
    bt2_leading_amplitude,
    estimate_prop1,
    estimate_prop2,
    fit_power_law,
    mt_leading_amplitude,
)
from .currents import (
    CURRENT_KINDS,
    bt1_current,
    bt2_current_2d,
    bt2_current_3d_form,
    envelope_slope,
    kirchhoff_current,
)
from .errors import ConfigError, DomainError, FitError
from .geometry import EPS_REGION, CurveGeometry, WaveConfig, n_dot_omega, region_of
from .reference import exact_current, mie_build

MIN_SAMPLES = 64

_KEYS = (
    "geometry.kind",
    "geometry.radius",
    "geometry.a",
    "geometry.b",
    "wave.k",
    "wave.omega_deg",
    "trace.samples",
    "trace.kinds",
    "trace.kirchhoff_mode",
    "sweep.k_list",
    "ansatz.convention",
    "fock.tau_switch",
    "region.epsilon",
)


def fmt(x: float) -> str:
    return f"{x:.17g}"


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    geometry_kind: str = "circle"
    radius: float = 1.0
    a: float | None = None
    b: float | None = None
    k: float = 150.0
    omega_deg: float = 0.0
    samples: int = 2048
    kinds: tuple[str, ...] = ("exact", "kirchhoff", "bt1")
    kirchhoff_mode: str = "zero"
    k_list: tuple[float, ...] = (100.0, 200.0, 400.0, 800.0)
    convention: str = "calibrated"
    tau_switch: float = fock.TAU_SWITCH
    epsilon: float = EPS_REGION

    def __post_init__(self):
        for kind in self.kinds:
            if kind not in CURRENT_KINDS:
                raise ConfigError(f"unknown current kind {kind!r}")
        if len(set(self.kinds)) != len(self.kinds):
            raise ConfigError("duplicate current kind")
        if self.kirchhoff_mode not in ("zero", "extended"):
            raise ConfigError("trace.kirchhoff_mode must be zero or extended")
        if not 0 < self.epsilon < 0.5:
            raise ConfigError("region.epsilon must lie in (0, 0.5)")
        # also validates geometry, convention and wave
        self.geometry()
        self.wave()
        self.expansion()

    def geometry(self) -> CurveGeometry:
        if self.geometry_kind == "circle":
            return CurveGeometry.circle(self.radius)
        if self.geometry_kind == "ellipse":
            if self.a is None or self.b is None:
                raise ConfigError("ellipse needs geometry.a and geometry.b")
            return CurveGeometry.ellipse(self.a, self.b)
        raise ConfigError(f"unknown geometry kind {self.geometry_kind!r}")

    def wave(self, k: float | None = None) -> WaveConfig:
        return WaveConfig.from_angle(self.k if k is None else k, math.radians(self.omega_deg))

    def expansion(self) -> ExpansionConfig:
        try:
            return ExpansionConfig(leading_coeff_convention=self.convention)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    seen: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = value

    kw: dict = {}
    conv = {
        "geometry.kind": ("geometry_kind", str),
        "geometry.radius": ("radius", float),
        "geometry.a": ("a", float),
        "geometry.b": ("b", float),
        "wave.k": ("k", float),
        "wave.omega_deg": ("omega_deg", float),
        "trace.samples": ("samples", int),
        "trace.kinds": ("kinds", lambda v: tuple(_split_list(v))),
        "trace.kirchhoff_mode": ("kirchhoff_mode", str),
        "sweep.k_list": ("k_list", lambda v: tuple(float(t) for t in _split_list(v))),
        "ansatz.convention": ("convention", str),
        "fock.tau_switch": ("tau_switch", float),
        "region.epsilon": ("epsilon", float),
    }
    for key, value in seen.items():
        name, cast = conv[key]
        try:
            kw[name] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return ExperimentConfig(**kw)


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# --------------------------------------------------------------------------
# current evaluation


def current_evaluator(kind: str, cfg: ExperimentConfig, wave: WaveConfig) -> Callable[[np.ndarray], np.ndarray]:
    """Function theta -> current of the given kind for this configuration."""
    geom = cfg.geometry()
    ts = cfg.tau_switch
    if kind == "kirchhoff":
        return lambda th: kirchhoff_current(geom, wave, th, cfg.kirchhoff_mode)
    if kind == "bt1":
        return lambda th: bt1_current(geom, wave, th)
    if kind == "bt2_2d":
        return lambda th: bt2_current_2d(geom, wave, th)
    if kind == "bt2_3d_form":
        return lambda th: bt2_current_3d_form(geom, wave, th)
    if kind == "exact":
        if geom.kind != "circle":
            raise ConfigError("the exact current is available for circle geometry only")
        sol = mie_build(geom.a, wave.k)
        return lambda th: exact_current(sol, th, wave)
    if kind == "ansatz_mt":
        return lambda th: mt_leading_amplitude(geom, wave, th, ts)
    if kind == "ansatz_bt1":
        return lambda th: bt1_leading_amplitude(geom, wave, th, cfg.expansion(), ts)
    if kind == "ansatz_bt2":
        return lambda th: bt2_leading_amplitude(geom, wave, th, cfg.expansion(), ts)
    raise ConfigError(f"unknown current kind {kind!r}")


# --------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class CurrentTrace:
    """Current values of several kinds on a uniform theta grid."""

    theta: np.ndarray
    n_dot_omega: np.ndarray
    regions: tuple[str, ...]
    values: dict[str, np.ndarray]
    k: float
    epsilon: float = EPS_REGION

    def modulus(self, kind: str) -> np.ndarray:
        return np.abs(self.values[kind])

    def mask(self, region: str) -> np.ndarray:
        return np.array([r == region for r in self.regions])

    def header(self) -> list[str]:
        cols = ["theta", "n_dot_omega", "region"]
        for kind in self.values:
            cols += [f"{kind}_re", f"{kind}_im", f"{kind}_abs"]
        return cols

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.header()) + "\n")
        for i, th in enumerate(self.theta):
            cells = [fmt(th), fmt(self.n_dot_omega[i]), self.regions[i]]
            for v in self.values.values():
                z = complex(v[i])
                cells += [fmt(z.real), fmt(z.imag), fmt(abs(z))]
            out.write(",".join(cells) + "\n")
        return out.getvalue()


def run_trace(cfg: ExperimentConfig) -> CurrentTrace:
    if cfg.samples < MIN_SAMPLES:
        raise ConfigError(f"trace.samples must be at least {MIN_SAMPLES}")
    if not cfg.kinds:
        raise ConfigError("trace.kinds is empty")
    geom = cfg.geometry()
    if "exact" in cfg.kinds and geom.kind != "circle":
        raise ConfigError("the exact current is available for circle geometry only")
    wave = cfg.wave()
    theta = 2.0 * np.pi * np.arange(cfg.samples) / cfg.samples
    nw = n_dot_omega(geom, wave, theta)
    regions = tuple(region_of(float(v), cfg.epsilon) for v in nw)
    values = {kind: np.asarray(current_evaluator(kind, cfg, wave)(theta)) for kind in cfg.kinds}
    for kind, v in values.items():
        if not np.all(np.isfinite(v)):
            raise FloatingPointError(f"non-finite {kind} values in trace")
    return CurrentTrace(theta, nw, regions, values, wave.k, cfg.epsilon)


# --------------------------------------------------------------------------
# sweeps


def theta_where(geom: CurveGeometry, wave: WaveConfig, target: float, n_grid: int = 4096) -> float:
    """First theta counter-clockwise from the lit pole where n.omega = target."""
    th = 2.0 * np.pi * np.arange(n_grid) / n_grid
    nw = n_dot_omega(geom, wave, th)
    start = int(np.argmin(nw))
    order = (start + np.arange(n_grid + 1)) % n_grid
    f = nw[order] - target
    idx = np.nonzero(np.diff(np.sign(f)) != 0)[0]
    if idx.size == 0:
        raise DomainError(f"n.omega never reaches {target}")
    i = idx[0]
    lo = th[order[i]]
    hi = lo + 2.0 * np.pi / n_grid
    g = lambda t: float(n_dot_omega(geom, wave, t)) - target  # noqa: E731
    return float(brentq(g, lo, hi, xtol=1e-15)) % (2.0 * np.pi)


def deep_lit_grid(geom: CurveGeometry, wave: WaveConfig, n: int = 512, threshold: float = -0.5) -> np.ndarray:
    th = 2.0 * np.pi * np.arange(n) / n
    return th[n_dot_omega(geom, wave, th) <= threshold]


ENVELOPE_POINTS = {"shadow_boundary": 0.0, "deep_lit": -math.sqrt(0.5)}


@dataclass(frozen=True)
class SweepResult:
    """Per-k measurements and the power-law fits built from them.

    ``per_k`` maps a quantity name to one value per k. ``fits`` maps a
    name to (rate, constant, r_squared). ``notes`` lists skipped studies.
    """

    ks: np.ndarray
    per_k: dict[str, np.ndarray]
    fits: dict[str, tuple[float, float, float]]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("section,quantity,k,value\n")
        for name, vals in self.per_k.items():
            for k, v in zip(self.ks, vals):
                out.write(f"per_k,{name},{fmt(k)},{fmt(v)}\n")
        for name, (rate, const, r2) in self.fits.items():
            out.write(f"fit,{name}.rate,,{fmt(rate)}\n")
            out.write(f"fit,{name}.constant,,{fmt(const)}\n")
            out.write(f"fit,{name}.r_squared,,{fmt(r2)}\n")
        for note in self.notes:
            out.write(f"note,{note},,\n")
        return out.getvalue()


def _envelope_kinds(geom: CurveGeometry) -> list[str]:
    return (["exact"] if geom.kind == "circle" else []) + ["bt1", "ansatz_mt"]


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    ks = np.array(cfg.k_list, dtype=float)
    if ks.size < 2:
        raise ConfigError("sweep.k_list needs at least two wavenumbers")
    if np.any(np.diff(ks) <= 0):
        raise ConfigError("sweep.k_list must be strictly increasing")
    geom = cfg.geometry()
    waves = [cfg.wave(k) for k in ks]
    per_k: dict[str, np.ndarray] = {}
    fits: dict[str, tuple[float, float, float]] = {}
    notes: list[str] = []

    def record(name, values):
        per_k[name] = np.asarray(values, dtype=float)
        f = fit_power_law(ks, per_k[name])
        fits[name] = (f.rate, f.constant, f.r_squared)

    if ks.size >= 4 and ks[0] >= 50:
        grid = deep_lit_grid(geom, waves[0])
        est = estimate_prop1(geom, waves, grid, cfg.expansion(), cfg.epsilon)
        per_k["prop1.rel_gap"] = est.fit.values
        fits["prop1.rel_gap"] = (est.fit.rate, est.fit.constant, est.fit.r_squared)
        if est.abs_fit is not None:
            per_k["prop1.abs_gap"] = est.abs_fit.values
            fits["prop1.abs_gap"] = (est.abs_fit.rate, est.abs_fit.constant, est.abs_fit.r_squared)
        for region, vals in sorted(est.region_max.items()):
            per_k[f"prop1.max_gap.{region}"] = vals
    else:
        notes.append("prop1 skipped: needs at least four wavenumbers >= 50")

    f2 = estimate_prop2(geom, waves)
    per_k["prop2.band_sup.ansatz"] = f2.values
    fits["prop2.band_sup.ansatz"] = (f2.rate, f2.constant, f2.r_squared)
    if geom.kind == "circle":
        f2e = estimate_prop2(geom, waves, source="exact")
        per_k["prop2.band_sup.exact"] = f2e.values
        fits["prop2.band_sup.exact"] = (f2e.rate, f2e.constant, f2e.r_squared)
    else:
        notes.append("prop2 exact skipped: circle only")

    for loc, target in ENVELOPE_POINTS.items():
        for kind in _envelope_kinds(geom):
            absolute, relative = [], []
            for w in waves:
                th0 = theta_where(geom, w, target)
                s, r = envelope_slope(geom, w, th0, current_evaluator(kind, cfg, w))
                absolute.append(s)
                relative.append(r)
            record(f"envelope_slope.{kind}.{loc}", absolute)
            record(f"envelope_rel_slope.{kind}.{loc}", relative)
    return SweepResult(ks, per_k, fits, tuple(notes))


# --------------------------------------------------------------------------
# Psi table


@dataclass(frozen=True)
class PsiTable:
    rows: tuple[fock.FockEval, ...]

    def for_order(self, l: int) -> list[fock.FockEval]:
        return [r for r in self.rows if r.l == l]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("l,tau,re,im,abs,path,err_estimate\n")
        for r in self.rows:
            out.write(
                f"{r.l},{fmt(r.tau)},{fmt(r.value.real)},{fmt(r.value.imag)},"
                f"{fmt(abs(r.value))},{r.path},{fmt(r.err_estimate)}\n"
            )
        return out.getvalue()


def dump_psi_table(tau_min: float, tau_max: float, step: float, tau_switch: float = fock.TAU_SWITCH) -> PsiTable:
    if not step > 0:
        raise DomainError("step must be positive")
    if tau_min < fock.TAU_MIN or tau_max > fock.TAU_MAX or tau_min > tau_max:
        raise DomainError(f"table range must lie in [{fock.TAU_MIN}, {fock.TAU_MAX}]")
    n = int(math.floor((tau_max - tau_min) / step + 1e-9)) + 1
    taus = tau_min + step * np.arange(n)
    hi = taus >= tau_switch
    rows = []
    for l in (0, 1, 2):
        vals = np.empty(n, dtype=complex)
        errs = np.empty(n)
        if hi.any():
            vals[hi], errs[hi] = fock.psi_asymptotic(taus[hi], l)
        if (~hi).any():
            vals[~hi], errs[~hi] = fock.psi_quadrature(taus[~hi], l)
        for t, v, e, h in zip(taus, vals, errs, hi):
            rows.append(fock.FockEval(float(t), l, complex(v), "asymptotic" if h else "quadrature", float(e)))
    return PsiTable(tuple(rows))


# --------------------------------------------------------------------------
# validation suite


def validate(cfg: ExperimentConfig) -> tuple[list, str]:
    """Run every check; returns the results and the text report."""
    from .checks import CheckResult, suite

    results: list[CheckResult] = []
    for fn in suite(cfg):
        try:
            results.extend(fn())
        except (DomainError, ConfigError, FitError, ArithmeticError, RuntimeError) as exc:
            results.append(CheckResult(fn.__name__, False, f"error: {type(exc).__name__}: {exc}"))
    n_fail = sum(not r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - n_fail} passed, {n_fail} failed")
    return results, "\n".join(lines) + "\n"


def with_overrides(cfg: ExperimentConfig, k: float | None = None, kinds: Sequence[str] | None = None) -> ExperimentConfig:
    kw = {}
    if k is not None:
        kw["k"] = float(k)
    if kinds is not None:
        kw["kinds"] = tuple(kinds)
    return replace(cfg, **kw) if kw else cfg
