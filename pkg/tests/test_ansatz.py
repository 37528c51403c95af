import dataclasses
import math

import numpy as np
import pytest

from surfcurrent import ansatz
from surfcurrent.ansatz import (
    ExpansionConfig,
    ExpansionTerm,
    bt1_leading_amplitude,
    bt2_leading_amplitude,
    estimate_prop1,
    estimate_prop2,
    fit_power_law,
    leading_coefficient,
    mt_leading_amplitude,
)
from surfcurrent.currents import bt1_current, kirchhoff_current
from surfcurrent.errors import ConfigError, DomainError, FitError
from surfcurrent.fock import psi
from surfcurrent.geometry import CurveGeometry, WaveConfig, incident_field, n_dot_omega
from surfcurrent.harness import deep_lit_grid

CIRCLE = CurveGeometry.circle(1.0)
ELLIPSE = CurveGeometry.ellipse(1.4, 0.7)
CAL = ExpansionConfig(leading_coeff_convention="calibrated")


def waves(*ks):
    return [WaveConfig(float(k)) for k in ks]


# ------------------------------------------------------------ coefficients and coupling


def test_conventions_at_lit_pole():
    w = WaveConfig(10.0)
    th = np.array([math.pi])  # Z = 1
    assert leading_coefficient("kirchhoff")(CIRCLE, w, th)[0] == 1
    assert leading_coefficient("unit_over_z")(CIRCLE, w, th)[0] == 1
    assert leading_coefficient("calibrated")(CIRCLE, w, th)[0] == 0.5
    assert leading_coefficient("calibrated", 2j)(CIRCLE, w, th)[0] == 1j


def test_z_zero_uses_calibration_constant():
    w = WaveConfig(10.0)
    th = np.array([math.pi / 2])
    assert leading_coefficient("unit_over_z", 0.3)(CIRCLE, w, th)[0] == 0.3


def test_coupling_is_identical_for_every_convention():
    rng = np.random.default_rng(11)
    for conv in ("kirchhoff", "unit_over_z", "calibrated"):
        term = ExpansionConfig(leading_coeff_convention=conv, calibration=0.4 + 0.9j).terms()[0]
        for _ in range(30):
            w = WaveConfig.from_angle(10 ** rng.uniform(0, 3), rng.uniform(0, 2 * np.pi))
            th = rng.uniform(0, 2 * np.pi, 6)
            a, b = term.a(ELLIPSE, w, th), term.b(ELLIPSE, w, th)
            assert np.max(np.abs(b * (1j * w.k) + a)) < 1e-12


def test_b_cannot_be_supplied_or_overwritten():
    term = CAL.terms()[0]
    with pytest.raises(dataclasses.FrozenInstanceError):
        term.b = lambda *args: 0.0
    with pytest.raises(TypeError):
        ExpansionTerm(0, 0, term.a, b=lambda *args: 0.0)


def test_evaluator_ignores_a_perturbed_b():
    class Rogue(ExpansionTerm):
        def b(self, geom, wave, theta):
            return 1e6 + super().b(geom, wave, theta)

    w = WaveConfig(150.0)
    th = np.linspace(0, 2 * np.pi, 64)
    base = bt1_leading_amplitude(ELLIPSE, w, th, CAL)
    cfg = ExpansionConfig(P=1)
    rogue = dataclasses.replace(cfg, extra_terms=(Rogue(1, 0, leading_coefficient("calibrated")),))
    plain = dataclasses.replace(cfg, extra_terms=(ExpansionTerm(1, 0, leading_coefficient("calibrated")),))
    assert np.array_equal(bt1_leading_amplitude(ELLIPSE, w, th, rogue), bt1_leading_amplitude(ELLIPSE, w, th, plain))
    assert not np.array_equal(base, bt1_leading_amplitude(ELLIPSE, w, th, plain))


def test_half_curvature_times_b_equals_minus_a_over_ik():
    # the first-order weight written both ways, bit for bit
    w = WaveConfig(150.0)
    th = np.linspace(0.1, 6.0, 40)
    a = CAL.terms()[0].a(CIRCLE, w, th)
    b = CAL.terms()[0].b(CIRCLE, w, th)
    assert np.array_equal(0.5 * b, 0.5 * (-a / (1j * w.k)))


def test_config_validation():
    with pytest.raises(ConfigError):
        ExpansionConfig(P=-1)
    with pytest.raises(ConfigError):
        ExpansionConfig(calibration=0)
    with pytest.raises(ConfigError):
        ExpansionConfig(calibration=complex("nan"))
    with pytest.raises(ConfigError):
        ExpansionConfig(leading_coeff_convention="half")
    with pytest.raises(ConfigError):
        leading_coefficient("half")
    a = leading_coefficient("kirchhoff")
    with pytest.raises(ConfigError):
        ExpansionConfig(extra_terms=(ExpansionTerm(0, 0, a),))
    with pytest.raises(ConfigError):
        ExpansionConfig(P=1, extra_terms=(ExpansionTerm(2, 0, a),))
    with pytest.raises(ConfigError):
        ExpansionConfig(P=0, L=3, extra_terms=(ExpansionTerm(0, 3, a),))


# ------------------------------------------------------------ leading amplitude


def test_mt_recovers_kirchhoff_at_lit_pole_k400():
    w = WaveConfig(400.0)
    ratio = mt_leading_amplitude(CIRCLE, w, math.pi) / kirchhoff_current(CIRCLE, w, math.pi)
    assert abs(ratio - 1) < 0.05


@pytest.mark.parametrize("k", [400.0, 800.0])
def test_mt_recovers_kirchhoff_in_deep_lit_region(k):
    w = WaveConfig(k)
    th = deep_lit_grid(CIRCLE, w)
    ratio = mt_leading_amplitude(CIRCLE, w, th) / kirchhoff_current(CIRCLE, w, th, "extended")
    assert np.max(np.abs(ratio - 1)) < 0.05


def test_mt_at_shadow_boundary():
    k = 150.0
    got = abs(mt_leading_amplitude(CIRCLE, WaveConfig(k), math.pi / 2))
    assert abs(got - k ** (2 / 3) * abs(psi(0.0).value)) < 1e-10 * got


def test_mt_at_shadow_pole_decays():
    k = 150.0
    assert abs(mt_leading_amplitude(CIRCLE, WaveConfig(k), 0.0)) < 1e-3 * k ** (2 / 3)


def test_region_magnitudes_in_one_trace():
    k = 150.0
    w = WaveConfig(k)
    th = 2 * np.pi * np.arange(2048) / 2048
    mod = np.abs(mt_leading_amplitude(CIRCLE, w, th))
    nw = n_dot_omega(CIRCLE, w, th)
    lit = mod[nw <= -0.5]
    assert np.all((lit > 0.8 * k) & (lit < 2.2 * k))
    band = mod[np.abs(k ** (1 / 3) * nw) <= 1]
    assert np.max(band) < 3 * k ** (2 / 3) and np.min(band) > 0.1 * k ** (2 / 3)
    assert mod[0] <= 1e-3 * k ** (2 / 3)


def test_envelope_is_continuous_across_shadow_boundary():
    w = WaveConfig(150.0)
    th = np.linspace(math.pi / 2 - 0.2, math.pi / 2 + 0.2, 20001)
    env = mt_leading_amplitude(CIRCLE, w, th) / incident_field(CIRCLE, w, th)
    jumps = np.abs(np.diff(env)) / np.abs(env[:-1])
    assert jumps.max() < 0.01
    # zeroed Kirchhoff has no such profile: its envelope collapses to 0 at the boundary
    kir = kirchhoff_current(CIRCLE, w, th) / incident_field(CIRCLE, w, th)
    assert np.min(np.abs(kir[th < math.pi / 2 - 1e-3])) == 0.0


def test_bt1_leading_matches_target_in_lit_region():
    for k in (100.0, 200.0, 400.0, 800.0):
        w = WaveConfig(k)
        th = deep_lit_grid(CIRCLE, w)
        target = bt1_current(CIRCLE, w, th)
        gap = np.max(np.abs(bt1_leading_amplitude(CIRCLE, w, th, CAL) - target) / np.abs(target))
        assert gap * k < 2.5


def test_bt1_leading_at_shadow_pole():
    k = 150.0
    w = WaveConfig(k)
    assert abs(bt1_leading_amplitude(CIRCLE, w, 0.0, CAL)) <= abs(bt1_current(CIRCLE, w, 0.0)) + 1e-3 * k ** (2 / 3)


# ------------------------------------------------------------ second order


def test_constant_coefficient_correction_closed_form():
    cfg = ExpansionConfig(leading_coeff_convention="kirchhoff", calibration=-1.0)
    k = 150.0
    w = WaveConfig(k)
    th = np.linspace(0.0, 2 * np.pi, 33)
    c = 1.0
    a = -1.0
    b = -a / (1j * k)
    tau = -(k ** (1 / 3)) * n_dot_omega(CIRCLE, w, th)
    psi0 = np.array([psi(t).value for t in tau])
    want = -0.5 * (c / (c**2 + k**2)) * (c**2 / 4) * (b - a / c) * k ** (2 / 3) * psi0 * incident_field(CIRCLE, w, th)
    got = bt2_leading_amplitude(CIRCLE, w, th, cfg) - bt1_leading_amplitude(CIRCLE, w, th, cfg)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(bt1_leading_amplitude(CIRCLE, w, th, cfg)))
    assert np.max(np.abs(got - want)) <= 1e-10 * np.max(np.abs(want))


@pytest.mark.parametrize("conv", ["kirchhoff", "calibrated"])
def test_second_order_correction_shrinks_at_least_like_inverse_k(conv):
    cfg = ExpansionConfig(leading_coeff_convention=conv)
    th = np.array([2.0, math.pi, 4.0])
    ratios = []
    for k in (100.0, 400.0):
        w = WaveConfig(k)
        lead = bt1_leading_amplitude(CIRCLE, w, th, cfg)
        ratios.append(np.abs(bt2_leading_amplitude(CIRCLE, w, th, cfg) - lead) / np.abs(lead))
    exponent = np.log(ratios[1] / ratios[0]) / np.log(4.0)
    assert np.all(exponent <= -1)


def test_second_order_uses_finite_differences_on_ellipse():
    # non-constant a_00 on an ellipse: the result must still be finite and close to first order
    w = WaveConfig(200.0)
    th = np.linspace(2.2, 4.1, 9)
    a = bt1_leading_amplitude(ELLIPSE, w, th, CAL)
    b = bt2_leading_amplitude(ELLIPSE, w, th, CAL)
    assert np.all(np.isfinite(b))
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-2


# ------------------------------------------------------------ propositions


def test_prop1_rate():
    ws = waves(100, 200, 400, 800)
    est = estimate_prop1(CIRCLE, ws, deep_lit_grid(CIRCLE, ws[0]), CAL)
    assert -1.3 <= est.rate <= -0.8
    assert est.fit.r_squared >= 0.95
    assert est.C > 0
    assert set(est.region_max) == {"illuminated"}


def test_prop1_reports_every_region_on_full_grid():
    ws = waves(100, 200, 400, 800)
    th = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    est = estimate_prop1(CIRCLE, ws, th, CAL)
    assert set(est.region_max) == {"illuminated", "shadow_boundary", "deep_shadow"}
    assert all(v.shape == (4,) for v in est.region_max.values())


def test_prop1_preconditions():
    th = np.array([math.pi])
    with pytest.raises(FitError):
        estimate_prop1(CIRCLE, waves(100), th)
    with pytest.raises(DomainError):
        estimate_prop1(CIRCLE, waves(10, 100, 200, 400), th)
    with pytest.raises(DomainError):
        estimate_prop1(CIRCLE, waves(100, 400, 200, 800), th)
    with pytest.raises(FitError):
        estimate_prop1(CIRCLE, waves(100, 200, 400, 800), np.array([0.0]))


def test_prop1_degenerate_zero_gap(monkeypatch):
    monkeypatch.setattr(ansatz, "bt1_leading_amplitude", lambda g, w, th, cfg: bt1_current(g, w, th))
    with pytest.raises(FitError):
        estimate_prop1(CIRCLE, waves(100, 200, 400, 800), np.array([math.pi]))


def test_prop2_ansatz_and_exact():
    ws = waves(50, 100, 200, 400)
    assert -0.1 <= estimate_prop2(CIRCLE, ws).rate <= 0.1
    assert -0.15 <= estimate_prop2(CIRCLE, ws, source="exact").rate <= 0.15


def test_prop2_errors():
    ws = waves(50, 100)
    with pytest.raises(DomainError):
        estimate_prop2(CIRCLE, ws, shadow_band_width=0.0)
    with pytest.raises(DomainError):
        estimate_prop2(CIRCLE, ws, shadow_band_width=1e-9, n_grid=63)
    with pytest.raises(ConfigError):
        estimate_prop2(ELLIPSE, ws, source="exact")
    with pytest.raises(FitError):
        estimate_prop2(CIRCLE, ws[:1])


def test_fit_power_law_exact_data():
    ks = np.array([10.0, 20.0, 40.0])
    f = fit_power_law(ks, 3.0 * ks**-1.5)
    assert abs(f.rate + 1.5) < 1e-12 and abs(f.constant - 3.0) < 1e-12 and abs(f.r_squared - 1) < 1e-12
    with pytest.raises(FitError):
        fit_power_law(ks, [1.0, 0.0, 1.0])
