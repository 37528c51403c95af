import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest

from surfcurrent.errors import ConfigError, DomainError
from surfcurrent.geometry import EPS_REGION
from surfcurrent.harness import (
    ExperimentConfig,
    dump_psi_table,
    load_config,
    parse_config,
    run_sweep,
    run_trace,
    theta_where,
    validate,
    with_overrides,
)

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def figure_trace():
    return run_trace(ExperimentConfig())


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# ------------------------------------------------------------ config


def test_parse_full_config():
    cfg = parse_config(
        """
        # comment line
        geometry.kind = ellipse   # trailing comment
        geometry.a = 2
        geometry.b = 1
        wave.k = 80
        wave.omega_deg = 45
        trace.samples = 128
        trace.kinds = kirchhoff, bt1
        trace.kirchhoff_mode = extended
        sweep.k_list = 50, 100
        ansatz.convention = kirchhoff
        fock.tau_switch = 9
        region.epsilon = 0.1
        """
    )
    assert cfg.geometry().kind == "ellipse" and cfg.geometry().a == 2.0
    assert cfg.kinds == ("kirchhoff", "bt1") and cfg.k_list == (50.0, 100.0)
    assert cfg.kirchhoff_mode == "extended" and cfg.tau_switch == 9.0 and cfg.epsilon == 0.1
    assert abs(cfg.wave().omega[0] - math.sqrt(0.5)) < 1e-15


def test_empty_config_gives_defaults():
    assert parse_config("") == ExperimentConfig()
    assert load_config(None) == ExperimentConfig()


@pytest.mark.parametrize(
    "text",
    [
        "wave.k = 1\nwave.k = 2",
        "wave.frequency = 3",
        "wave.k",
        "wave.k = fast",
        "wave.k = -1",
        "trace.kinds = exact, magic",
        "trace.kinds = bt1, bt1",
        "geometry.kind = square",
        "geometry.kind = ellipse\ngeometry.a = 1",
        "ansatz.convention = half",
        "region.epsilon = 0.7",
        "trace.kirchhoff_mode = sometimes",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_overrides():
    cfg = with_overrides(ExperimentConfig(), k=90, kinds=["bt1"])
    assert cfg.k == 90.0 and cfg.kinds == ("bt1",)
    assert with_overrides(cfg) is cfg


# ------------------------------------------------------------ traces


def test_golden_trace():
    cfg = load_config(GOLDEN / "small.cfg")
    got = rows(run_trace(cfg).to_csv())
    want = rows((GOLDEN / "small_trace.csv").read_text())
    assert got[0] == want[0]
    assert len(got) == len(want) == 65
    for g, w in zip(got[1:], want[1:]):
        assert g[2] == w[2]
        num_g = np.array([float(v) for i, v in enumerate(g) if i != 2])
        num_w = np.array([float(v) for i, v in enumerate(w) if i != 2])
        assert np.allclose(num_g, num_w, rtol=1e-12, atol=1e-12)


def test_trace_schema(figure_trace):
    assert figure_trace.header() == [
        "theta", "n_dot_omega", "region",
        "exact_re", "exact_im", "exact_abs",
        "kirchhoff_re", "kirchhoff_im", "kirchhoff_abs",
        "bt1_re", "bt1_im", "bt1_abs",
    ]


def test_trace_is_deterministic(figure_trace):
    assert run_trace(ExperimentConfig()).to_csv() == figure_trace.to_csv()


def test_trace_text_round_trips(figure_trace):
    table = rows(figure_trace.to_csv())[1:]
    re = np.array([float(r[3]) for r in table])
    assert np.array_equal(re, figure_trace.values["exact"].real)


def test_trace_invariants(figure_trace):
    t = figure_trace
    assert np.all(np.diff(t.theta) > 0)
    assert t.theta.size == 2048
    for kind in t.values:
        assert np.all(np.isfinite(t.modulus(kind)))
    nw = t.n_dot_omega
    assert np.array_equal(t.mask("illuminated"), nw < -EPS_REGION)
    assert np.array_equal(t.mask("deep_shadow"), nw > EPS_REGION)
    assert np.array_equal(t.mask("shadow_boundary"), np.abs(nw) <= EPS_REGION)


def test_figure_trace_lit_ratio(figure_trace):
    t = figure_trace
    lit = t.n_dot_omega <= -0.3
    ratio = t.modulus("kirchhoff")[lit] / t.modulus("exact")[lit]
    assert np.all((ratio >= 0.9) & (ratio <= 1.1))


def test_figure_trace_shadow_pole(figure_trace):
    t = figure_trace
    pole = int(np.argmax(t.n_dot_omega))
    assert t.modulus("bt1")[pole] <= 1.0
    assert t.modulus("exact")[pole] <= 1.0


def test_extended_kirchhoff_in_deep_shadow():
    t = run_trace(ExperimentConfig(kinds=("kirchhoff",), kirchhoff_mode="extended"))
    ds = t.mask("deep_shadow")
    assert np.allclose(t.modulus("kirchhoff")[ds], 2 * 150.0 * np.abs(t.n_dot_omega[ds]), rtol=1e-12)


def test_trace_preconditions():
    with pytest.raises(ConfigError):
        run_trace(ExperimentConfig(samples=32))
    with pytest.raises(ConfigError):
        run_trace(ExperimentConfig(geometry_kind="ellipse", a=2.0, b=1.0, kinds=("exact",)))
    with pytest.raises(ConfigError):
        run_trace(ExperimentConfig(kinds=()))


def test_ellipse_trace_all_approximations():
    kinds = ("kirchhoff", "bt1", "bt2_2d", "bt2_3d_form", "ansatz_mt", "ansatz_bt1", "ansatz_bt2")
    t = run_trace(ExperimentConfig(geometry_kind="ellipse", a=1.5, b=1.0, k=60.0, samples=64, kinds=kinds))
    assert list(t.values) == list(kinds)


# ------------------------------------------------------------ sweeps


def test_theta_where():
    cfg = ExperimentConfig(omega_deg=40.0)
    th = theta_where(cfg.geometry(), cfg.wave(), 0.0)
    assert abs(math.cos(th - math.radians(40.0))) < 1e-14


def test_sweep_small():
    res = run_sweep(ExperimentConfig(k_list=(50.0, 100.0, 200.0, 400.0)))
    assert -0.15 <= res.fits["prop2.band_sup.ansatz"][0] <= 0.15
    assert -0.15 <= res.fits["prop2.band_sup.exact"][0] <= 0.15
    assert res.fits["prop1.rel_gap"][0] <= -0.8
    assert abs(res.fits["envelope_rel_slope.exact.shadow_boundary"][0] - 1 / 3) < 0.25
    table = rows(res.to_csv())
    assert table[0] == ["section", "quantity", "k", "value"]
    assert {r[0] for r in table[1:]} <= {"per_k", "fit", "note"}
    assert res.to_csv() == run_sweep(ExperimentConfig(k_list=(50.0, 100.0, 200.0, 400.0))).to_csv()


def test_sweep_prop1_rate_on_default_ks():
    res = run_sweep(ExperimentConfig())
    rate, _, r2 = res.fits["prop1.rel_gap"]
    assert rate <= -0.8 and r2 >= 0.95
    assert np.all(np.diff(res.ks) > 0)


def test_sweep_notes_and_errors():
    res = run_sweep(ExperimentConfig(geometry_kind="ellipse", a=1.2, b=1.0, k_list=(20.0, 40.0)))
    assert any("prop1 skipped" in n for n in res.notes)
    assert any("circle only" in n for n in res.notes)
    with pytest.raises(ConfigError):
        run_sweep(ExperimentConfig(k_list=(100.0,)))
    with pytest.raises(ConfigError):
        run_sweep(ExperimentConfig(k_list=(200.0, 100.0)))


# ------------------------------------------------------------ Psi table


def test_psi_table_rows():
    table = dump_psi_table(-10.0, 20.0, 0.5)
    for l in (0, 1, 2):
        rs = table.for_order(l)
        assert len(rs) == 61
        assert all(np.isfinite(r.value) and r.err_estimate >= 0 for r in rs)
    at10 = [r for r in table.for_order(0) if r.tau == 10.0][0]
    assert abs(at10.value / (-2j * 10.0) - 1) < 0.05
    assert at10.path == "asymptotic"
    text = table.to_csv()
    assert text.splitlines()[0] == "l,tau,re,im,abs,path,err_estimate"
    assert len(text.splitlines()) == 1 + 3 * 61
    assert text == dump_psi_table(-10.0, 20.0, 0.5).to_csv()


@pytest.mark.parametrize("args", [(-10.0, 20.0, 0.0), (-10.0, 20.0, -1.0), (-21.0, 0.0, 1.0), (0.0, 51.0, 1.0), (5.0, 1.0, 1.0)])
def test_psi_table_errors(args):
    with pytest.raises(DomainError):
        dump_psi_table(*args)


# ------------------------------------------------------------ validate


def test_validate_default_passes_and_is_deterministic():
    results, report = validate(ExperimentConfig())
    assert all(r.passed for r in results), report
    assert report.endswith(f"{len(results)} passed, 0 failed\n")
    assert validate(ExperimentConfig())[1] == report


def test_validate_reports_failures_instead_of_raising():
    results, report = validate(ExperimentConfig(k_list=(100.0, 100.5)))
    assert not all(r.passed for r in results)
    assert "FAIL" in report
