import csv
import io
import json
import math

import pytest

from edweibull.channel import WeibullChannel
from edweibull.detector import DetectorConfig, avg_pd_weibull_quadrature
from edweibull.errors import DomainError
from edweibull.sweep import (
    COLUMNS,
    RocPoint,
    SweepSpec,
    log_pf_grid,
    run_comp_roc,
    run_pd_vs_snr,
    run_sweep,
    snr_grid,
    write_csv,
    write_json,
)


def _check_point(p):
    assert 0.0 <= p.pd <= 1.0 and 0.0 <= p.pm <= 1.0 and 0.0 < p.pf < 1.0
    assert abs(p.pm - (1.0 - p.pd)) <= 1e-15


def _by_a(points):
    curves = {}
    for p in points:
        curves.setdefault(p.a, []).append(p)
    return curves


# --- grids and specs ------------------------------------------------------------------

def test_snr_grid_is_inclusive():
    assert snr_grid(-10.0, 30.0, 0.5)[0] == -10.0
    assert snr_grid(-10.0, 30.0, 0.5)[-1] == 30.0
    assert len(snr_grid(-10.0, 30.0, 0.5)) == 81
    assert snr_grid(0.0, 1.0, 0.3) == [0.0, 0.3, 0.6, 0.9]
    assert snr_grid(5.0, 5.0, 1.0) == [5.0]


def test_default_pf_grid():
    grid = log_pf_grid()
    assert len(grid) == 50
    assert grid[0] == pytest.approx(1e-3, rel=1e-14)
    assert grid[-1] == pytest.approx(0.999, rel=1e-14)
    assert all(x < y for x, y in zip(grid, grid[1:]))


def test_spec_defaults():
    spec = SweepSpec("pd_vs_snr")
    assert spec.snr_db_range == (-10.0, 30.0, 0.5)
    assert spec.pf_fixed == 0.1 and spec.u == 5
    assert spec.engine == "analytic"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "roc"},
        {"kind": "pd_vs_snr", "u": 0},
        {"kind": "pd_vs_snr", "a_values": ()},
        {"kind": "pd_vs_snr", "a_values": (1.0, -2.0)},
        {"kind": "pd_vs_snr", "pf_fixed": 1.0},
        {"kind": "pd_vs_snr", "snr_db_range": (0.0, 10.0, 0.0)},
        {"kind": "pd_vs_snr", "snr_db_range": (10.0, 0.0, 1.0)},
        {"kind": "comp_roc", "pf_grid": ()},
        {"kind": "comp_roc", "pf_grid": (0.1, 1.0)},
        {"kind": "comp_roc", "engine": "exact"},
        {"kind": "comp_roc", "method": "simpson"},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(DomainError):
        SweepSpec(**kwargs)


def test_runners_check_kind():
    with pytest.raises(DomainError):
        run_pd_vs_snr(SweepSpec("comp_roc"))
    with pytest.raises(DomainError):
        run_comp_roc(SweepSpec("pd_vs_snr"))


# --- detection probability against SNR ----------------------------------------------------

def test_single_point_near_zero_snr():
    spec = SweepSpec("pd_vs_snr", a_values=(2.0,), snr_db_range=(-120.0, -120.0, 1.0))
    (p,) = run_pd_vs_snr(spec)
    assert abs(p.pd - 0.1) <= 1e-8
    assert p.snr_db == -120.0 and p.a == 2.0


def test_points_in_lexicographic_order():
    spec = SweepSpec("pd_vs_snr", a_values=(2.0, 0.5), snr_db_range=(0.0, 2.0, 1.0))
    pts = run_pd_vs_snr(spec)
    assert [(p.a, p.snr_db) for p in pts] == [
        (2.0, 0.0), (2.0, 1.0), (2.0, 2.0), (0.5, 0.0), (0.5, 1.0), (0.5, 2.0)
    ]
    for p in pts:
        _check_point(p)
        assert p.kind == "pd_vs_snr" and p.pf == 0.1


def test_curves_nondecreasing_in_snr():
    spec = SweepSpec("pd_vs_snr", a_values=(0.5, 1.0, 2.0, 3.5), snr_db_range=(-10.0, 30.0, 1.0))
    for curve in _by_a(run_pd_vs_snr(spec)).values():
        pds = [p.pd for p in curve]
        assert all(y >= x - 1e-12 for x, y in zip(pds, pds[1:]))


def _ordered_by_a(points):
    curves = _by_a(points)
    a_sorted = sorted(curves)
    for lo, hi in zip(a_sorted, a_sorted[1:]):
        for p_lo, p_hi in zip(curves[lo], curves[hi]):
            if p_hi.pd < p_lo.pd:
                return False
    return True


def test_milder_fading_detects_better_from_0db():
    spec = SweepSpec("pd_vs_snr", a_values=(1.0, 2.0, 3.0), snr_db_range=(0.0, 30.0, 0.5))
    assert _ordered_by_a(run_pd_vs_snr(spec))


def test_milder_fading_detects_better_from_3db():
    spec = SweepSpec("pd_vs_snr", a_values=(1.0, 2.0, 3.0), snr_db_range=(3.0, 30.0, 0.5))
    assert _ordered_by_a(run_pd_vs_snr(spec))


def test_severity_crossover_near_0db():
    # at low SNR a deep-fading channel occasionally gives a large SNR draw,
    # which pushes its average detection probability above milder channels
    spec = SweepSpec("pd_vs_snr", a_values=(2.0, 3.0), snr_db_range=(0.0, 0.0, 1.0))
    p2, p3 = run_pd_vs_snr(spec)
    assert p2.pd == pytest.approx(0.208935, abs=2e-6)
    assert p3.pd == pytest.approx(0.207733, abs=2e-6)


def test_high_snr_mild_fading_nearly_certain():
    spec = SweepSpec("pd_vs_snr", a_values=(3.0,), snr_db_range=(30.0, 30.0, 1.0))
    (p,) = run_pd_vs_snr(spec)
    q = avg_pd_weibull_quadrature(DetectorConfig.from_pf(5, 0.1), WeibullChannel.from_db(3.0, 30.0))
    assert p.pd > 0.99 and q.value > 0.99
    assert abs(p.pd - q.value) <= 1e-8


# --- complementary ROC --------------------------------------------------------------------

def test_comp_roc_tends_to_zero_missed_detection():
    spec = SweepSpec("comp_roc", a_values=(1.0, 3.0), snr_db_fixed=0.0, pf_grid=(0.999999,))
    for p in run_comp_roc(spec):
        assert p.pm < 1e-4


@pytest.mark.parametrize("snr_db,reported", [(-5.0, 0.78), (10.0, 0.41)])
def test_comp_roc_reported_missed_detection(snr_db, reported):
    spec = SweepSpec("comp_roc", a_values=(1.0,), snr_db_fixed=snr_db, pf_grid=(0.2,))
    (p,) = run_comp_roc(spec)
    assert abs(p.pm - reported) <= 0.02


@pytest.mark.parametrize("snr_db", [-5.0, 10.0, 25.0])
def test_comp_roc_nonincreasing_in_pf(snr_db):
    spec = SweepSpec("comp_roc", a_values=(0.5, 1.0, 2.0, 5.0), snr_db_fixed=snr_db)
    pts = run_comp_roc(spec)
    assert len(pts) == 4 * 50
    for curve in _by_a(pts).values():
        _ = [_check_point(p) for p in curve]
        pms = [p.pm for p in curve]
        assert all(y <= x + 1e-12 for x, y in zip(pms, pms[1:]))


def test_threads_do_not_change_analytic_sweep():
    spec = SweepSpec("comp_roc", a_values=(1.0, 2.5), snr_db_fixed=5.0, pf_grid=log_pf_grid(n=8))
    assert run_sweep(spec, threads=1) == run_sweep(spec, threads=3)


# --- simulation engine ----------------------------------------------------------------------

def test_simulated_sweep_agrees_with_analytic():
    common = dict(a_values=(0.75, 2.0, 3.5), snr_db_range=(0.0, 20.0, 10.0))
    sim = run_pd_vs_snr(SweepSpec("pd_vs_snr", engine="simulate", trials=200_000, seed=3, **common))
    ana = run_pd_vs_snr(SweepSpec("pd_vs_snr", **common))
    assert len(sim) == len(ana) == 9
    for s, a in zip(sim, ana):
        assert s.method == "simulate"
        assert abs(s.pd - a.pd) <= max(3.0 * s.est_error, 1e-3), (s, a)


def test_simulated_sweep_is_deterministic():
    spec = SweepSpec("comp_roc", a_values=(1.0,), pf_grid=(0.05, 0.5), engine="simulate", trials=5000, seed=9)
    assert run_sweep(spec) == run_sweep(spec, threads=2)


# --- output formats -------------------------------------------------------------------------

def _sample_points():
    return [
        RocPoint("comp_roc", 5, 1.0, 10.0, 0.2, 13.441957575, 0.5889703, 0.4110297, "series", 1e-17),
        RocPoint("comp_roc", 5, 2.5, 10.0, 1.0 / 3.0, 11.0, 0.123456789012345, 0.876543210987655, "quadrature", 0.0),
    ]


def test_csv_layout():
    buf = io.StringIO()
    write_csv(_sample_points(), buf)
    text = buf.getvalue()
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0] == "kind,u,a,snr_db,pf,lambda,pd,pm,method,est_error"
    assert lines[-1] == ""
    assert lines[2] == "comp_roc,5,2.5,10,0.333333333333,11,0.123456789012,0.876543210988,quadrature,0"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == COLUMNS
    assert float(rows[0]["pm"]) == pytest.approx(0.4110297)


def test_json_layout():
    buf = io.StringIO()
    write_json(_sample_points(), buf)
    rows = json.loads(buf.getvalue())
    assert [tuple(r) for r in rows] == [COLUMNS, COLUMNS]
    assert rows[0]["u"] == 5 and rows[0]["method"] == "series"
    assert rows[1]["pf"] == 0.333333333333


def test_record_matches_columns():
    rec = _sample_points()[0].record()
    assert tuple(rec) == COLUMNS
    assert rec["lambda"] == 13.441957575


def test_csv_regenerates_identically():
    spec = SweepSpec("pd_vs_snr", a_values=(1.0, 2.0), snr_db_range=(-4.0, 4.0, 2.0))
    first, second = io.StringIO(), io.StringIO()
    write_csv(run_sweep(spec), first)
    write_csv(run_sweep(spec), second)
    assert first.getvalue() == second.getvalue()
