import csv
import io
import json

import numpy as np
import pytest

from nlchemo.diagnostics import (
    FIXED_COLUMNS,
    DiagnosticRecord,
    Recorder,
    default_ks,
    mass_descent_violations,
    record,
    series_csv,
    verdict,
)
from nlchemo.errors import PreconditionError
from nlchemo.grid import Grid
from nlchemo.model import Params, SourceMode, State
from nlchemo.regimes import Regime, RegimeCase, RegimeReport, mass_threshold
from nlchemo.stepper import StepperConfig, run


def rec(t=0.0, mass=0.0, v_sup=0.0, u_min=0.0, dt=0.0, lk=None):
    return DiagnosticRecord(t, mass, lk or {}, 0.0, u_min, v_sup, 0.0, dt, 0.0)


def report(m0=None, vsup=0.0):
    tag = Regime.CASE_1B if m0 is not None else Regime.OUTSIDE_THEOREM
    return RegimeReport(RegimeCase(tag, ""), m0, vsup, None, 1, 1.0)


def test_constant_field_record():
    g = Grid.interval(1.0, 16)
    r = record(State(g.constant(1.0), g.constant(0.5)), [2])
    assert r.mass == 1.0 and r.lk_norms[2] == 1.0
    assert r.u_sup == r.u_min == 1.0 and r.v_sup == 0.5


def test_zero_field_record():
    g = Grid.interval(1.0, 16)
    r = record(State(g.constant(0.0), g.constant(0.0)), default_ks(1))
    assert r.mass == 0 and r.u_sup == 0 and all(v == 0 for v in r.lk_norms.values())


def test_lk_of_constant_two():
    g = Grid.interval(1.0, 8)
    assert record(State(g.constant(2.0), g.constant(0.0)), [3]).lk_norms[3] == pytest.approx(2.0, rel=1e-15)


def test_default_ks():
    assert default_ks(1) == [1, 2, 4]
    assert default_ks(2) == [1, 2, 5]


def test_verdict_pass_with_margin():
    v = verdict([rec(0, 0.5, 1.0), rec(1, 1.4, 1.0), rec(2, 1.2, 0.9)], report(2.0, 1.0), tol=0.0)
    assert v.overall
    mass = v.checks[0]
    assert mass.name == "mass_bound" and mass.margin == pytest.approx(0.6)


def test_verdict_v_sup_violation():
    v = verdict([rec(0, v_sup=1.0), rec(1, v_sup=2.0)], report(vsup=1.0))
    assert not v.overall
    assert "v_sup_bound" in v.failed() and "v_sup_nonincreasing" in v.failed()


def test_verdict_single_zero_record():
    v = verdict([rec()], report())
    assert v.overall and [c.name for c in v.checks] == ["v_sup_bound", "u_nonnegative", "v_sup_nonincreasing"]


def test_verdict_negative_u_fails():
    assert verdict([rec(u_min=-1e-3)], report()).failed() == ["u_nonnegative"]


def test_verdict_tolerance_applies_to_mass_only():
    recs = [rec(0, 1.015)]
    assert verdict(recs, report(1.0), tol=0.02).overall
    assert not verdict(recs, report(1.0), tol=0.01).overall


def test_verdict_preconditions():
    with pytest.raises(PreconditionError):
        verdict([], report())
    with pytest.raises(PreconditionError):
        verdict([rec(1.0), rec(0.5)], report())


def test_verdict_json_round_trip():
    v = verdict([rec(0, 0.5, 1.0)], report(1.0, 1.0))
    d = json.loads(v.to_json())
    assert d["overall"] == "pass" and d["checks"][0]["result"] == "pass"


def test_verdict_order_independent_without_monotone_check():
    recs = [rec(0, 0.3, 1.0), rec(1, 0.9, 1.0), rec(2, 0.6, 1.0)]
    a = verdict(recs, report(1.0, 1.0))
    b = verdict([recs[0], rec(1, 0.6, 1.0), rec(2, 0.9, 1.0)], report(1.0, 1.0))
    assert a.checks[0].observed_max == b.checks[0].observed_max


def test_series_csv_layout():
    recs = [rec(0, 1.0, lk={4: 1.0, 1: 2.0}), rec(0.5, 1.1, lk={4: 1.5, 1: 2.5})]
    rows = list(csv.reader(io.StringIO(series_csv(recs))))
    assert rows[0] == list(FIXED_COLUMNS) + ["L1", "L4"]
    assert rows[2][0] == "0.5" and rows[2][-1] == "1.5"


def test_mass_descent_structure_on_growth_run():
    # beta > alpha: once the mass sits above y1 it must not grow
    g = Grid.interval(1.0, 64)
    p = Params(1.0, 1.0, 1.0, 1.0, 2.0, 1.0, SourceMode.GROWTH_DAMPENING)
    u0 = g.sample(lambda x: 3 + np.cos(np.pi * x))
    v0 = g.sample(lambda x: 1 + 0.5 * np.cos(np.pi * x))
    r = Recorder([1])
    run(State(u0, v0), p, StepperConfig(), 2.0, r)
    y1 = mass_threshold(p, 1.0)
    assert r.records[0].mass > y1
    scale = p.a * max(x.u_sup for x in r.records) ** p.alpha
    assert mass_descent_violations(r.records, y1, scale) == []


def test_mass_descent_flags_growth():
    recs = [rec(0, 2.0, dt=0.1), rec(0.1, 3.0, dt=0.1)]
    assert mass_descent_violations(recs, 1.0, 1.0) == [0]
    assert mass_descent_violations(recs, 1.0, 10.0) == []
