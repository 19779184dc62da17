"""Monitored quantities along a run and the pass/fail verdict against the bounds."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .grid import norms
from .model import State
from .regimes import RegimeReport

V_SUP_RTOL = 1e-10
MONOTONE_SLACK = 1e-12
DEFAULT_TOL = 0.02

FIXED_COLUMNS = ("t", "mass", "u_sup", "u_min", "v_sup", "v_min", "dt", "clipped_mass_cum")


def default_ks(n: int) -> list:
    return sorted({1, 2, n + 3})


@dataclass(frozen=True)
class DiagnosticRecord:
    t: float
    mass: float
    lk_norms: dict
    u_sup: float
    u_min: float
    v_sup: float
    v_min: float
    dt: float
    clipped_mass_cum: float


def record(state: State, ks, dt=0.0, clipped=0.0) -> DiagnosticRecord:
    nu = norms(state.u, ks)
    nv = norms(state.v, ())
    return DiagnosticRecord(
        t=float(state.t),
        mass=state.u.sum(),
        lk_norms=dict(nu.lk),
        u_sup=nu.sup,
        u_min=nu.min,
        v_sup=nv.sup,
        v_min=nv.min,
        dt=float(dt),
        clipped_mass_cum=float(clipped),
    )


class Recorder:
    """Observer for :func:`nlchemo.stepper.run` that collects records."""

    def __init__(self, ks):
        self.ks = list(ks)
        self.records: list[DiagnosticRecord] = []

    def __call__(self, state, dt, clipped):
        self.records.append(record(state, self.ks, dt, clipped))


@dataclass(frozen=True)
class Check:
    name: str
    bound: float
    observed_max: float
    passed: bool
    margin: float


@dataclass
class Verdict:
    checks: list[Check]
    tol: float
    overall: bool = field(init=False)

    def __post_init__(self):
        self.overall = all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "overall": "pass" if self.overall else "fail",
            "tol": self.tol,
            "checks": [
                {
                    "name": c.name,
                    "bound": c.bound,
                    "observed_max": c.observed_max,
                    "result": "pass" if c.passed else "fail",
                    "margin": c.margin,
                }
                for c in self.checks
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verdict(records, report: RegimeReport, tol=DEFAULT_TOL) -> Verdict:
    """Compare a time-sorted trajectory against the analytic bounds in ``report``."""
    if not records:
        raise PreconditionError("verdict needs a nonempty trajectory")
    t = np.array([r.t for r in records])
    if np.any(np.diff(t) < 0):
        raise PreconditionError("trajectory records are not sorted by time")
    mass = np.array([r.mass for r in records])
    v_sup = np.array([r.v_sup for r in records])
    u_min = np.array([r.u_min for r in records])
    checks = []

    if report.mass_bound_m0 is not None:
        bound = report.mass_bound_m0 * (1 + tol)
        obs = float(mass.max())
        checks.append(Check("mass_bound", bound, obs, obs <= bound, bound - obs))

    bound = report.v_sup_bound * (1 + V_SUP_RTOL)
    obs = float(v_sup.max())
    checks.append(Check("v_sup_bound", bound, obs, obs <= bound, bound - obs))

    low = float(u_min.min())
    checks.append(Check("u_nonnegative", 0.0, -low, low >= 0.0, low))

    rise = float(np.max(np.diff(v_sup), initial=0.0))
    checks.append(Check("v_sup_nonincreasing", MONOTONE_SLACK, rise,
                        rise <= MONOTONE_SLACK, MONOTONE_SLACK - rise))
    return Verdict(checks, tol)


def mass_descent_violations(records, y1, slack_rate):
    """Indices i where mass_i > y1 but mass_{i+1} exceeds mass_i by more than
    ``2 * dt_{i+1} * slack_rate``; the discrete analogue of the comparison
    argument that caps the mass."""
    bad = []
    for i in range(len(records) - 1):
        cur, nxt = records[i], records[i + 1]
        if cur.mass > y1 and nxt.mass - cur.mass > 2.0 * nxt.dt * slack_rate:
            bad.append(i)
    return bad


def lk_columns(records) -> list:
    ks = set()
    for r in records:
        ks.update(r.lk_norms)
    return sorted(ks)


def _k_label(k) -> str:
    k = float(k)
    return f"L{int(k)}" if k.is_integer() else f"L{k!r}"


def series_csv(records) -> str:
    ks = lk_columns(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(FIXED_COLUMNS) + [_k_label(k) for k in ks])
    for r in records:
        row = [getattr(r, c) for c in FIXED_COLUMNS] + [r.lk_norms.get(k, "") for k in ks]
        w.writerow([repr(float(x)) if x != "" else "" for x in row])
    return buf.getvalue()


def write_series(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(series_csv(records))
