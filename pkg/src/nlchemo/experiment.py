"""Run one configured experiment end to end and write its output files.

Data files (series.csv, summary.json, atlas.csv) carry no wall-clock
content, so identical configs give byte-identical files. Timestamps go to
run.log only.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import PARAM_KEYS, ExperimentConfig
from .diagnostics import Recorder, verdict, write_series
from .model import Params, State, validate
from .regimes import Regime, report_for_state
from .stepper import run
from .svgplot import line_chart

log = logging.getLogger("nlchemo")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERDICT_FAIL = 2
EXIT_BLOWUP_IN_REGIME = 3

CLIP_AUDIT_RATIO = 1e-6

OUTSIDE_NOTE = (
    "detector firings outside the proven regimes are observations, "
    "not confirmations of blow-up"
)


@dataclass
class Outcome:
    exit_code: int
    summary: dict
    records: list


def _digest(state: State) -> dict:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(state.u.values).tobytes())
    h.update(np.ascontiguousarray(state.v.values).tobytes())
    u, v = state.u.values, state.v.values
    return {
        "t": float(state.t),
        "mass": state.u.sum(),
        "u_sup": float(u.max()),
        "u_min": float(u.min()),
        "v_sup": float(v.max()),
        "v_min": float(v.min()),
        "sha256": h.hexdigest(),
    }


def _exit_code(regime: Regime, blew_up: bool, passed: bool) -> int:
    if not regime.bounded:
        return EXIT_OK
    if blew_up:
        return EXIT_BLOWUP_IN_REGIME
    return EXIT_OK if passed else EXIT_VERDICT_FAIL


def run_experiment(cfg: ExperimentConfig, outdir, plot=None) -> Outcome:
    """classify, integrate, judge; write series.csv, summary.json and (optionally) norms.svg."""
    cfg.require("grid", "params", "u0", "v0")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    u0, v0 = cfg.initial_fields()
    report = report_for_state(cfg.params, u0, v0, n=cfg.classification_dim(), cp_user=cfg.cp_user)
    log.info("regime %s: %s", report.case.tag.value, report.case.details)

    rec = Recorder(cfg.ks())
    result = run(State(u0, v0), cfg.params, cfg.stepper, cfg.run.horizon, rec, cfg.run.record_every)
    judged = verdict(rec.records, report, cfg.run.tol)
    code = _exit_code(report.case.tag, result.blew_up, judged.overall)
    log.info("finished: steps=%d t=%.6g blowup=%s verdict=%s exit=%d", result.steps,
             result.state.t, result.blowup, "pass" if judged.overall else "fail", code)

    notes = []
    if not (cfg.u0.neumann_exact and cfg.v0.neumann_exact):
        notes.append("Gaussian initial profile satisfies the zero-flux condition only approximately")
    if result.blew_up and not report.case.tag.bounded:
        notes.append(OUTSIDE_NOTE)
    initial_mass = u0.sum()
    if result.clipped_mass > CLIP_AUDIT_RATIO * initial_mass:
        notes.append(f"clipped mass {result.clipped_mass:.3g} exceeds {CLIP_AUDIT_RATIO:g} x initial mass "
                     f"{initial_mass:.3g}; positivity needed correction")
    summary = {
        "params": cfg.params.to_dict(),
        "grid": {"extents": list(cfg.grid.extents), "cells": list(cfg.grid.cells)},
        "initial": {"u0": cfg.u0.to_dict(), "v0": cfg.v0.to_dict()},
        "stepper": cfg.stepper.to_dict(),
        "horizon": cfg.run.horizon,
        "regime": report.to_dict(),
        "verdict": judged.to_dict(),
        "terminal": _digest(result.state),
        "steps": result.steps,
        "clipped_mass_total": result.clipped_mass,
        "blowup": result.blowup.to_dict() if result.blowup else None,
        "exit_code": code,
        "notes": notes,
    }
    write_series(outdir / "series.csv", rec.records)
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    if cfg.output.plot if plot is None else plot:
        recs = rec.records
        t = [r.t for r in recs]
        svg = line_chart(
            {"mass": (t, [r.mass for r in recs]),
             "sup u": (t, [r.u_sup for r in recs]),
             "sup v": (t, [r.v_sup for r in recs])},
            log_y=cfg.output.log_scale,
            title=f"{report.case.tag.value}",
        )
        (outdir / "norms.svg").write_text(svg, encoding="utf-8")
    return Outcome(code, summary, rec.records)


def _render(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def sweep_points(cfg: ExperimentConfig):
    """Cartesian product of the sweep lists, in config key order."""
    keys = list(cfg.sweep)
    for combo in itertools.product(*(cfg.sweep[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        slug = "_".join(f"{k}={_render(v)}" for k, v in overrides.items())
        yield slug, overrides


def _sweep_point(args):
    cfg, slug, overrides, outdir = args
    params = Params(**{**cfg.params.to_dict(), **overrides})
    point = replace(cfg, params=params)
    _attach_log(Path(outdir) / slug)
    try:
        out = run_experiment(point, Path(outdir) / slug)
    finally:
        _detach_log()
    recs = out.records
    return {
        "slug": slug,
        **{k: _render(v) for k, v in params.to_dict().items()},
        "regime": out.summary["regime"]["case"]["tag"],
        "verdict": out.summary["verdict"]["overall"],
        "max_mass": repr(float(max(r.mass for r in recs))),
        "blowup": "yes" if out.summary["blowup"] else "no",
        "exit_code": str(out.exit_code),
    }


ATLAS_COLUMNS = ("slug",) + PARAM_KEYS + ("regime", "verdict", "max_mass", "blowup", "exit_code")


def run_sweep(cfg: ExperimentConfig, outdir, workers=1) -> list[dict]:
    points = list(sweep_points(cfg))
    if not cfg.sweep or not points:
        raise ValueError("sweep: the parameter product is empty")
    for slug, overrides in points:
        problems = validate(Params(**{**cfg.params.to_dict(), **overrides}))
        if problems:
            raise ValueError(f"sweep point {slug}: invalid parameters ({', '.join(problems)})")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, slug, ov, str(outdir)) for slug, ov in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ATLAS_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    (outdir / "atlas.csv").write_text(buf.getvalue(), encoding="utf-8")
    return rows


_handlers = []


def _attach_log(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(directory / "run.log", mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("nlchemo")
    root.setLevel(logging.INFO)
    root.addHandler(handler)
    _handlers.append(handler)


def _detach_log():
    handler = _handlers.pop()
    logging.getLogger("nlchemo").removeHandler(handler)
    handler.close()
