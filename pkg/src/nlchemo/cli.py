"""Command line entry point: ``nlchemo {run,sweep,classify,check-inequality} --config FILE``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .errors import PreconditionError, SolverError
from .experiment import EXIT_OK, EXIT_USAGE, _attach_log, _detach_log, run_experiment, run_sweep
from .inequality import check_inequality
from .regimes import report_for_state

EXIT_INEQUALITY_VIOLATED = 2


def _parser():
    p = argparse.ArgumentParser(prog="nlchemo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "classify", "check-inequality"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, type=Path)
        s.add_argument("--out", type=Path, help="override output.directory")
        s.add_argument("--workers", type=int, help="parallel sweep points (overrides run.workers)")
        s.add_argument("--quiet", action="store_true")
    return p


def _say(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_run(cfg, args) -> int:
    cfg.require("grid", "params", "u0", "v0")
    out = args.out or Path(cfg.output.directory)
    _attach_log(out)
    try:
        result = run_experiment(cfg, out)
    finally:
        _detach_log()
    s = result.summary
    _say(args, f"regime {s['regime']['case']['tag']}, verdict {s['verdict']['overall']}, "
               f"blowup {s['blowup']['reason'] if s['blowup'] else 'none'} -> {out}")
    return result.exit_code


def cmd_sweep(cfg, args) -> int:
    cfg.require("grid", "params", "u0", "v0")
    if not cfg.sweep:
        raise ConfigError(["sweep: section required for this command"])
    out = args.out or Path(cfg.output.directory)
    workers = args.workers or cfg.run.workers
    rows = run_sweep(cfg, out, workers)
    _say(args, f"{len(rows)} sweep points -> {out / 'atlas.csv'}")
    return EXIT_OK


def cmd_classify(cfg, args) -> int:
    cfg.require("grid", "params", "u0", "v0")
    u0, v0 = cfg.initial_fields()
    report = report_for_state(cfg.params, u0, v0, n=cfg.classification_dim(), cp_user=cfg.cp_user)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_check_inequality(cfg, args) -> int:
    cfg.require("inequality")
    iq = cfg.inequality
    result = check_inequality(iq.q, iq.r, iq.n, iq.samples, iq.eps, iq.cells, iq.seed)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return EXIT_INEQUALITY_VIOLATED if result.violated else EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "check-inequality": cmd_check_inequality,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be ≥ 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    sys.exit(main())
