"""
Experiment configuration: a TOML document with fixed sections.

Every problem found is collected before anything is raised, so a single
:class:`ConfigError` lists all of them, each prefixed with its dotted path
(``params.alpha: must be ≥ 1``). Unknown keys are errors.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .diagnostics import DEFAULT_TOL, default_ks
from .grid import Field, Grid
from .model import Params, SourceMode, validate
from .stepper import StepperConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PARAM_KEYS = ("chi", "a", "b", "alpha", "beta", "gamma", "mode")
PROFILE_KEYS = {
    "CONSTANT": {"c"},
    "COSINE_BUMP": {"amplitude", "mean"},
    "GAUSSIAN": {"center", "width", "amplitude", "mass", "floor"},
}
SECTIONS = {"grid", "params", "initial", "stepper", "run", "sweep", "output", "inequality", "cp_user"}


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class Profile:
    """Named initial profile; see :func:`Profile.sample`."""

    kind: str
    c: float = 0.0
    amplitude: float | None = None
    mean: float = 0.0
    center: tuple | None = None
    width: float = 0.1
    mass: float | None = None
    floor: float = 0.0

    @property
    def neumann_exact(self) -> bool:
        """Gaussians satisfy the zero-flux condition only approximately."""
        return self.kind != "GAUSSIAN"

    def sample(self, grid: Grid) -> Field:
        if self.kind == "CONSTANT":
            return grid.constant(self.c)
        coords = grid.mesh()
        if self.kind == "COSINE_BUMP":
            bump = np.ones(grid.shape)
            for x, length in zip(coords, grid.extents):
                bump = bump * np.cos(np.pi * x / length)
            return grid.field(self.mean + self.amplitude * bump)
        center = self.center or tuple(e / 2 for e in grid.extents)
        r2 = sum((x - c) ** 2 for x, c in zip(coords, center))
        g = np.exp(-r2 / (2.0 * self.width**2))
        if self.mass is not None:
            amp = (self.mass - self.floor * grid.measure) / (g.sum() * grid.cell_volume)
        else:
            amp = self.amplitude
        return grid.field(self.floor + amp * g)

    def to_dict(self) -> dict:
        keys = {"CONSTANT": ("c",), "COSINE_BUMP": ("amplitude", "mean"),
                "GAUSSIAN": ("center", "width", "amplitude", "mass", "floor")}[self.kind]
        d = {"profile": self.kind, "neumann_compatible": "exact" if self.neumann_exact else "approximate"}
        for k in keys:
            value = getattr(self, k)
            if value is not None:
                d[k] = list(value) if isinstance(value, tuple) else value
        return d


@dataclass(frozen=True)
class RunSection:
    horizon: float = 1.0
    record_every: int = 1
    ks: tuple | None = None
    n: int | None = None
    tol: float = DEFAULT_TOL
    workers: int = 1


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    plot: bool = True
    log_scale: bool = False


@dataclass(frozen=True)
class InequalitySection:
    q: float
    r: float
    n: int
    samples: int = 200
    eps: tuple = (1.0, 0.1)
    cells: int = 256
    seed: int = 0


@dataclass
class ExperimentConfig:
    grid: Grid | None = None
    params: Params | None = None
    u0: Profile | None = None
    v0: Profile | None = None
    stepper: StepperConfig = field(default_factory=StepperConfig)
    run: RunSection = field(default_factory=RunSection)
    sweep: dict = field(default_factory=dict)
    output: OutputSection = field(default_factory=OutputSection)
    inequality: InequalitySection | None = None
    cp_user: float | None = None

    def ks(self) -> list:
        if self.run.ks is not None:
            return sorted(set(self.run.ks))
        return default_ks(self.classification_dim())

    def classification_dim(self) -> int:
        return self.run.n if self.run.n is not None else self.grid.dim

    def require(self, *sections):
        missing = [s for s in sections if getattr(self, s) is None]
        if missing:
            raise ConfigError([f"{s}: section required for this command" for s in missing])
        return self

    def initial_fields(self):
        return self.u0.sample(self.grid), self.v0.sample(self.grid)


class _Reader:
    """Pulls typed values out of nested dicts, recording errors by path."""

    def __init__(self):
        self.errors = []

    def err(self, path, msg):
        self.errors.append(f"{path}: {msg}")

    def table(self, doc, key, path=None):
        value = doc.get(key)
        path = path or key
        if value is None:
            return None
        if not isinstance(value, dict):
            self.err(path, "must be a section")
            return None
        return value

    def unknown(self, table, allowed, prefix):
        for key in table:
            if key not in allowed:
                self.err(f"{prefix}.{key}" if prefix else key, "unknown key")

    def number(self, table, key, path, default=None, required=False, integer=False):
        if key not in table:
            if required:
                self.err(path, "required")
            return default
        value = table[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.err(path, "must be a number")
            return default
        if integer and not (isinstance(value, int) or float(value).is_integer()):
            self.err(path, "must be an integer")
            return default
        if not math.isfinite(value):
            self.err(path, "must be finite")
            return default
        return int(value) if integer else float(value)

    def numbers(self, table, key, path, default=None, required=False, integer=False):
        if key not in table:
            if required:
                self.err(path, "required")
            return default
        value = table[key]
        if not isinstance(value, list):
            value = [value]
        out = []
        for i, item in enumerate(value):
            got = self.number({"x": item}, "x", f"{path}[{i}]", integer=integer)
            if got is None:
                return default
            out.append(got)
        return tuple(out)

    def string(self, table, key, path, default=None, choices=None):
        if key not in table:
            return default
        value = table[key]
        if not isinstance(value, str):
            self.err(path, "must be a string")
            return default
        if choices is not None and value.upper() not in choices:
            self.err(path, f"must be one of {', '.join(choices)}")
            return default
        return value.upper() if choices is not None else value

    def boolean(self, table, key, path, default):
        if key not in table:
            return default
        if not isinstance(table[key], bool):
            self.err(path, "must be true or false")
            return default
        return table[key]


def _syntax_error(exc) -> str:
    line = getattr(exc, "lineno", None)
    msg = getattr(exc, "msg", None) or str(exc)
    return f"syntax error at line {line}: {msg}" if line else f"syntax error: {msg}"


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text; raise :class:`ConfigError` on any problem."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([_syntax_error(exc)]) from None
    rd = _Reader()
    rd.unknown(doc, SECTIONS, "")
    cfg = ExperimentConfig()

    g = rd.table(doc, "grid")
    if g is not None:
        rd.unknown(g, {"dim", "extents", "cells"}, "grid")
        extents = rd.numbers(g, "extents", "grid.extents", required=True)
        cells = rd.numbers(g, "cells", "grid.cells", required=True, integer=True)
        dim = rd.number(g, "dim", "grid.dim", integer=True)
        ok = extents is not None and cells is not None
        if dim is not None and dim not in (1, 2):
            rd.err("grid.dim", "must be 1 or 2")
            ok = False
        if ok and len(extents) != len(cells):
            rd.err("grid.cells", "must have as many entries as grid.extents")
            ok = False
        if ok and dim is not None and dim != len(cells):
            rd.err("grid.dim", f"is {dim} but {len(cells)} cell counts given")
            ok = False
        if ok:
            for i, e in enumerate(extents):
                if e <= 0:
                    rd.err(f"grid.extents[{i}]", "must be > 0")
                    ok = False
            for i, c in enumerate(cells):
                if c < 4:
                    rd.err(f"grid.cells[{i}]", "must be ≥ 4")
                    ok = False
        if ok and len(cells) not in (1, 2):
            rd.err("grid.cells", "only 1D and 2D grids are supported")
            ok = False
        if ok:
            cfg.grid = Grid(extents, cells)

    pt = rd.table(doc, "params")
    if pt is not None:
        rd.unknown(pt, set(PARAM_KEYS), "params")
        values = {k: rd.number(pt, k, f"params.{k}", required=True) for k in PARAM_KEYS[:-1]}
        mode = rd.string(pt, "mode", "params.mode", choices=[m.value for m in SourceMode])
        if "mode" not in pt:
            rd.err("params.mode", "required")
        if mode is not None and all(v is not None for v in values.values()):
            params = Params(mode=mode, **values)
            problems = validate(params)
            for p in problems:
                name, constraint = p.split(" ", 1)
                rd.err(f"params.{name}", f"must be {constraint}")
            if not problems:
                cfg.params = params

    it = rd.table(doc, "initial")
    if it is not None:
        rd.unknown(it, {"u0", "v0"}, "initial")
        for name in ("u0", "v0"):
            prof = rd.table(it, name, f"initial.{name}")
            if prof is None:
                rd.err(f"initial.{name}", "required")
                continue
            setattr(cfg, name, _profile(rd, prof, f"initial.{name}", cfg.grid))

    st = rd.table(doc, "stepper")
    if st is not None:
        cfg.stepper = _stepper(rd, st)

    rt = rd.table(doc, "run")
    if rt is not None:
        rd.unknown(rt, {f.name for f in fields(RunSection)}, "run")
        horizon = rd.number(rt, "horizon", "run.horizon", 1.0)
        if horizon is not None and horizon <= 0:
            rd.err("run.horizon", "must be > 0")
        every = rd.number(rt, "record_every", "run.record_every", 1, integer=True)
        if every is not None and every < 1:
            rd.err("run.record_every", "must be ≥ 1")
        ks = rd.numbers(rt, "ks", "run.ks")
        if ks is not None and any(k < 1 for k in ks):
            rd.err("run.ks", "exponents must be ≥ 1")
        n = rd.number(rt, "n", "run.n", integer=True)
        if n is not None and n < 1:
            rd.err("run.n", "must be ≥ 1")
        tol = rd.number(rt, "tol", "run.tol", DEFAULT_TOL)
        if tol is not None and tol < 0:
            rd.err("run.tol", "must be ≥ 0")
        workers = rd.number(rt, "workers", "run.workers", 1, integer=True)
        if workers is not None and workers < 1:
            rd.err("run.workers", "must be ≥ 1")
        cfg.run = RunSection(horizon, every, ks, n, tol, workers)

    sw = rd.table(doc, "sweep")
    if sw is not None:
        rd.unknown(sw, set(PARAM_KEYS), "sweep")
        for key, values in sw.items():
            if key not in PARAM_KEYS:
                continue
            if not isinstance(values, list):
                rd.err(f"sweep.{key}", "must be a list of values")
                continue
            if key == "mode":
                parsed = [rd.string({"m": v}, "m", f"sweep.mode[{i}]",
                                    choices=[m.value for m in SourceMode]) for i, v in enumerate(values)]
            else:
                parsed = [rd.number({"x": v}, "x", f"sweep.{key}[{i}]") for i, v in enumerate(values)]
            cfg.sweep[key] = [p for p in parsed if p is not None]

    ot = rd.table(doc, "output")
    if ot is not None:
        rd.unknown(ot, {"directory", "plot", "log_scale"}, "output")
        cfg.output = OutputSection(
            rd.string(ot, "directory", "output.directory", "out"),
            rd.boolean(ot, "plot", "output.plot", True),
            rd.boolean(ot, "log_scale", "output.log_scale", False),
        )

    iq = rd.table(doc, "inequality")
    if iq is not None:
        rd.unknown(iq, {f.name for f in fields(InequalitySection)}, "inequality")
        q = rd.number(iq, "q", "inequality.q", required=True)
        r = rd.number(iq, "r", "inequality.r", required=True)
        n = rd.number(iq, "n", "inequality.n", required=True, integer=True)
        samples = rd.number(iq, "samples", "inequality.samples", 200, integer=True)
        eps = rd.numbers(iq, "eps", "inequality.eps", (1.0, 0.1))
        cells = rd.number(iq, "cells", "inequality.cells", 256, integer=True)
        seed = rd.number(iq, "seed", "inequality.seed", 0, integer=True)
        if n is not None and n < 1:
            rd.err("inequality.n", "must be ≥ 1")
        if samples is not None and samples < 1:
            rd.err("inequality.samples", "must be ≥ 1")
        if cells is not None and cells < 4:
            rd.err("inequality.cells", "must be ≥ 4")
        if eps is not None and any(e <= 0 for e in eps):
            rd.err("inequality.eps", "values must be > 0")
        if None not in (q, r, n):
            cfg.inequality = InequalitySection(q, r, n, samples, eps, cells, seed)

    if "cp_user" in doc:
        cp = rd.number(doc, "cp_user", "cp_user")
        if cp is not None and cp <= 0:
            rd.err("cp_user", "must be > 0")
        cfg.cp_user = cp

    if rd.errors:
        raise ConfigError(rd.errors)
    return cfg


def _profile(rd: _Reader, table, path, grid):
    kind = rd.string(table, "profile", f"{path}.profile", choices=list(PROFILE_KEYS))
    if "profile" not in table:
        rd.err(f"{path}.profile", "required")
    if kind is None:
        return None
    rd.unknown(table, PROFILE_KEYS[kind] | {"profile"}, path)
    n_err = len(rd.errors)
    if kind == "CONSTANT":
        c = rd.number(table, "c", f"{path}.c", required=True)
        if c is not None and c < 0:
            rd.err(f"{path}.c", "must be ≥ 0")
        prof = Profile(kind, c=c)
    elif kind == "COSINE_BUMP":
        amp = rd.number(table, "amplitude", f"{path}.amplitude", required=True)
        mean = rd.number(table, "mean", f"{path}.mean", required=True)
        if amp is not None and mean is not None and abs(amp) > mean:
            rd.err(f"{path}.amplitude", "|amplitude| must not exceed mean (profile must stay ≥ 0)")
        prof = Profile(kind, amplitude=amp, mean=mean)
    else:
        center = rd.numbers(table, "center", f"{path}.center")
        width = rd.number(table, "width", f"{path}.width", 0.1)
        amp = rd.number(table, "amplitude", f"{path}.amplitude")
        mass = rd.number(table, "mass", f"{path}.mass")
        floor = rd.number(table, "floor", f"{path}.floor", 0.0)
        if width is not None and width <= 0:
            rd.err(f"{path}.width", "must be > 0")
        if floor is not None and floor < 0:
            rd.err(f"{path}.floor", "must be ≥ 0")
        if (amp is None) == (mass is None):
            rd.err(f"{path}.amplitude", "give exactly one of amplitude or mass")
        if amp is not None and amp < 0:
            rd.err(f"{path}.amplitude", "must be ≥ 0")
        if mass is not None and grid is not None and floor is not None and mass < floor * grid.measure:
            rd.err(f"{path}.mass", "must be ≥ floor·|Ω| (profile must stay ≥ 0)")
        if center is not None and grid is not None and len(center) != grid.dim:
            rd.err(f"{path}.center", f"needs {grid.dim} coordinate(s)")
        prof = Profile(kind, amplitude=amp, center=center, width=width, mass=mass, floor=floor)
    return prof if len(rd.errors) == n_err else None


def _stepper(rd: _Reader, table):
    names = {f.name: f for f in fields(StepperConfig)}
    rd.unknown(table, set(names), "stepper")
    defaults = StepperConfig()
    kw = {}
    choices = {
        "clip_policy": ["CLIP_TO_ZERO", "REJECT_STEP"],
        "u_face_scheme": ["CENTRAL", "UPWIND"],
        "consumption": ["EXPLICIT", "SEMI_IMPLICIT"],
    }
    for name in names:
        path = f"stepper.{name}"
        if name in choices:
            kw[name] = rd.string(table, name, path, getattr(defaults, name), choices[name])
        else:
            kw[name] = rd.number(table, name, path, getattr(defaults, name))
    cfg = StepperConfig(**kw)
    for problem in cfg.problems():
        name, msg = problem.split(": ", 1)
        rd.err(f"stepper.{name}", msg)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
