"""
IMEX time integration of the chemotaxis-consumption system

    u_t = Lap u - chi div(u grad v) + f(u)
    v_t = Lap v - u v

with zero-flux boundaries. Diffusion is implicit with weight ``theta``;
chemotaxis, the nonlocal source and (by default) consumption are explicit.

* ``theta = 1``: one stage, implicit-explicit Euler (first order).
* ``theta = 1/2``: Crank-Nicolson diffusion paired with a Heun
  predictor-corrector for the explicit terms (IMEX trapezoidal rule,
  second order).

Blow-up is reported, never raised: a step whose result has
``max u > u_blowup_threshold`` (or non-finite values) ends the run with a
:class:`BlowUp` record, as does a step-size limit falling below ``dt_min``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace

import numpy as np

from .grid import CENTRAL, UPWIND, Field, _chemotaxis, _diff, _laplacian
from .linsolve import solve_pcg, solve_tridiagonal
from .model import Params, State, _source, _source_slope

logger = logging.getLogger(__name__)

CLIP_TO_ZERO = "CLIP_TO_ZERO"
REJECT_STEP = "REJECT_STEP"
EXPLICIT = "EXPLICIT"
SEMI_IMPLICIT = "SEMI_IMPLICIT"
SUP_EXCEEDED = "SUP_EXCEEDED"
DT_UNDERFLOW = "DT_UNDERFLOW"

EPS = 1e-30
GROWTH_CAP = 1.5


@dataclass(frozen=True)
class StepperConfig:
    dt_init: float = 1e-4
    dt_min: float = 1e-10
    dt_max: float = 1e-2
    cfl_safety: float = 0.5
    u_blowup_threshold: float = 1e6
    clip_policy: str = CLIP_TO_ZERO
    linear_tol: float = 1e-10
    u_face_scheme: str = CENTRAL
    theta: float = 1.0
    consumption: str = EXPLICIT

    def problems(self) -> list[str]:
        out = []
        for name in ("dt_init", "dt_min", "dt_max", "u_blowup_threshold"):
            if not getattr(self, name) > 0:
                out.append(f"{name}: must be > 0")
        if self.dt_min > self.dt_max:
            out.append("dt_min: must not exceed dt_max")
        elif not self.dt_min <= self.dt_init <= self.dt_max:
            out.append("dt_init: need dt_min ≤ dt_init ≤ dt_max")
        if not 0 < self.cfl_safety <= 1:
            out.append("cfl_safety: must lie in (0, 1]")
        if not 0 < self.linear_tol <= 1e-6:
            out.append("linear_tol: must lie in (0, 1e-6]")
        if self.clip_policy not in (CLIP_TO_ZERO, REJECT_STEP):
            out.append(f"clip_policy: must be {CLIP_TO_ZERO} or {REJECT_STEP}")
        if self.u_face_scheme not in (CENTRAL, UPWIND):
            out.append(f"u_face_scheme: must be {CENTRAL} or {UPWIND}")
        if self.theta not in (1.0, 0.5):
            out.append("theta: must be 1 or 0.5")
        if self.consumption not in (EXPLICIT, SEMI_IMPLICIT):
            out.append(f"consumption: must be {EXPLICIT} or {SEMI_IMPLICIT}")
        return out

    def checked(self) -> "StepperConfig":
        problems = self.problems()
        if problems:
            raise ValueError("invalid stepper config: " + "; ".join(problems))
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BlowUp:
    t_detected: float
    reason: str
    u_sup: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StepOutcome:
    state: State | None
    blowup: BlowUp | None
    dt_used: float
    clipped_mass: float = 0.0

    @property
    def ok(self) -> bool:
        return self.blowup is None


@dataclass
class RunReport:
    """Terminal report of :func:`run`.

    ``state`` is the last accepted state: the final one, or the one just
    before the blow-up signal.
    """

    state: State
    blowup: BlowUp | None
    clipped_mass: float
    steps: int

    @property
    def blew_up(self) -> bool:
        return self.blowup is not None


def zero_source(u, params, vol):
    """Source hook that switches the reaction term off."""
    return np.zeros_like(u)


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


def _solve(rhs, w, h, tol, sink=None, guess=None):
    if rhs.ndim == 1:
        return solve_tridiagonal(rhs, w, h[0], sink)
    x, _ = solve_pcg(rhs, w, h, sink=sink, x0=guess, tol=tol)
    return x


def _advance(u, v, params, cfg, dt, h, vol, source):
    theta = cfg.theta
    semi = cfg.consumption == SEMI_IMPLICIT
    w = theta * dt

    def explicit(uu, vv):
        nu = _chemotaxis(uu, vv, params.chi, h, cfg.u_face_scheme) + source(uu, params, vol)
        nv = None if semi else -uu * vv
        return nu, nv

    base_u = u.copy()
    base_v = v.copy()
    if theta < 1.0:
        base_u += (1.0 - theta) * dt * _laplacian(u, h)
        base_v += (1.0 - theta) * dt * _laplacian(v, h)
    if semi and theta < 1.0:
        base_v_first = base_v - (1.0 - theta) * dt * u * v
    else:
        base_v_first = base_v

    nu0, nv0 = explicit(u, v)
    u1 = _solve(base_u + dt * nu0, w, h, cfg.linear_tol, guess=u)
    if semi:
        v1 = _solve(base_v_first, w, h, cfg.linear_tol, sink=w * u, guess=v)
    else:
        v1 = _solve(base_v + dt * nv0, w, h, cfg.linear_tol, guess=v)
    if theta == 1.0:
        return u1, v1

    # corrector: stage values are clipped only for evaluating the explicit terms
    us = np.maximum(u1, 0.0)
    vs = np.maximum(v1, 0.0)
    nu1, nv1 = explicit(us, vs)
    u2 = _solve(base_u + 0.5 * dt * (nu0 + nu1), w, h, cfg.linear_tol, guess=u1)
    if semi:
        ubar = 0.5 * (u + us)
        rhs = base_v - (1.0 - theta) * dt * ubar * v
        v2 = _solve(rhs, w, h, cfg.linear_tol, sink=w * ubar, guess=v1)
    else:
        v2 = _solve(base_v + 0.5 * dt * (nv0 + nv1), w, h, cfg.linear_tol, guess=v1)
    return u2, v2


def step(state: State, params: Params, cfg: StepperConfig, dt: float, *, source=_source) -> StepOutcome:
    """Advance ``state`` by ``dt`` (less if REJECT_STEP has to halve it)."""
    grid = state.grid
    h, vol = grid.h, grid.cell_volume
    if not 0 < dt <= cfg.dt_max * (1 + 1e-12):
        raise ValueError(f"dt={dt} outside (0, dt_max={cfg.dt_max}]")
    u, v = state.u.values, state.v.values

    while True:
        un, vn = _advance(u, v, params, cfg, dt, h, vol, source)
        t_new = state.t + dt
        if not (np.all(np.isfinite(un)) and np.all(np.isfinite(vn))):
            return StepOutcome(None, BlowUp(t_new, SUP_EXCEEDED, float("inf")), dt)
        negative = un.min() < 0 or vn.min() < 0
        if negative and cfg.clip_policy == REJECT_STEP:
            dt *= 0.5
            if dt < cfg.dt_min:
                return StepOutcome(None, BlowUp(state.t, DT_UNDERFLOW, float(u.max())), dt)
            continue
        break

    clipped = float(np.sum(np.maximum(-un, 0.0))) * vol
    if negative:
        un = np.maximum(un, 0.0)
        vn = np.maximum(vn, 0.0)
    u_sup = float(un.max())
    if u_sup > cfg.u_blowup_threshold:
        return StepOutcome(None, BlowUp(t_new, SUP_EXCEEDED, u_sup), dt, clipped)
    new = State(Field(grid, _frozen(un)), Field(grid, _frozen(vn)), t_new)
    return StepOutcome(new, None, dt, clipped)


def dt_limit(state: State, params: Params, cfg: StepperConfig, *, source=_source) -> float:
    """Unclamped stable step: the tightest of the advective, reaction and consumption limits."""
    u, v = state.u.values, state.v.values
    h, vol = state.grid.h, state.grid.cell_volume
    advect = min(
        hd / (params.chi * float(np.max(np.abs(_diff(v, ax)))) / hd + EPS)
        for ax, hd in enumerate(h)
    )
    slope = 0.0 if source is zero_source else _source_slope(u, params, vol)
    react = 1.0 / (slope + EPS)
    consume = 1.0 / (float(u.max()) + EPS)
    return cfg.cfl_safety * min(advect, react, consume)


def adapt_dt(state: State, params: Params, cfg: StepperConfig, dt_prev=None, *, source=_source) -> float:
    """Next step size: limits from :func:`dt_limit`, growth-capped and clamped."""
    return _clamp(dt_limit(state, params, cfg, source=source), cfg, dt_prev)


def _clamp(limit, cfg, dt_prev):
    cap = cfg.dt_init if dt_prev is None else GROWTH_CAP * dt_prev
    return max(min(limit, cap, cfg.dt_max), cfg.dt_min)


def run(
    initial: State,
    params: Params,
    cfg: StepperConfig,
    horizon: float,
    observer=None,
    record_every: int = 1,
    *,
    source=_source,
    max_steps: int | None = None,
) -> RunReport:
    """Integrate from ``initial`` until ``t >= horizon`` or blow-up.

    ``observer(state, dt, clipped_mass_cum)`` is called on the initial
    state, every ``record_every`` accepted steps, and on the last state.
    """
    cfg.checked()
    if not horizon > initial.t:
        raise ValueError(f"horizon {horizon} must exceed the initial time {initial.t}")
    for f in (initial.u, initial.v):
        f.values.setflags(write=False)
    state = initial
    clipped = 0.0
    steps = 0
    dt_prev = None
    last_observed = -1
    blowup = None
    if observer is not None:
        observer(state, 0.0, 0.0)
        last_observed = 0
    t_end = horizon - 1e-12 * max(1.0, abs(horizon))

    while state.t < t_end:
        if max_steps is not None and steps >= max_steps:
            break
        limit = dt_limit(state, params, cfg, source=source)
        if limit < cfg.dt_min:
            blowup = BlowUp(state.t, DT_UNDERFLOW, float(state.u.values.max()))
            break
        dt = _clamp(limit, cfg, dt_prev)
        dt = min(dt, horizon - state.t)
        out = step(state, params, cfg, dt, source=source)
        if not out.ok:
            blowup = out.blowup
            break
        state = out.state
        clipped += out.clipped_mass
        steps += 1
        dt_prev = out.dt_used
        if observer is not None and steps % record_every == 0:
            observer(state, out.dt_used, clipped)
            last_observed = steps

    if observer is not None and last_observed != steps:
        observer(state, dt_prev or 0.0, clipped)
    if blowup is not None:
        logger.info("blow-up signal %s at t=%.6g", blowup.reason, blowup.t_detected)
    return RunReport(state=state, blowup=blowup, clipped_mass=clipped, steps=steps)


def with_overrides(cfg: StepperConfig, **kw) -> StepperConfig:
    return replace(cfg, **kw).checked()
