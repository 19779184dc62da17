"""Parameters, state and the two nonlocal source forms.

The source is either

    GROWTH_DAMPENING:  f(u) =  a u^alpha - b u^beta * int u^gamma
    DECAY_GROWTH:      f(u) = -a u^alpha + b u^beta * int u^gamma

where the integral runs over the whole domain and is evaluated once per
call, then broadcast to every cell.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np

from .errors import PreconditionError
from .grid import Field, _check_nonnegative


class SourceMode(str, enum.Enum):
    GROWTH_DAMPENING = "GROWTH_DAMPENING"
    DECAY_GROWTH = "DECAY_GROWTH"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(
                f"unknown source mode {value!r}; expected one of {[m.value for m in cls]}"
            ) from None

    @property
    def sign(self) -> int:
        """+1 when the local term grows, -1 when it decays."""
        return 1 if self is SourceMode.GROWTH_DAMPENING else -1


@dataclass(frozen=True)
class Params:
    chi: float
    a: float
    b: float
    alpha: float
    beta: float
    gamma: float
    mode: SourceMode = SourceMode.GROWTH_DAMPENING

    def __post_init__(self):
        object.__setattr__(self, "mode", SourceMode.parse(self.mode))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


def validate(params: Params) -> list[str]:
    """Return every violated parameter constraint; an empty list means valid."""
    problems = []
    for name in ("chi", "a", "b"):
        value = getattr(params, name)
        if not (np.isfinite(value) and value > 0):
            problems.append(f"{name} > 0")
    for name in ("alpha", "beta", "gamma"):
        value = getattr(params, name)
        if not (np.isfinite(value) and value >= 1):
            problems.append(f"{name} ≥ 1")
    return problems


def check(params: Params) -> Params:
    problems = validate(params)
    if problems:
        raise PreconditionError("invalid parameters: " + ", ".join(problems))
    return params


@dataclass(frozen=True)
class State:
    u: Field
    v: Field
    t: float = 0.0

    @property
    def grid(self):
        return self.u.grid


def _source(u: np.ndarray, p: Params, vol: float) -> np.ndarray:
    integral = float(np.sum(u**p.gamma)) * vol
    f = p.a * u**p.alpha - p.b * u**p.beta * integral
    return f if p.mode is SourceMode.GROWTH_DAMPENING else -f


def _source_slope(u: np.ndarray, p: Params, vol: float) -> float:
    """Upper estimate of the sup-norm of the source's derivative at u.

    Sums the magnitudes of the local part, the u^beta factor and the
    Frechet derivative of the nonlocal integral; used for step control.
    """
    umax = float(u.max())
    integral = float(np.sum(u**p.gamma)) * vol
    d_int = p.gamma * float(np.sum(u ** (p.gamma - 1.0))) * vol
    return (
        p.a * p.alpha * umax ** (p.alpha - 1.0)
        + p.b * p.beta * umax ** (p.beta - 1.0) * integral
        + p.b * umax**p.beta * d_int
    )


def source_eval(u: Field, params: Params) -> Field:
    """Evaluate the nonlocal source f(u) cellwise."""
    _check_nonnegative(u.values, "u")
    return Field(u.grid, _source(u.values, params, u.grid.cell_volume))


def homogeneous_rate(c: float, params: Params, measure: float) -> float:
    """f for a spatially constant density c on a domain of the given measure."""
    f = params.a * c**params.alpha - params.b * measure * c ** (params.beta + params.gamma)
    return params.mode.sign * f
