"""
Parameter regimes with proven global boundedness, and the analytic bounds
that come with them.

``classify`` sorts a parameter set into one of five boundedness cases
(two for the growth-dampening source, three for the decay-growth source)
or reports the first condition that fails. Inequalities are evaluated as
strict or non-strict exactly as stated; values within a relative 1e-12 of
each other count as equal.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .grid import Field, _check_nonnegative
from .model import Params, SourceMode

TIE_RTOL = 1e-12


class Regime(str, enum.Enum):
    CASE_1A = "CASE_1A"
    CASE_1B = "CASE_1B"
    CASE_2A = "CASE_2A"
    CASE_2B = "CASE_2B"
    CASE_2C_CONDITIONAL = "CASE_2C_CONDITIONAL"
    OUTSIDE_THEOREM = "OUTSIDE_THEOREM"

    @property
    def bounded(self) -> bool:
        return self is not Regime.OUTSIDE_THEOREM


@dataclass(frozen=True)
class RegimeCase:
    tag: Regime
    details: str
    ties: tuple[str, ...] = ()

    def to_dict(self):
        return {"tag": self.tag.value, "details": self.details, "ties": list(self.ties)}


def _cmp(lhs: float, rhs: float) -> int:
    if math.isclose(lhs, rhs, rel_tol=TIE_RTOL, abs_tol=0.0):
        return 0
    return 1 if lhs > rhs else -1


class _Ineq:
    """Evaluates and describes one inequality, remembering near-ties."""

    def __init__(self):
        self.ties = []

    def __call__(self, name, lhs, op, rhs):
        c = _cmp(lhs, rhs)
        if c == 0 and lhs != rhs:
            self.ties.append(f"{name}: {lhs:.17g} vs {rhs:.17g} treated as equal")
        holds = {">": c > 0, ">=": c >= 0, "<": c < 0, "=": c == 0}[op]
        text = f"{name} = {lhs:g} {op if holds else _negate(op)} {rhs:g}"
        return holds, text


def _negate(op):
    return {">": "≤", ">=": "<", "<": "≥", "=": "≠"}[op]


def classify(params: Params, n: int, omega_measure: float, v0_sup: float, cp_user=None) -> RegimeCase:
    """Match ``params`` against the boundedness cases.

    Case 2(c) involves a constant that cannot be computed here; it is only
    reported (as CASE_2C_CONDITIONAL) when ``cp_user`` is supplied.
    """
    if n < 1 or int(n) != n:
        raise PreconditionError(f"dimension must be a positive integer, got {n}")
    if not omega_measure > 0:
        raise PreconditionError(f"|Ω| must be positive, got {omega_measure}")
    p = params
    ineq = _Ineq()

    def result(tag, text):
        return RegimeCase(tag, text, tuple(ineq.ties))

    def outside(text):
        return result(Regime.OUTSIDE_THEOREM, "failed: " + text)

    s = p.beta + p.gamma
    if p.mode is SourceMode.GROWTH_DAMPENING:
        ok, text = ineq("beta", p.beta, ">=", p.alpha)
        if not ok:
            return outside(f"{text} (β ≥ α required)")
        ok, text = ineq("alpha", p.alpha, ">=", 2.0)
        if ok:
            ok, text = ineq("beta + gamma", s, ">", n / 2 * (p.alpha - 1) + p.alpha)
            text += " [n/2(α−1)+α]"
            return result(Regime.CASE_1A, text) if ok else outside(text)
        ok, text = ineq("beta + gamma", s, ">", n / 2 + 2)
        text += " [n/2+2]"
        return result(Regime.CASE_1B, text) if ok else outside(text)

    ok, text = ineq("beta", p.beta, ">=", 1.0)
    if not ok:
        return outside(text)
    gt2, _ = ineq("alpha", p.alpha, ">", 2.0)
    if gt2:
        c = _cmp(s, p.alpha)
        if c < 0:
            _, text = ineq("beta + gamma", s, "<", p.alpha)
            return result(Regime.CASE_2A, text + " [α]")
        if c == 0:
            ineq("beta + gamma", s, "=", p.alpha)
            ok, text = ineq("a", p.a, ">", p.b * omega_measure)
            text = f"beta + gamma = alpha = {p.alpha:g}; " + text + " [b|Ω|]"
            return result(Regime.CASE_2B, text) if ok else outside(text)
        _, text = ineq("beta + gamma", s, "<", p.alpha)
        return outside(text + " [α] (need β+γ ≤ α when α > 2)")
    is2, _ = ineq("alpha", p.alpha, "=", 2.0)
    if not is2:
        return outside(f"alpha = {p.alpha:g} < 2 (cases 2(a), 2(b) need α > 2, case 2(c) needs α = 2)")
    if not (_cmp(p.beta, 1.0) == 0 and _cmp(p.gamma, 1.0) == 0):
        return outside(f"alpha = 2 requires beta = gamma = 1, got beta = {p.beta:g}, gamma = {p.gamma:g}")
    if cp_user is None:
        return outside("alpha = 2, beta = gamma = 1 but no C_P supplied (case 2(c) needs it)")
    if not cp_user > 0:
        raise PreconditionError(f"cp_user must be positive, got {cp_user}")
    threshold = p.b * omega_measure + cp_user * p.chi * v0_sup
    ok, text = ineq("a", p.a, ">", threshold)
    text += " [b|Ω| + C_P·χ·‖v0‖∞]"
    return result(Regime.CASE_2C_CONDITIONAL, text) if ok else outside(text)


def mass_threshold(params: Params, omega_measure: float) -> float:
    """The level y1 above which the mass cannot grow."""
    p = params
    if p.mode is not SourceMode.GROWTH_DAMPENING:
        raise PreconditionError("the mass bound needs the GROWTH_DAMPENING source")
    if _cmp(p.beta, p.alpha) < 0:
        raise PreconditionError(f"the mass bound needs beta ≥ alpha, got {p.beta} < {p.alpha}")
    om = omega_measure
    if _cmp(p.beta, p.alpha) == 0:
        return (p.a / (p.b * om ** (1.0 - p.gamma))) ** (1.0 / p.gamma)
    d = p.beta - p.alpha
    num = p.a * om ** (d / p.beta)
    den = p.b * om ** ((1.0 - p.gamma) - (p.beta - 1.0) * d / p.beta)
    return (num / den) ** (1.0 / (d + p.gamma))


def mass_bound(params: Params, omega_measure: float, initial_mass: float) -> float:
    """Uniform-in-time ceiling m0 on the total mass for GROWTH_DAMPENING, beta ≥ alpha."""
    return ode_comparison_bound(initial_mass, mass_threshold(params, omega_measure))


def ode_comparison_bound(y0: float, y1: float) -> float:
    if y0 < 0 or not y1 > 0:
        raise PreconditionError(f"need y0 ≥ 0 and y1 > 0, got y0={y0}, y1={y1}")
    return max(y0, y1)


def v_sup_bound(v0: Field) -> float:
    _check_nonnegative(v0.values, "v0")
    return float(v0.values.max())


@dataclass(frozen=True)
class GNExponents:
    """Interpolation exponents for a (q, r, n) triple.

    ``p`` is the formal value 2n/(n-2): infinite for n = 2 and -2 for n = 1.
    With that reading the general admissibility test reproduces the
    separate n = 1 and n = 2 conditions, and ``convention`` flags that
    lambda and delta were obtained this way.
    """

    p: float
    lam: float | None
    delta: float | None
    admissible: bool
    reason: str = ""
    convention: bool = False


def _inv_p(n: int) -> Fraction:
    return Fraction(n - 2, 2 * n)


def gn_exponents(q: float, r: float, n: int) -> GNExponents:
    if n < 1 or int(n) != n:
        raise PreconditionError(f"dimension must be a positive integer, got {n}")
    n = int(n)
    fq, fr = Fraction(q), Fraction(r)
    ip = _inv_p(n)
    p = float(1 / ip) if ip != 0 else math.inf
    convention = n < 3

    def answer(ok, reason=""):
        if not ok:
            return GNExponents(p, None, None, False, reason, convention)
        lam = (1 / fr - 1 / fq) / (1 / fr - ip)
        delta = 2 * (1 - lam) * fq / (2 - lam * fq)
        return GNExponents(p, float(lam), float(delta), True, "", convention)

    if not fr >= 1:
        return answer(False, f"1 ≤ r fails (r = {r:g})")
    if not fr < fq:
        return answer(False, f"r < q fails (r = {r:g}, q = {q:g})")
    if n >= 3 and not fq < 1 / ip:
        return answer(False, f"q < p fails (q = {q:g}, p = {p:g})")
    bound = 2 / fr + 1 - 2 * ip
    if not fq / fr < bound:
        label = {1: "2/r + 2", 2: "2/r + 1"}.get(n, "2/r + 1 − 2/p")
        return answer(False, f"q/r < {label} fails ({float(fq / fr):g} ≥ {float(bound):g})")
    return answer(True)


@dataclass(frozen=True)
class RegimeReport:
    case: RegimeCase
    mass_bound_m0: float | None
    v_sup_bound: float
    threshold_margin: float | None
    n: int
    omega_measure: float

    def to_dict(self):
        return {
            "case": self.case.to_dict(),
            "mass_bound_m0": self.mass_bound_m0,
            "v_sup_bound": self.v_sup_bound,
            "threshold_margin": self.threshold_margin,
            "n": self.n,
            "omega_measure": self.omega_measure,
        }


def regime_report(params: Params, n: int, omega_measure: float, v0_sup: float,
                  initial_mass: float, cp_user=None) -> RegimeReport:
    case = classify(params, n, omega_measure, v0_sup, cp_user)
    m0 = None
    if case.tag in (Regime.CASE_1A, Regime.CASE_1B):
        m0 = mass_bound(params, omega_measure, initial_mass)
    margin = None
    if case.tag is Regime.CASE_2B:
        margin = params.a - params.b * omega_measure
    elif case.tag is Regime.CASE_2C_CONDITIONAL:
        margin = params.a - params.b * omega_measure - cp_user * params.chi * v0_sup
    return RegimeReport(case, m0, float(v0_sup), margin, int(n), float(omega_measure))


def report_for_state(params, u0: Field, v0: Field, n=None, cp_user=None) -> RegimeReport:
    """Regime report for initial data on a grid; n defaults to the grid dimension."""
    grid = u0.grid
    return regime_report(
        params,
        grid.dim if n is None else n,
        grid.measure,
        v_sup_bound(v0),
        float(np.sum(u0.values) * grid.cell_volume),
        cp_user,
    )
