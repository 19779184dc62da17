import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlchemo.errors import PreconditionError
from nlchemo.grid import Grid
from nlchemo.inequality import check_inequality
from nlchemo.model import Params, SourceMode
from nlchemo.regimes import (
    Regime,
    classify,
    gn_exponents,
    mass_bound,
    mass_threshold,
    ode_comparison_bound,
    regime_report,
    report_for_state,
    v_sup_bound,
)

GD = SourceMode.GROWTH_DAMPENING
DG = SourceMode.DECAY_GROWTH


def P(alpha, beta, gamma, mode=GD, a=1.0, b=1.0, chi=1.0):
    return Params(chi, a, b, alpha, beta, gamma, mode)


@pytest.mark.parametrize("params, n, tag", [
    (P(1, 2, 2), 2, Regime.CASE_1B),
    (P(2, 2, 2), 2, Regime.CASE_1A),
    (P(3, 1, 1, DG, a=0.01, b=50), 2, Regime.CASE_2A),
    (P(3, 1, 2, DG, a=2, b=1), 1, Regime.CASE_2B),
    (P(3, 2, 2), 2, Regime.OUTSIDE_THEOREM),
])
def test_anchored_examples(params, n, tag):
    assert classify(params, n, 1.0, 1.0).tag is tag


def test_failed_condition_is_named():
    case = classify(P(3, 2, 2), 2, 1.0, 1.0)
    assert "β ≥ α" in case.details and case.details.startswith("failed:")
    eq = classify(P(1, 1, 2), 2, 1.0, 1.0)
    assert eq.tag is Regime.OUTSIDE_THEOREM and "n/2+2" in eq.details


def test_strictness_at_equality():
    # beta + gamma = n/2 + 2 exactly
    assert classify(P(1, 1.5, 1.5), 2, 1.0, 1.0).tag is Regime.OUTSIDE_THEOREM
    assert classify(P(1, 1.5, 1.5 + 1e-9), 2, 1.0, 1.0).tag is Regime.CASE_1B


def test_near_tie_is_reported():
    case = classify(P(1, 1.5, 1.5 + 1e-14), 2, 1.0, 1.0)
    assert case.tag is Regime.OUTSIDE_THEOREM
    assert case.ties and "treated as equal" in case.ties[0]


def test_case_2c_needs_constant():
    p = P(2, 1, 1, DG, a=3, b=1)
    assert classify(p, 1, 1.0, 1.0).tag is Regime.OUTSIDE_THEOREM
    assert classify(p, 1, 1.0, 1.0, cp_user=1.0).tag is Regime.CASE_2C_CONDITIONAL
    assert classify(p, 1, 1.0, 2.5, cp_user=1.0).tag is Regime.OUTSIDE_THEOREM
    with pytest.raises(PreconditionError):
        classify(p, 1, 1.0, 1.0, cp_user=-1.0)


def test_case_2b_threshold():
    assert classify(P(3, 1, 2, DG, a=0.5, b=1), 1, 1.0, 1.0).tag is Regime.OUTSIDE_THEOREM
    assert classify(P(3, 1, 2, DG, a=2, b=1), 1, 1.0, 1.0).tag is Regime.CASE_2B
    assert classify(P(3, 1, 2, DG, a=2, b=1), 1, 3.0, 1.0).tag is Regime.OUTSIDE_THEOREM


def test_bad_dimension():
    with pytest.raises(PreconditionError):
        classify(P(1, 1, 1), 0, 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    alpha=st.floats(1, 4), beta=st.floats(1, 6), gamma=st.floats(1, 4),
    mode=st.sampled_from(list(SourceMode)), n=st.integers(1, 4),
    a=st.floats(0.1, 10), b=st.floats(0.1, 10), k=st.floats(0.01, 100),
)
def test_common_scaling_of_a_b(alpha, beta, gamma, mode, n, a, b, k):
    t1 = classify(P(alpha, beta, gamma, mode, a, b), n, 1.0, 1.0).tag
    t2 = classify(P(alpha, beta, gamma, mode, a * k, b * k), n, 1.0, 1.0).tag
    if t1 in (Regime.CASE_1A, Regime.CASE_1B, Regime.CASE_2A, Regime.CASE_2B):
        assert t2 is t1


def test_mass_bound_examples():
    assert mass_bound(P(1, 1, 1), 1.0, 0.5) == 1.0
    assert mass_bound(P(1, 1, 2, a=4), 1.0, 0.5) == pytest.approx(2.0, rel=1e-15)
    assert mass_bound(P(1, 1, 2, a=4), 1.0, 10.0) == 10.0


def test_mass_threshold_strict_branch():
    # beta > alpha with |Omega| = 1 reduces to (a/b)^(1/(beta - alpha + gamma))
    assert mass_threshold(P(1, 2, 2, a=8, b=1), 1.0) == pytest.approx(2.0, rel=1e-14)
    om, p = 2.0, P(1, 2, 2, a=3, b=0.5)
    expected = (3 * om ** (1 / 2) / (0.5 * om ** ((1 - 2) - (2 - 1) * 1 / 2))) ** (1 / 3)
    assert mass_threshold(p, om) == pytest.approx(expected, rel=1e-14)


def test_mass_bound_preconditions():
    with pytest.raises(PreconditionError):
        mass_bound(P(2, 1, 1), 1.0, 0.5)
    with pytest.raises(PreconditionError):
        mass_bound(P(1, 1, 1, DG), 1.0, 0.5)


@settings(max_examples=80, deadline=None)
@given(
    alpha=st.floats(1, 3), extra=st.floats(0, 2), gamma=st.floats(1, 3),
    a=st.floats(0.1, 10), b=st.floats(0.1, 10), k=st.floats(1.0, 10), om=st.floats(0.2, 5),
)
def test_mass_bound_monotone(alpha, extra, gamma, a, b, k, om):
    beta = alpha + extra
    base = mass_threshold(P(alpha, beta, gamma, a=a, b=b), om)
    assert mass_threshold(P(alpha, beta, gamma, a=a * k, b=b), om) >= base * (1 - 1e-12)
    assert mass_threshold(P(alpha, beta, gamma, a=a, b=b * k), om) <= base * (1 + 1e-12)


def test_ode_comparison_bound():
    assert ode_comparison_bound(0, 1) == 1
    assert ode_comparison_bound(3, 1) == 3
    assert ode_comparison_bound(2, 2) == 2


def test_v_sup_bound():
    g = Grid.interval(1.0, 128)
    assert v_sup_bound(g.constant(3.0)) == 3.0
    assert v_sup_bound(g.constant(0.0)) == 0.0
    # leftmost center sits h/2 from the maximum: 1 + cos(pi h/2) ≈ 2 - pi^2 h^2 / 8
    assert abs(v_sup_bound(g.sample(lambda x: 1 + np.cos(np.pi * x))) - 2) <= np.pi**2 * g.h[0] ** 2 / 8
    with pytest.raises(PreconditionError):
        v_sup_bound(g.constant(-1.0))


def test_gn_anchored_instance():
    ex = gn_exponents(2, 1, 3)
    assert ex.p == 6.0 and ex.admissible and not ex.convention
    assert ex.lam == 0.6 and ex.delta == 2.0


def test_gn_inadmissible():
    assert not gn_exponents(2, 2, 3).admissible
    assert "r < q" in gn_exponents(2, 2, 3).reason
    assert not gn_exponents(7, 2, 3).admissible  # q ≥ p
    # n = 2 at equality q/r = 2/r + 1
    assert not gn_exponents(3, 1, 2).admissible
    assert gn_exponents(2.9, 1, 2).admissible
    # n = 1 uses q/r < 2/r + 2
    assert gn_exponents(3.9, 1, 1).admissible
    assert not gn_exponents(4, 1, 1).admissible


@settings(max_examples=300, deadline=None)
@given(n=st.integers(1, 12), r=st.floats(1, 10), frac=st.floats(0.001, 0.999))
def test_gn_exponents_in_range(n, r, frac):
    # upper end of q from the admissibility conditions
    top = r * (2 / r + 1 - (n - 2) / n)
    if n >= 3:
        top = min(top, 2 * n / (n - 2))
    if top <= r:
        return
    q = r + frac * (top - r)
    ex = gn_exponents(q, r, n)
    assert ex.admissible
    assert 0 < ex.lam < 1
    assert 0 < ex.delta < math.inf
    assert 2 - ex.lam * q > 0


def test_regime_report_fields():
    rep = regime_report(P(1, 2, 2), 1, 1.0, 1.0, 0.5)
    assert rep.case.tag is Regime.CASE_1B and rep.mass_bound_m0 == 1.0
    assert rep.threshold_margin is None
    rep2 = regime_report(P(3, 1, 2, DG, a=2), 1, 1.0, 4.0, 0.5)
    assert rep2.mass_bound_m0 is None and rep2.threshold_margin == 1.0 and rep2.v_sup_bound == 4.0


def test_report_for_state_uses_grid():
    g = Grid.rectangle(1.0, 2.0, 8, 8)
    rep = report_for_state(P(2, 2, 2), g.constant(0.5), g.constant(3.0))
    # beta = alpha branch: y1 = (a / (b |Omega|^(1 - gamma)))^(1/gamma) = sqrt(2) > initial mass 1
    assert rep.n == 2 and rep.omega_measure == 2.0
    assert rep.mass_bound_m0 == pytest.approx(math.sqrt(2), rel=1e-15)
    assert report_for_state(P(2, 2, 2), g.constant(0.5), g.constant(3.0), n=5).n == 5


@pytest.mark.parametrize("q, r, n", [(2, 1, 3), (1.5, 1, 1), (2.5, 1, 2), (2.5, 2, 4)])
def test_empirical_inequality_has_finite_constant(q, r, n):
    res = check_inequality(q, r, n, samples=200)
    assert not res.violated
    assert [f.eps for f in res.fits] == [1.0, 0.1]
    for fit in res.fits:
        assert math.isfinite(fit.c0) and fit.c0 >= fit.median >= 0
    # a smaller eps can only require a larger constant
    assert res.fits[1].c0 >= res.fits[0].c0


def test_empirical_inequality_rejects_inadmissible():
    with pytest.raises(PreconditionError):
        check_inequality(2, 2, 3)
