"""Statistic evaluation. The building-block integrals are checked against
closed antiderivatives and scipy.integrate.quad; the two evaluation routes
(closed form vs whole-statistic quadrature) must agree far beyond the
tolerance the bootstrap needs."""

import math

import numpy as np
import pytest
import scipy.integrate as si
from hypothesis import given
from hypothesis import strategies as hyst

from countgof.estimate import fit_family
from countgof.models import CountSeries, Inar1, Inarch1, Poisson, simulate
from countgof.pgf import (INAR1, INAR2, INARCH1, NullEstimate, empirical_pgf,
                          null_pgf)
from countgof.statistic import (NonConvergence, QuadratureRule, WeightSpec,
                                Y_SAFE, default_rule, integral_I, integral_J,
                                statistic_closed_inar1,
                                statistic_closed_inarch1, statistic_for_fit,
                                statistic_inar2, statistic_quadrature,
                                weighted_l2)


# ----------------------------------------------------------- J = int u^l e^{mu u}

def test_integral_J_analytic_values():
    assert integral_J(3.0, 0.0) == pytest.approx(0.25, rel=1e-15)
    assert integral_J(0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-14)
    # int u^2 e^u du = e - 2
    assert integral_J(2.0, 1.0) == pytest.approx(math.e - 2.0, rel=1e-13)
    assert integral_J(0.0, 0.0) == 1.0


def test_integral_J_vs_quad_grid():
    for lam in (0.0, 0.5, 2.0, 7.0, 31.5):
        for mu in (0.0, 0.3, 1.0, 8.0, 40.0, 200.0):
            want, err = si.quad(lambda u: u**lam * math.exp(mu * u), 0.0, 1.0)
            assert integral_J(lam, mu) == pytest.approx(want, rel=1e-10), \
                (lam, mu)


def test_integral_J_input_guards():
    with pytest.raises(ValueError):
        integral_J(-0.5, 1.0)
    with pytest.raises(NonConvergence):
        integral_J(0.0, 701.0)


# ---------------------------------------------- I = int e^{m th (u-1)} u^{x+a} (1+p(u-1))^y

def test_integral_I_frozen_values():
    # y = 0 removes the thinning factor: plain moments of u
    assert integral_I(0, 4, 0, 0.5, 1.0, 0.0) == pytest.approx(0.2, rel=1e-14)
    # m=1, x=y=0: int e^{u-1} du = 1 - 1/e
    assert integral_I(1, 0, 0, 0.5, 1.0, 0.0) == pytest.approx(
        1.0 - 1.0 / math.e, rel=1e-14)
    # m=2, y=1, p=1/2, th=1: e^{-2} [ (e^2-1)/4 + (e^2+1)/8 ]
    assert integral_I(2, 0, 1, 0.5, 1.0, 0.0) == pytest.approx(
        0.35808308959542307, rel=1e-13)


@pytest.mark.parametrize("m,x,y,p,th,a", [
    (0, 0, 3, 0.3, 0.0, 0.0),
    (1, 2, 5, 0.6, 2.0, 1.0),
    (2, 1, 12, 0.15, 4.5, 5.0),
    (1, 0, 29, 0.8, 1.5, 2.0),
    (2, 3, 30, 0.5, 3.0, 0.5),
    (1, 2, 45, 0.6, 2.0, 1.0),   # beyond Y_SAFE: node-quadrature path
    (2, 0, 80, 0.35, 5.0, 10.0),
])
def test_integral_I_vs_quad(m, x, y, p, th, a):
    want, err = si.quad(
        lambda u: math.exp(m * th * (u - 1.0)) * u ** (x + a)
        * (1.0 + p * (u - 1.0)) ** y, 0.0, 1.0)
    assert integral_I(m, x, y, p, th, a) == pytest.approx(want, rel=1e-10)


def test_integral_I_expansion_agrees_with_forced_quadrature():
    # same integral through both internal paths, either side of Y_SAFE
    lo = integral_I(1, 1, Y_SAFE, 0.4, 2.0, 1.0)
    hi = integral_I(1, 1, Y_SAFE + 1, 0.4, 2.0, 1.0)
    mid, _ = si.quad(lambda u: math.exp(2.0 * (u - 1.0)) * u**2
                     * (1.0 + 0.4 * (u - 1.0)) ** (Y_SAFE + 0.5), 0.0, 1.0)
    assert lo > hi  # integrand decreases in y on (0,1)
    assert lo > mid > hi


def test_integral_I_guards():
    with pytest.raises(ValueError):
        integral_I(3, 0, 0, 0.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        integral_I(1, -1, 0, 0.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        integral_I(1, 0, 0, 1.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        integral_I(1, 0, 0, 0.5, -1.0, 0.0)


# -------------------------------------------------------------- quadrature rule

def test_rule_orders_and_caching():
    r = default_rule()
    assert r.order == 128
    assert default_rule() is r
    assert np.all((r.nodes > 0.0) & (r.nodes < 1.0))
    assert r.weights.sum() == pytest.approx(1.0, rel=1e-14)


@given(hyst.integers(min_value=2, max_value=40),
       hyst.integers(min_value=0, max_value=30))
def test_rule_integrates_monomials_exactly(n, k):
    # Gauss-Legendre with n nodes is exact for degree <= 2n - 1
    rule = QuadratureRule.gauss_legendre(n)
    if k <= 2 * n - 1:
        got = float(np.sum(rule.weights * rule.nodes**k))
        assert got == pytest.approx(1.0 / (k + 1), rel=1e-12)


def test_rule_arrays_are_frozen():
    r = default_rule()
    with pytest.raises(ValueError):
        r.nodes[0] = 0.5


def test_weight_spec_validation():
    WeightSpec(0.0)
    WeightSpec(10.0)
    with pytest.raises(ValueError):
        WeightSpec(-0.5)


def test_weighted_l2_zero_for_identical_curves():
    rule = default_rule()
    curve = np.exp(-rule.nodes)
    assert weighted_l2(curve, curve.copy(), rule, 2.0, 100.0) == 0.0


# ------------------------------------------------------------- whole statistic

def test_all_zero_series_closed_value():
    # emp PGF is 1; null is e^{th(u-1)}; S/T = int (1 - e^{u-1})^2 du
    want = 20.0 * (2.0 / math.e - 0.5 - 0.5 * math.exp(-2.0))
    got = statistic_closed_inar1(CountSeries([0] * 20), 0.5, 1.0, 0.0)
    assert got == pytest.approx(want, rel=1e-12)
    # same empirical side under the INARCH(1) null with theta2 = 0
    got2 = statistic_closed_inarch1(CountSeries([0] * 20), 1.0, 0.0, 0.0)
    assert got2 == pytest.approx(want, rel=1e-12)


def test_statistic_invariant_to_permutation():
    y = [3, 0, 2, 5, 1, 1, 4, 0, 2, 2]
    s1 = statistic_closed_inar1(CountSeries(y), 0.4, 2.0, 1.0)
    s2 = statistic_closed_inar1(CountSeries(y[::-1]), 0.4, 2.0, 1.0)
    assert s1 == pytest.approx(s2, rel=1e-13)


def test_routes_agree_inar1():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(25):
        y = CountSeries(rng.poisson(5.0, size=50))
        p = rng.uniform(0.05, 0.9)
        th = rng.uniform(0.2, 6.0)
        a = float(rng.choice([0.0, 1.0, 2.0, 5.0]))
        closed = statistic_closed_inar1(y, p, th, a)
        est = NullEstimate(INAR1, {"p": p, "theta": th}, y)
        quad = statistic_quadrature(y, est, WeightSpec(a))
        worst = max(worst, abs(closed - quad) / max(abs(closed), 1e-12))
    assert worst < 1e-8


def test_routes_agree_inarch1():
    rng = np.random.default_rng(8)
    for _ in range(25):
        y = CountSeries(rng.poisson(4.0, size=60))
        th1 = rng.uniform(0.2, 4.0)
        th2 = rng.uniform(0.0, 0.9)
        a = float(rng.choice([0.0, 1.0, 10.0]))
        closed = statistic_closed_inarch1(y, th1, th2, a)
        est = NullEstimate(INARCH1, {"theta1": th1, "theta2": th2}, y)
        quad = statistic_quadrature(y, est, WeightSpec(a))
        assert closed == pytest.approx(quad, rel=1e-8, abs=1e-12)


def test_statistic_nonnegative_over_random_inputs():
    rng = np.random.default_rng(9)
    for _ in range(200):
        y = CountSeries(rng.poisson(rng.uniform(0.5, 12.0), size=30))
        s = statistic_closed_inar1(y, rng.uniform(0.01, 0.95),
                                   rng.uniform(0.1, 8.0),
                                   float(rng.uniform(0.0, 10.0)))
        assert s >= 0.0


def test_quadrature_order_doubling_is_stable():
    y = simulate(Inar1(0.6, Poisson(4.0)), 80, seed=17)
    est = NullEstimate(INAR1, {"p": 0.55, "theta": 4.2}, y)
    s128 = statistic_quadrature(y, est, WeightSpec(1.0), default_rule(128))
    s256 = statistic_quadrature(y, est, WeightSpec(1.0), default_rule(256))
    assert abs(s128 - s256) < 1e-10 * max(1.0, abs(s128))


def test_inar2_statistic_reduces_when_p2_zero():
    y = simulate(Inar1(0.5, Poisson(3.0)), 60, seed=18)
    p1, th, a = 0.45, 3.1, 1.0
    got = statistic_inar2(y, p1, 0.0, th, a)
    # with p2 = 0 the null couples only the lead coordinate of each pair,
    # i.e. the empirical PGF of Y_2..Y_T at the thinned argument
    rule = default_rule()
    tail = CountSeries(y.values[1:])
    emp = np.array([empirical_pgf(y, u) for u in rule.nodes])
    nul = np.array([math.exp(th * (u - 1.0))
                    * empirical_pgf(tail, 1.0 + p1 * (u - 1.0))
                    for u in rule.nodes])
    want = weighted_l2(emp, nul, rule, a, float(len(y)))
    assert got == pytest.approx(want, rel=1e-12)


def test_inar2_statistic_zero_when_curves_match():
    # a series of iid zeros fails the fit but the evaluator itself is fine
    y = CountSeries([2, 2, 2, 2])
    s = statistic_inar2(y, 0.2, 0.1, 1.0, 0.0)
    assert s > 0.0


def test_statistic_inar2_guards():
    y = CountSeries([1, 2, 3])
    with pytest.raises(ValueError):
        statistic_inar2(y, 0.6, 0.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        statistic_inar2(y, 0.3, 0.2, -1.0, 0.0)


def test_statistic_for_fit_routing():
    small = simulate(Inar1(0.6, Poisson(4.0)), 50, seed=19)
    assert small.max() <= Y_SAFE
    params = fit_family(small, INAR1).params
    s1, route1 = statistic_for_fit(small, INAR1, params, 1.0, route="auto")
    assert route1 == "closed"
    s2, route2 = statistic_for_fit(small, INAR1, params, 1.0,
                                   route="quadrature")
    assert route2 == "quadrature"
    assert s1 == pytest.approx(s2, rel=1e-8)

    big = CountSeries(np.concatenate([small.values, [45]]))
    params_big = fit_family(big, INAR1).params
    _, route3 = statistic_for_fit(big, INAR1, params_big, 1.0, route="auto")
    assert route3 == "quadrature"

    with pytest.raises(ValueError):
        statistic_for_fit(small, INAR2, {"p1": .2, "p2": .1, "theta": 1.0},
                          1.0, route="closed")
    with pytest.raises(ValueError):
        statistic_for_fit(small, INAR1, params, 1.0, route="exact")


def test_closed_param_guards():
    y = CountSeries([1, 2, 3])
    with pytest.raises(ValueError):
        statistic_closed_inar1(y, 1.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        statistic_closed_inar1(y, 0.5, -1.0, 0.0)
    with pytest.raises(ValueError):
        statistic_closed_inar1(y, 0.5, 1.0, -0.5)
    with pytest.raises(ValueError):
        statistic_closed_inarch1(y, 1.0, 1.5, 0.0)


def test_statistic_detects_mismatched_null():
    # the statistic should be visibly larger under a wrong null than under
    # parameters matched to the data
    y = simulate(Inarch1(1.5, 0.6), 300, seed=20)
    fit = fit_family(y, INARCH1).params
    s_good, _ = statistic_for_fit(y, INARCH1, fit, 1.0)
    s_bad, _ = statistic_for_fit(y, INARCH1,
                                 {"theta1": 5.0, "theta2": 0.0}, 1.0)
    assert s_bad > 10.0 * s_good
