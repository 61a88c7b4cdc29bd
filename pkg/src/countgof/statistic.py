"""Weighted L2 distance between the empirical PGF and a fitted null PGF.

The statistic is

    S = T * integral_0^1 (emp(u) - null(u))^2 u^a du,    a >= 0,

evaluated by two deliberately independent routes:

* quadrature: Gauss-Legendre on [0, 1] applied to the squared difference of
  the two PGF curves (works for every family);
* closed form: for the INAR(1) and INARCH(1) nulls the square expands into
  double sums over observation pairs whose terms are exponential-polynomial
  integrals. The building block is J(lam, mu) = integral_0^1 u^lam e^{mu u} du
  with the ascending series sum_k mu^k / (k! (1 + lam + k)), and the thinning
  factor (1 + p(u - 1))^y contributes binomial(y, k; p) weights.

Pairs are grouped by distinct values, so the double sums cost O(K^2) for K
distinct counts instead of O(T^2). The closed forms use the binomial
expansion only up to counts of Y_SAFE; larger exponents send the offending
term to quadrature. Tiny negative closed-form results are floored at zero
(a warning fires below -1e-9, which would indicate a real defect, not
roundoff).

At integer a the two routes agree to ~1e-11 relative with the default
128-node rule. Fractional a puts a u^a branch point at u = 0 into the
quadrature integrand, which caps the agreement near 1e-6; the closed route
remains exact there, and either error is far below bootstrap noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .models import CountSeries, SeriesTooShort
from .pgf import INAR1, INARCH1, INAR2, NullEstimate

Y_SAFE = 30
J_TOL = 1e-14
J_MAX_TERMS = 10_000
J_MU_MAX = 700.0
_NEG_FLOOR = -1e-9


class NonConvergence(Exception):
    """The J series did not converge (mu too large); use quadrature instead."""


@dataclass(frozen=True)
class WeightSpec:
    """Weight u^a on [0, 1]; larger a pushes mass toward u = 1."""

    a: float = 0.0

    def __post_init__(self):
        if not self.a >= 0.0:
            raise ValueError("a must be >= 0")


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights integrating smooth functions on [0, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be matching 1-d arrays")

    @property
    def order(self) -> int:
        return int(self.nodes.size)

    @classmethod
    def gauss_legendre(cls, order: int = 128) -> "QuadratureRule":
        """Gauss-Legendre rule mapped to [0, 1], exactness-checked on monomials
        up to degree 2 * order - 1 at construction."""
        if order < 2:
            raise ValueError("order must be >= 2")
        x, w = np.polynomial.legendre.leggauss(order)
        nodes = 0.5 * (x + 1.0)
        weights = 0.5 * w
        ks = np.arange(2 * order)
        approx = (nodes[None, :] ** ks[:, None]) @ weights
        exact = 1.0 / (ks + 1.0)
        err = np.max(np.abs(approx - exact) / exact)
        if err > 5e-12:
            raise RuntimeError(f"quadrature self-check failed: rel err {err:.2e}")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        return cls(nodes, weights)


_RULES: dict = {}


def default_rule(order: int = 128) -> QuadratureRule:
    rule = _RULES.get(order)
    if rule is None:
        rule = _RULES[order] = QuadratureRule.gauss_legendre(order)
    return rule


def integral_J(lam: float, mu: float) -> float:
    """integral_0^1 u^lam e^{mu u} du via the ascending series.

    Terms are summed until the next one falls below J_TOL relative to the
    partial sum; J_MAX_TERMS or mu past the e^mu overflow point raises
    NonConvergence.
    """
    lam = float(lam)
    mu = float(mu)
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    if mu > J_MU_MAX:
        raise NonConvergence(f"series for mu={mu} would overflow")
    s = 0.0
    c = 1.0  # mu^k / k!
    for k in range(J_MAX_TERMS):
        term = c / (1.0 + lam + k)
        s += term
        if abs(term) < J_TOL * abs(s):
            return s
        c *= mu / (k + 1)
    raise NonConvergence(f"J({lam}, {mu}) did not converge in {J_MAX_TERMS} terms")


def _binom_row(y: int, p: float) -> np.ndarray:
    """Binomial(y, k; p) pmf for k = 0..y, by the stable ratio recurrence."""
    row = np.empty(y + 1)
    if p <= 0.0:
        row[:] = 0.0
        row[0] = 1.0
        return row
    if p >= 1.0:
        row[:] = 0.0
        row[y] = 1.0
        return row
    q = 1.0 - p
    row[0] = math.exp(y * math.log(q))
    ratio = p / q
    for k in range(1, y + 1):
        row[k] = row[k - 1] * ratio * (y - k + 1) / k
    return row


def integral_I(m: int, x: int, y: int, p_hat: float, theta_hat: float,
               a: float, rule: Optional[QuadratureRule] = None) -> float:
    """integral_0^1 e^{m theta (u-1)} u^{x+a} (1 + p(u-1))^y du.

    These are the pairwise terms of the closed-form INAR(1) statistic:
    m counts innovation-PGF factors, x is a plain power of u, y a thinning
    exponent. For y <= Y_SAFE the thinning factor is expanded into binomial
    weights on J integrals; larger y integrates numerically.
    """
    if m not in (0, 1, 2):
        raise ValueError("m must be 0, 1 or 2")
    if x < 0 or y < 0:
        raise ValueError("x and y must be >= 0")
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must be in [0, 1]")
    if not theta_hat >= 0.0:
        raise ValueError("theta_hat must be >= 0")
    if not a >= 0.0:
        raise ValueError("a must be >= 0")
    if y <= Y_SAFE:
        mu = m * theta_hat
        weights = _binom_row(y, p_hat)
        acc = 0.0
        for k in range(y + 1):
            if weights[k] != 0.0:
                acc += weights[k] * integral_J(a + x + k, mu)
        return math.exp(-mu) * acc
    rule = rule or default_rule()
    mth = m * theta_hat
    acc = 0.0
    for u, w in zip(rule.nodes.tolist(), rule.weights.tolist()):
        acc += w * math.exp(mth * (u - 1.0)) * u ** (x + a) * (1.0 + p_hat * (u - 1.0)) ** y
    return acc


# --------------------------------------------------------------------------
# numba kernels

_JIT = {"cache": True, "nogil": True}


@njit(**_JIT)
def _ipow(base, n):
    r = 1.0
    b = base
    k = n
    while k > 0:
        if k & 1:
            r *= b
        k >>= 1
        if k:
            b *= b
    return r


@njit(**_JIT)
def _ejq(lam, mu, nodes, wts):
    # integral_0^1 u^lam e^{mu (u - 1)} du; the e^{-mu} scaling keeps every
    # quantity inside [0, 1] so large mu cannot overflow
    if mu <= 690.0:
        w = math.exp(-mu)
        s = 0.0
        k = 0
        while k < 10000:
            t = w / (1.0 + lam + k)
            s += t
            if t < 1e-15 * s:
                break
            k += 1
            w *= mu / k
        return s
    acc = 0.0
    for i in range(nodes.shape[0]):
        acc += wts[i] * math.exp(mu * (nodes[i] - 1.0)) * nodes[i] ** lam
    return acc


@njit(**_JIT)
def _closed_inar1(vals, cnts, p, th, a, nodes, wts):
    K = vals.shape[0]
    M = vals[K - 1]
    T = 0.0
    for i in range(K):
        T += cnts[i]
    L = 2 * M + 1
    e1 = np.empty(L)
    e2 = np.empty(L)
    for j in range(L):
        e1[j] = _ejq(a + j, th, nodes, wts)
        e2[j] = _ejq(a + j, 2.0 * th, nodes, wts)
    # binomial pmf rows for every thinning exponent the expansion can see
    ymax = min(L - 1, 30)
    q = 1.0 - p
    pmf = np.zeros((ymax + 1, ymax + 1))
    pmf[0, 0] = 1.0
    for y in range(1, ymax + 1):
        pmf[y, 0] = pmf[y - 1, 0] * q
        for k in range(1, y + 1):
            pmf[y, k] = pmf[y - 1, k] * q + pmf[y - 1, k - 1] * p
    # innovation-squared factor, thinning exponent x = pair sum
    i2 = np.empty(L)
    for x in range(L):
        if x <= 30:
            s = 0.0
            for k in range(x + 1):
                s += pmf[x, k] * e2[k]
            i2[x] = s
        else:
            acc = 0.0
            for i in range(nodes.shape[0]):
                u = nodes[i]
                acc += (wts[i] * math.exp(2.0 * th * (u - 1.0))
                        * _ipow(1.0 + p * (u - 1.0), x) * u ** a)
            i2[x] = acc
    # cross terms: power exponent vals[ii], thinning exponent vals[jj]
    i1 = np.empty((K, K))
    for jj in range(K):
        y = vals[jj]
        if y <= 30:
            for ii in range(K):
                x = vals[ii]
                s = 0.0
                for k in range(y + 1):
                    s += pmf[y, k] * e1[x + k]
                i1[ii, jj] = s
        else:
            for ii in range(K):
                x = vals[ii]
                acc = 0.0
                for i in range(nodes.shape[0]):
                    u = nodes[i]
                    acc += (wts[i] * math.exp(th * (u - 1.0)) * u ** (x + a)
                            * _ipow(1.0 + p * (u - 1.0), y))
                i1[ii, jj] = acc
    s = 0.0
    for ii in range(K):
        for jj in range(K):
            x = vals[ii] + vals[jj]
            s += cnts[ii] * cnts[jj] * (
                1.0 / (1.0 + a + x) + i2[x] - 2.0 * i1[ii, jj])
    return s / T


@njit(**_JIT)
def _closed_inarch1(vals, cnts, th1, th2, a, nodes, wts):
    K = vals.shape[0]
    M = vals[K - 1]
    T = 0.0
    for i in range(K):
        T += cnts[i]
    L = 2 * M + 1
    e2 = np.empty(L)
    for x in range(L):
        e2[x] = _ejq(a, 2.0 * th1 + th2 * x, nodes, wts)
    cross = np.empty((K, K))
    for jj in range(K):
        w = th1 + th2 * vals[jj]
        for ii in range(K):
            cross[ii, jj] = _ejq(a + vals[ii], w, nodes, wts)
    s = 0.0
    for ii in range(K):
        for jj in range(K):
            x = vals[ii] + vals[jj]
            s += cnts[ii] * cnts[jj] * (
                1.0 / (1.0 + a + x) + e2[x] - 2.0 * cross[ii, jj])
    return s / T


@njit(**_JIT)
def _nodes_empirical(vals, cnts, total, nodes):
    out = np.empty(nodes.shape[0])
    for i in range(nodes.shape[0]):
        acc = 0.0
        for k in range(vals.shape[0]):
            acc += cnts[k] * _ipow(nodes[i], vals[k])
        out[i] = acc / total
    return out


@njit(**_JIT)
def _nodes_null_inar1(vals, cnts, total, p, th, nodes):
    out = np.empty(nodes.shape[0])
    for i in range(nodes.shape[0]):
        u = nodes[i]
        arg = 1.0 + p * (u - 1.0)
        acc = 0.0
        for k in range(vals.shape[0]):
            acc += cnts[k] * _ipow(arg, vals[k])
        out[i] = math.exp(th * (u - 1.0)) * acc / total
    return out


@njit(**_JIT)
def _nodes_null_inarch1(vals, cnts, total, th1, th2, nodes):
    out = np.empty(nodes.shape[0])
    for i in range(nodes.shape[0]):
        u = nodes[i]
        acc = 0.0
        for k in range(vals.shape[0]):
            acc += cnts[k] * math.exp((th1 + th2 * vals[k]) * (u - 1.0))
        out[i] = acc / total
    return out


@njit(**_JIT)
def _nodes_null_inar2(pv1, pv2, pc, total, p1, p2, th, nodes):
    out = np.empty(nodes.shape[0])
    for i in range(nodes.shape[0]):
        u = nodes[i]
        a1 = 1.0 + p1 * (u - 1.0)
        a2 = 1.0 + p2 * (u - 1.0)
        acc = 0.0
        for k in range(pv1.shape[0]):
            acc += pc[k] * _ipow(a1, pv1[k]) * _ipow(a2, pv2[k])
        out[i] = math.exp(th * (u - 1.0)) * acc / total
    return out


# --------------------------------------------------------------------------
# public statistic evaluations

def _histogram(values: np.ndarray):
    vals, cnts = np.unique(values, return_counts=True)
    return vals.astype(np.int64), cnts.astype(np.float64)


def _series_values(series) -> np.ndarray:
    if isinstance(series, CountSeries):
        return series.values
    return CountSeries(series).values


def weighted_l2(emp: np.ndarray, null: np.ndarray, rule: QuadratureRule,
                a: float, scale: float) -> float:
    """scale * sum of w_i (emp_i - null_i)^2 u_i^a over the rule nodes.

    The quadrature statistic in terms of precomputed PGF curves; feeding the
    same curve twice gives exactly zero.
    """
    d = emp - null
    return float(scale * np.sum(rule.weights * d * d * rule.nodes ** a))


def _floor_negative(s: float, route: str) -> float:
    if s < _NEG_FLOOR:
        warnings.warn(f"{route} statistic came out {s:.3e} < {_NEG_FLOOR}; "
                      "flooring at 0, but this indicates a defect")
    return max(s, 0.0)


def statistic_closed_inar1(series, p_hat: float, theta_hat: float, a: float) -> float:
    """Closed-form statistic against the fitted Poisson INAR(1) null."""
    if not 0.0 < p_hat < 1.0:
        raise ValueError("p_hat must be in (0, 1)")
    if not theta_hat > 0.0:
        raise ValueError("theta_hat must be > 0")
    if not a >= 0.0:
        raise ValueError("a must be >= 0")
    vals, cnts = _histogram(_series_values(series))
    rule = default_rule()
    s = _closed_inar1(vals, cnts, float(p_hat), float(theta_hat), float(a),
                      rule.nodes, rule.weights)
    return _floor_negative(s, "closed INAR(1)")


def statistic_closed_inarch1(series, theta1_hat: float, theta2_hat: float,
                             a: float) -> float:
    """Closed-form statistic against the fitted Poisson INARCH(1) null."""
    if not theta1_hat > 0.0:
        raise ValueError("theta1_hat must be > 0")
    if not 0.0 <= theta2_hat < 1.0:
        raise ValueError("theta2_hat must be in [0, 1)")
    if not a >= 0.0:
        raise ValueError("a must be >= 0")
    vals, cnts = _histogram(_series_values(series))
    rule = default_rule()
    s = _closed_inarch1(vals, cnts, float(theta1_hat), float(theta2_hat),
                        float(a), rule.nodes, rule.weights)
    return _floor_negative(s, "closed INARCH(1)")


def _pair_histogram(values: np.ndarray):
    pairs = np.stack([values[1:], values[:-1]], axis=1)
    uniq, cnts = np.unique(pairs, axis=0, return_counts=True)
    return (uniq[:, 0].astype(np.int64), uniq[:, 1].astype(np.int64),
            cnts.astype(np.float64))


def statistic_inar2(series, p1_hat: float, p2_hat: float, theta_hat: float,
                    a: float, rule: Optional[QuadratureRule] = None) -> float:
    """Quadrature statistic against the fitted Poisson INAR(2) null.

    The empirical side uses all T observations; the null side couples the
    joint empirical PGF of the T - 1 lagged pairs with the fitted Poisson
    innovation factor.
    """
    if not (p1_hat >= 0.0 and p2_hat >= 0.0 and p1_hat + p2_hat < 1.0):
        raise ValueError("p1_hat, p2_hat must be >= 0 with p1_hat + p2_hat < 1")
    if not theta_hat > 0.0:
        raise ValueError("theta_hat must be > 0")
    if not a >= 0.0:
        raise ValueError("a must be >= 0")
    values = _series_values(series)
    if values.size < 2:
        raise SeriesTooShort("INAR(2) statistic needs at least 2 observations")
    rule = rule or default_rule()
    vals, cnts = _histogram(values)
    emp = _nodes_empirical(vals, cnts, float(values.size), rule.nodes)
    pv1, pv2, pc = _pair_histogram(values)
    nullv = _nodes_null_inar2(pv1, pv2, pc, float(values.size - 1),
                              float(p1_hat), float(p2_hat), float(theta_hat),
                              rule.nodes)
    return weighted_l2(emp, nullv, rule, float(a), float(values.size))


def statistic_quadrature(series, null: NullEstimate, weight: WeightSpec,
                         rule: Optional[QuadratureRule] = None) -> float:
    """Quadrature statistic for any fitted null family.

    The empirical PGF comes from ``series``; the null PGF is bound to
    ``null.series`` (the same series in ordinary use).
    """
    rule = rule or default_rule()
    values = _series_values(series)
    vals, cnts = _histogram(values)
    emp = _nodes_empirical(vals, cnts, float(values.size), rule.nodes)
    p = null.params
    nvalues = null.series.values
    nvals, ncnts = _histogram(nvalues)
    if null.family == INAR1:
        nullv = _nodes_null_inar1(nvals, ncnts, float(nvalues.size),
                                  float(p["p"]), float(p["theta"]), rule.nodes)
    elif null.family == INARCH1:
        nullv = _nodes_null_inarch1(nvals, ncnts, float(nvalues.size),
                                    float(p["theta1"]), float(p["theta2"]),
                                    rule.nodes)
    else:
        pv1, pv2, pc = _pair_histogram(nvalues)
        nullv = _nodes_null_inar2(pv1, pv2, pc, float(nvalues.size - 1),
                                  float(p["p1"]), float(p["p2"]),
                                  float(p["theta"]), rule.nodes)
    return weighted_l2(emp, nullv, rule, float(weight.a), float(values.size))


# --------------------------------------------------------------------------
# route dispatch used by the bootstrap and the harness

ROUTES = ("auto", "closed", "quadrature")


def _rule_for_max(maxy: int) -> QuadratureRule:
    # 128 nodes integrate the squared empirical polynomial exactly up to
    # max count 127; beyond that the order grows with the data
    if maxy <= 120:
        return default_rule()
    return default_rule(int(maxy) + 16)


def statistic_for_fit(series, family: str, params: dict, a: float,
                      route: str = "auto") -> tuple:
    """Evaluate the statistic for fitted parameters, choosing the route.

    ``auto`` uses the closed form for the INAR(1)/INARCH(1) nulls while the
    largest count is at most Y_SAFE and quadrature otherwise (the two agree
    to ~1e-10 relative, so mixing routes across bootstrap replicates is
    harmless). Returns (value, route_used).
    """
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}")
    values = _series_values(series)
    maxy = int(values.max())
    if route == "closed" and family == INAR2:
        raise ValueError("poisson-inar2 has no closed form; use quadrature")
    if route == "auto":
        route = "closed" if family != INAR2 and maxy <= Y_SAFE else "quadrature"
    if route == "closed":
        if family == INAR1:
            return statistic_closed_inar1(values, params["p"], params["theta"], a), "closed"
        return statistic_closed_inarch1(values, params["theta1"], params["theta2"], a), "closed"
    rule = _rule_for_max(maxy)
    if family == INAR2:
        return statistic_inar2(values, params["p1"], params["p2"],
                               params["theta"], a, rule), "quadrature"
    cs = CountSeries(values)
    est = NullEstimate(family, dict(params), cs)
    return statistic_quadrature(cs, est, WeightSpec(a), rule), "quadrature"
