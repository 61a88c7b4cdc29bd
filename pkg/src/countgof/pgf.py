"""Probability generating functions: empirical, innovation, and fitted nulls.

Everything is evaluated on u in [0, 1] only; the test statistic never needs
values outside that interval and count PGFs are guaranteed finite there.
Integer powers use exponentiation by squaring with the 0^0 = 1 convention,
so u = 0 and zero counts behave exactly.

A fitted null is represented by ``NullEstimate``: the family name, its
parameters, and the series the estimate is bound to. The null PGFs are
semiparametric: a parametric innovation (or conditional) factor times the
empirical PGF of the same series evaluated at a transformed argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .models import CountSeries, EmptySeries, Innovation, SeriesTooShort

INAR1 = "poisson-inar1"
INARCH1 = "poisson-inarch1"
INAR2 = "poisson-inar2"
FAMILIES = (INAR1, INARCH1, INAR2)


def ipow(base: float, n: int) -> float:
    """base**n for integer n >= 0 by squaring, with 0**0 = 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    r = 1.0
    b = float(base)
    k = int(n)
    while k:
        if k & 1:
            r *= b
        k >>= 1
        if k:
            b *= b
    return r


def _check_u(u: float, name: str = "u") -> float:
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"{name} must be in [0, 1]")
    return u


def _values(series) -> np.ndarray:
    vals = series.values if isinstance(series, CountSeries) else np.asarray(series)
    if vals.size == 0:
        raise EmptySeries("series is empty")
    return vals


def empirical_pgf(series, u: float) -> float:
    """Empirical PGF (1/T) sum_t u^{Y_t}."""
    u = _check_u(u)
    vals = _values(series)
    values, counts = np.unique(vals, return_counts=True)
    acc = 0.0
    for v, c in zip(values.tolist(), counts.tolist()):
        acc += c * ipow(u, v)
    return acc / vals.size


def empirical_joint_pgf(series, u: float, v: float) -> float:
    """Empirical joint PGF of (Y_t, Y_{t-1}) over the T - 1 lagged pairs."""
    u = _check_u(u, "u")
    v = _check_u(v, "v")
    vals = _values(series)
    if vals.size < 2:
        raise SeriesTooShort("joint PGF needs at least 2 observations")
    acc = 0.0
    for yt, ym in zip(vals[1:].tolist(), vals[:-1].tolist()):
        acc += ipow(u, yt) * ipow(v, ym)
    return acc / (vals.size - 1)


def innovation_pgf(spec: Innovation, u: float) -> float:
    """PGF of an innovation distribution at u."""
    u = _check_u(u)
    return float(spec.pgf(u))


_REQUIRED = {
    INAR1: ("p", "theta"),
    INARCH1: ("theta1", "theta2"),
    INAR2: ("p1", "p2", "theta"),
}


@dataclass(frozen=True)
class NullEstimate:
    """A fitted null family bound to the series the fit came from."""

    family: str
    params: Dict[str, float]
    series: CountSeries = field(repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        missing = [k for k in _REQUIRED[self.family] if k not in self.params]
        if missing:
            raise ValueError(f"{self.family} estimate is missing {missing}")
        p = self.params
        if self.family == INAR1:
            if not 0.0 < p["p"] < 1.0:
                raise ValueError("p must be in (0, 1)")
            if not p["theta"] > 0.0:
                raise ValueError("theta must be > 0")
        elif self.family == INARCH1:
            if not p["theta1"] > 0.0:
                raise ValueError("theta1 must be > 0")
            if not 0.0 <= p["theta2"] < 1.0:
                raise ValueError("theta2 must be in [0, 1)")
        else:
            if not p["p1"] >= 0.0:
                raise ValueError("p1 must be >= 0")
            if not p["p2"] >= 0.0:
                raise ValueError("p2 must be >= 0")
            if not p["p1"] + p["p2"] < 1.0:
                raise ValueError("p1 + p2 must be < 1")
            if not p["theta"] > 0.0:
                raise ValueError("theta must be > 0")


def null_pgf_inar1(est: NullEstimate, u: float) -> float:
    """Fitted INAR(1) marginal PGF: Poisson innovation factor times the
    empirical PGF at the thinned argument 1 + p(u - 1)."""
    u = _check_u(u)
    p, th = est.params["p"], est.params["theta"]
    return math.exp(th * (u - 1.0)) * empirical_pgf(est.series, 1.0 + p * (u - 1.0))


def null_pgf_inarch1(est: NullEstimate, u: float) -> float:
    """Fitted INARCH(1) marginal PGF: Poisson factor for the constant part of
    the intensity times the empirical PGF at exp(theta2 (u - 1))."""
    u = _check_u(u)
    th1, th2 = est.params["theta1"], est.params["theta2"]
    return math.exp(th1 * (u - 1.0)) * empirical_pgf(
        est.series, math.exp(th2 * (u - 1.0)))


def null_pgf_inar2(est: NullEstimate, u: float) -> float:
    """Fitted INAR(2) marginal PGF: Poisson innovation factor times the joint
    empirical PGF at the two thinned arguments."""
    u = _check_u(u)
    p1, p2, th = est.params["p1"], est.params["p2"], est.params["theta"]
    return math.exp(th * (u - 1.0)) * empirical_joint_pgf(
        est.series, 1.0 + p1 * (u - 1.0), 1.0 + p2 * (u - 1.0))


_NULL_PGFS = {INAR1: null_pgf_inar1, INARCH1: null_pgf_inarch1, INAR2: null_pgf_inar2}


def null_pgf(est: NullEstimate, u: float) -> float:
    """Fitted null PGF at u, dispatched on the family."""
    return _NULL_PGFS[est.family](est, u)
