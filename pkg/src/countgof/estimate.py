"""Conditional least squares estimation for the null families.

Each objective is the sum of squared one-step prediction errors, quadratic
in the parameters, so the estimates are closed-form least squares solutions.
All moment sums are Kahan-compensated; there is no iterative optimizer.

Estimates that fall outside the admissible region are moved inward by
CLAMP_EPS (Euclidean projection for the INAR(2) thinning pair) and flagged.
``FitResult.raw_params`` keeps the unconstrained minimizer so downstream
diagnostics can tell how far the clamp moved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np
from numba import njit

from .models import CountSeries
from .pgf import INAR1, INARCH1, INAR2, NullEstimate

CLAMP_EPS = 1e-6


class DegenerateSeries(Exception):
    """The regression design carries no information (zero variance or collinear)."""


@dataclass(frozen=True)
class FitResult:
    """Conditional least squares fit of a null family."""

    family: str
    params: Dict[str, float]      # admissible, possibly clamped
    raw_params: Dict[str, float]  # unconstrained minimizer
    clamped: Dict[str, bool]
    residual_ss: float

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "raw_params": dict(self.raw_params),
            "clamped": dict(self.clamped),
            "residual_ss": self.residual_ss,
        }


_JIT = {"cache": True, "nogil": True}


@njit(**_JIT)
def _kmean(x):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        y = x[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s / x.shape[0]


@njit(**_JIT)
def _kdot(x, mx, y, my):
    # compensated sum of (x - mx) * (y - my)
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = (x[i] - mx) * (y[i] - my) - c
        t = s + v
        c = (t - s) - v
        s = t
    return s


@njit(**_JIT)
def _ols1(x, y):
    # returns (slope, intercept, degenerate)
    mx = _kmean(x)
    my = _kmean(y)
    sxx = _kdot(x, mx, x, mx)
    if sxx <= 0.0:
        return 0.0, 0.0, True
    sxy = _kdot(x, mx, y, my)
    slope = sxy / sxx
    return slope, my - slope * mx, False


@njit(**_JIT)
def _ols2(x1, x2, y):
    # returns (b1, b2, intercept, degenerate)
    m1 = _kmean(x1)
    m2 = _kmean(x2)
    my = _kmean(y)
    s11 = _kdot(x1, m1, x1, m1)
    s22 = _kdot(x2, m2, x2, m2)
    if s11 <= 0.0 or s22 <= 0.0:
        return 0.0, 0.0, 0.0, True
    s12 = _kdot(x1, m1, x2, m2)
    s1y = _kdot(x1, m1, y, my)
    s2y = _kdot(x2, m2, y, my)
    det = s11 * s22 - s12 * s12
    if det <= 1e-12 * s11 * s22:
        return 0.0, 0.0, 0.0, True
    b1 = (s22 * s1y - s12 * s2y) / det
    b2 = (s11 * s2y - s12 * s1y) / det
    return b1, b2, my - b1 * m1 - b2 * m2, False


@njit(**_JIT)
def _rss1(x, y, slope, intercept):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        e = y[i] - slope * x[i] - intercept
        v = e * e - c
        t = s + v
        c = (t - s) - v
        s = t
    return s


@njit(**_JIT)
def _rss2(x1, x2, y, b1, b2, intercept):
    s = 0.0
    c = 0.0
    for i in range(x1.shape[0]):
        e = y[i] - b1 * x1[i] - b2 * x2[i] - intercept
        v = e * e - c
        t = s + v
        c = (t - s) - v
        s = t
    return s


def _as_float_values(series) -> np.ndarray:
    vals = series.values if isinstance(series, CountSeries) else np.asarray(series)
    return vals.astype(np.float64)


def _clip(v, lo, hi):
    return min(max(v, lo), hi)


def _project_triangle(a: float, b: float, c: float):
    """Euclidean projection of (a, b) onto {x >= 0, y >= 0, x + y <= c}."""
    x = _clip(a, 0.0, c)
    y = _clip(b, 0.0, c)
    if x + y <= c:
        return x, y
    t = _clip((a - b + c) / 2.0, 0.0, c)
    return t, c - t


def cls_inar1(series) -> FitResult:
    """Regress Y_t on Y_{t-1}: the slope estimates the thinning probability,
    the intercept the innovation mean."""
    y = _as_float_values(series)
    if y.size < 3:
        raise DegenerateSeries("need at least 3 observations")
    slope, intercept, bad = _ols1(y[:-1], y[1:])
    if bad:
        raise DegenerateSeries("lagged regressor has zero variance")
    raw = {"p": float(slope), "theta": float(intercept)}
    params = {
        "p": _clip(slope, CLAMP_EPS, 1.0 - CLAMP_EPS),
        "theta": max(intercept, CLAMP_EPS),
    }
    clamped = {k: params[k] != raw[k] for k in raw}
    rss = _rss1(y[:-1], y[1:], params["p"], params["theta"])
    return FitResult(INAR1, params, raw, clamped, float(rss))


def cls_inarch1(series) -> FitResult:
    """Same regression as the INAR(1) fit; the slope estimates the intensity
    feedback theta2, the intercept theta1. theta2 may sit at zero."""
    y = _as_float_values(series)
    if y.size < 3:
        raise DegenerateSeries("need at least 3 observations")
    slope, intercept, bad = _ols1(y[:-1], y[1:])
    if bad:
        raise DegenerateSeries("lagged regressor has zero variance")
    raw = {"theta1": float(intercept), "theta2": float(slope)}
    params = {
        "theta1": max(intercept, CLAMP_EPS),
        "theta2": _clip(slope, 0.0, 1.0 - CLAMP_EPS),
    }
    clamped = {k: params[k] != raw[k] for k in raw}
    rss = _rss1(y[:-1], y[1:], params["theta2"], params["theta1"])
    return FitResult(INARCH1, params, raw, clamped, float(rss))


def cls_inar2(series) -> FitResult:
    """Two-lag regression of Y_t on (Y_{t-1}, Y_{t-2}) with an intercept.

    Thinning estimates are projected onto the simplex
    {p1, p2 >= 0, p1 + p2 <= 1 - CLAMP_EPS}.
    """
    y = _as_float_values(series)
    if y.size < 4:
        raise DegenerateSeries("need at least 4 observations")
    resp, lag1, lag2 = y[2:], y[1:-1], y[:-2]
    b1, b2, intercept, bad = _ols2(lag1, lag2, resp)
    if bad:
        raise DegenerateSeries("lagged regressors are collinear or constant")
    raw = {"p1": float(b1), "p2": float(b2), "theta": float(intercept)}
    p1, p2 = _project_triangle(b1, b2, 1.0 - CLAMP_EPS)
    params = {"p1": p1, "p2": p2, "theta": max(intercept, CLAMP_EPS)}
    clamped = {k: params[k] != raw[k] for k in raw}
    rss = _rss2(lag1, lag2, resp, params["p1"], params["p2"], params["theta"])
    return FitResult(INAR2, params, raw, clamped, float(rss))


_FITTERS = {INAR1: cls_inar1, INARCH1: cls_inarch1, INAR2: cls_inar2}


def fit_family(series, family: str) -> FitResult:
    """Fit one of the null families by conditional least squares."""
    if family not in _FITTERS:
        raise ValueError(f"unknown family {family!r}")
    return _FITTERS[family](series)


def as_null_estimate(fit: FitResult, series: CountSeries) -> NullEstimate:
    """Bind a fit to the series it came from for PGF evaluation."""
    return NullEstimate(fit.family, dict(fit.params), series)
