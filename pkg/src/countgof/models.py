"""Count time series models: specifications, validation, simulators, I/O.

Families:

* ``Inar1``: Y_t = thin(Y_{t-1}, p) + eps_t with binomial thinning drawn as
  a single Binomial(Y_{t-1}, p) variate per step.
* ``Inar2``: two independent thinnings of the last two lags plus an
  innovation; stationarity requires p1 + p2 < 1.
* ``Inarch1``: Y_t | past ~ Poisson(theta1 + theta2 * Y_{t-1}); an optional
  dispersion ``r`` swaps the conditional for a NegBinomial with the same
  mean (an overdispersed alternative used in power studies).
* ``Ingarch11``: feedback intensity lam_t = theta1 + theta2 * Y_{t-1}
  + delta * lam_{t-1}.
* ``Inarch1LevelShift``: INARCH(1) whose intensity gains +delta from
  retained position ceil(phi * T) onward. The shift never acts during
  burn-in, so phi locates the break inside the observed window.

Innovations: ``Poisson``, ``NegBinomial`` (mean theta, variance
theta * (1 + theta / r)), ``PoissonMixture``, ``DiracZeroMixture``.

Simulation draws the initial count(s) from the innovation law, intensity
recursions start from the unconditional mean, then ``burn_in`` warm-up
steps run before the ``T`` retained observations. Identical
(model, T, burn_in, seed) yields the identical series everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numba import njit

from ._rng import MASK64, gamma, poisson, binomial, seed_state, uniform

MAX_COUNT = 2**31 - 1


class EmptySeries(ValueError):
    """A series with no observations."""


class SeriesTooShort(ValueError):
    """A series too short for the requested operation."""


# --------------------------------------------------------------------------
# innovation distributions

@dataclass(frozen=True)
class Poisson:
    """Poisson innovations with mean theta."""

    theta: float

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError("theta must be > 0")

    def mean(self) -> float:
        return self.theta

    def pgf(self, u: float) -> float:
        return math.exp(self.theta * (u - 1.0))

    def _encoded(self):
        return 0, float(self.theta), 0.0, 0.0


@dataclass(frozen=True)
class NegBinomial:
    """Negative binomial innovations with mean theta and dispersion r.

    Variance is theta * (1 + theta / r); drawn as a Gamma(r, theta / r)
    mixed Poisson, which matches the PGF (r / (r + theta * (1 - u)))^r.
    """

    theta: float
    r: float

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError("theta must be > 0")
        if not self.r > 0.0:
            raise ValueError("r must be > 0")

    def mean(self) -> float:
        return self.theta

    def pgf(self, u: float) -> float:
        return (self.r / (self.r + self.theta * (1.0 - u))) ** self.r

    def _encoded(self):
        return 1, float(self.theta), float(self.r), 0.0


@dataclass(frozen=True)
class PoissonMixture:
    """Two-component Poisson mixture: lam1 with probability phi, else lam2."""

    phi: float
    lam1: float
    lam2: float

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError("phi must be in [0, 1]")
        if not self.lam1 > 0.0:
            raise ValueError("lam1 must be > 0")
        if not self.lam2 > 0.0:
            raise ValueError("lam2 must be > 0")

    def mean(self) -> float:
        return self.phi * self.lam1 + (1.0 - self.phi) * self.lam2

    def pgf(self, u: float) -> float:
        return (self.phi * math.exp(self.lam1 * (u - 1.0))
                + (1.0 - self.phi) * math.exp(self.lam2 * (u - 1.0)))

    def _encoded(self):
        return 2, float(self.phi), float(self.lam1), float(self.lam2)


@dataclass(frozen=True)
class DiracZeroMixture:
    """Zero-inflated Poisson: exact zero with probability phi, else Poisson(lam)."""

    phi: float
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError("phi must be in [0, 1]")
        if not self.lam > 0.0:
            raise ValueError("lam must be > 0")

    def mean(self) -> float:
        return (1.0 - self.phi) * self.lam

    def pgf(self, u: float) -> float:
        return self.phi + (1.0 - self.phi) * math.exp(self.lam * (u - 1.0))

    def _encoded(self):
        return 3, float(self.phi), float(self.lam), 0.0


Innovation = Union[Poisson, NegBinomial, PoissonMixture, DiracZeroMixture]


# --------------------------------------------------------------------------
# model specifications

@dataclass(frozen=True)
class Inar1:
    """INAR(1): binomial thinning with survival probability p plus an innovation."""

    p: float
    innovation: Innovation

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must be in (0, 1)")


@dataclass(frozen=True)
class Inar2:
    """INAR(2): independent thinnings of the last two lags plus an innovation."""

    p1: float
    p2: float
    innovation: Innovation

    def __post_init__(self):
        if not 0.0 <= self.p1 < 1.0:
            raise ValueError("p1 must be in [0, 1)")
        if not 0.0 <= self.p2 < 1.0:
            raise ValueError("p2 must be in [0, 1)")
        if not self.p1 + self.p2 < 1.0:
            raise ValueError("p1 + p2 must be < 1")


@dataclass(frozen=True)
class Inarch1:
    """INARCH(1): conditionally Poisson with intensity theta1 + theta2 * Y_{t-1}.

    With ``r`` set, the conditional is NegBinomial with the same mean and
    dispersion r instead of Poisson.
    """

    theta1: float
    theta2: float
    r: Optional[float] = None

    def __post_init__(self):
        if not self.theta1 > 0.0:
            raise ValueError("theta1 must be > 0")
        if not 0.0 <= self.theta2 < 1.0:
            raise ValueError("theta2 must be in [0, 1)")
        if self.r is not None and not self.r > 0.0:
            raise ValueError("r must be > 0")


@dataclass(frozen=True)
class Ingarch11:
    """INGARCH(1,1): intensity theta1 + theta2 * Y_{t-1} + delta * lam_{t-1}."""

    theta1: float
    theta2: float
    delta: float

    def __post_init__(self):
        if not self.theta1 > 0.0:
            raise ValueError("theta1 must be > 0")
        if not self.theta2 >= 0.0:
            raise ValueError("theta2 must be >= 0")
        if not self.delta >= 0.0:
            raise ValueError("delta must be >= 0")
        if not self.theta2 + self.delta < 1.0:
            raise ValueError("theta2 + delta must be < 1")


@dataclass(frozen=True)
class Inarch1LevelShift:
    """INARCH(1) with intensity shifted by +delta from retained index ceil(phi * T)."""

    theta1: float
    theta2: float
    delta: float
    phi: float

    def __post_init__(self):
        if not self.theta1 > 0.0:
            raise ValueError("theta1 must be > 0")
        if not 0.0 <= self.theta2 < 1.0:
            raise ValueError("theta2 must be in [0, 1)")
        if not self.delta >= 0.0:
            raise ValueError("delta must be >= 0")
        if not 0.0 < self.phi < 1.0:
            raise ValueError("phi must be in (0, 1)")


Model = Union[Inar1, Inar2, Inarch1, Ingarch11, Inarch1LevelShift]


# --------------------------------------------------------------------------
# series container and CSV I/O

class CountSeries:
    """Immutable validated series of nonnegative integer counts."""

    __slots__ = ("values",)

    def __init__(self, values):
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise ValueError("series must be one-dimensional")
        if arr.size == 0:
            raise EmptySeries("series is empty")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
                raise ValueError("counts must be integers")
        elif arr.dtype.kind not in "iu":
            raise ValueError("counts must be integers")
        if np.any(arr < 0):
            raise ValueError("counts must be nonnegative")
        if np.any(arr > MAX_COUNT):
            raise ValueError(f"counts must be <= {MAX_COUNT}")
        arr = arr.astype(np.int64)
        arr.flags.writeable = False
        self.values = arr

    def __len__(self) -> int:
        return int(self.values.size)

    def max(self) -> int:
        return int(self.values.max())

    def __repr__(self) -> str:
        return f"CountSeries(T={len(self)}, max={self.max()})"


def read_series(path) -> CountSeries:
    """Read a single-column CSV of counts; a leading ``y`` header is optional."""
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.strip()
            if not text:
                continue
            if lineno == 1 and text == "y":
                continue
            try:
                vals.append(int(text))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: expected an integer count, got {text!r}"
                ) from None
    if not vals:
        raise EmptySeries(f"{path}: no counts found")
    return CountSeries(vals)


def write_series(series: CountSeries, path) -> None:
    """Write a series as a single-column CSV with a ``y`` header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("y\n")
        for v in series.values.tolist():
            fh.write(f"{v}\n")


# --------------------------------------------------------------------------
# config dict (de)serialization, used by the TOML harness config and the CLI

_INNOVATION_KINDS = {
    "poisson": (Poisson, ("theta",)),
    "negbin": (NegBinomial, ("theta", "r")),
    "poisson-mixture": (PoissonMixture, ("phi", "lam1", "lam2")),
    "dirac-mixture": (DiracZeroMixture, ("phi", "lam")),
}

_MODEL_KINDS = {
    "inar1": (Inar1, ("p",)),
    "inar2": (Inar2, ("p1", "p2")),
    "inarch1": (Inarch1, ("theta1", "theta2")),
    "ingarch11": (Ingarch11, ("theta1", "theta2", "delta")),
    "inarch1-level-shift": (Inarch1LevelShift, ("theta1", "theta2", "delta", "phi")),
}


def innovation_to_dict(spec: Innovation) -> dict:
    for kind, (cls, fields) in _INNOVATION_KINDS.items():
        if isinstance(spec, cls):
            out = {"kind": kind}
            out.update({f: getattr(spec, f) for f in fields})
            return out
    raise ValueError(f"unknown innovation {spec!r}")


def innovation_from_dict(data: dict) -> Innovation:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _INNOVATION_KINDS:
        raise ValueError(f"unknown innovation kind {kind!r}")
    cls, fields = _INNOVATION_KINDS[kind]
    missing = [f for f in fields if f not in data]
    if missing:
        raise ValueError(f"innovation {kind!r} is missing {missing}")
    kwargs = {f: float(data.pop(f)) for f in fields}
    if data:
        raise ValueError(f"innovation {kind!r} has unknown keys {sorted(data)}")
    return cls(**kwargs)


def model_to_dict(model: Model) -> dict:
    for kind, (cls, fields) in _MODEL_KINDS.items():
        if isinstance(model, cls):
            out = {"kind": kind}
            out.update({f: getattr(model, f) for f in fields})
            if isinstance(model, Inarch1) and model.r is not None:
                out["r"] = model.r
            if hasattr(model, "innovation"):
                out["innovation"] = innovation_to_dict(model.innovation)
            return out
    raise ValueError(f"unknown model {model!r}")


def model_from_dict(data: dict) -> Model:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    cls, fields = _MODEL_KINDS[kind]
    missing = [f for f in fields if f not in data]
    if missing:
        raise ValueError(f"model {kind!r} is missing {missing}")
    kwargs = {f: float(data.pop(f)) for f in fields}
    if kind == "inarch1" and "r" in data:
        kwargs["r"] = float(data.pop("r"))
    if kind in ("inar1", "inar2"):
        innov = data.pop("innovation", None)
        if innov is None:
            raise ValueError(f"model {kind!r} requires an innovation table")
        kwargs["innovation"] = innovation_from_dict(innov)
    if data:
        raise ValueError(f"model {kind!r} has unknown keys {sorted(data)}")
    return cls(**kwargs)


# --------------------------------------------------------------------------
# simulators

_JIT = {"cache": True, "nogil": True}


@njit(**_JIT)
def _innovation(state, kind, a0, a1, a2):
    if kind == 0:
        return poisson(state, a0)
    if kind == 1:
        return poisson(state, gamma(state, a1, a0 / a1))
    if kind == 2:
        if uniform(state) < a0:
            return poisson(state, a1)
        return poisson(state, a2)
    if uniform(state) < a0:
        return np.int64(0)
    return poisson(state, a1)


@njit(**_JIT)
def _cond_count(state, lam, r):
    if r > 0.0:
        return poisson(state, gamma(state, r, lam / r))
    return poisson(state, lam)


@njit(**_JIT)
def _sim_inar1(seed, n_keep, burn, p, ikind, a0, a1, a2):
    state = seed_state(seed)
    out = np.empty(n_keep, dtype=np.int64)
    y = _innovation(state, ikind, a0, a1, a2)
    for t in range(burn + n_keep):
        y = binomial(state, y, p) + _innovation(state, ikind, a0, a1, a2)
        if t >= burn:
            out[t - burn] = y
    return out


@njit(**_JIT)
def _sim_inar2(seed, n_keep, burn, p1, p2, ikind, a0, a1, a2):
    state = seed_state(seed)
    out = np.empty(n_keep, dtype=np.int64)
    y1 = _innovation(state, ikind, a0, a1, a2)  # lag-1 start
    y2 = _innovation(state, ikind, a0, a1, a2)  # lag-2 start
    for t in range(burn + n_keep):
        y = (binomial(state, y1, p1) + binomial(state, y2, p2)
             + _innovation(state, ikind, a0, a1, a2))
        y2 = y1
        y1 = y
        if t >= burn:
            out[t - burn] = y
    return out


@njit(**_JIT)
def _sim_inarch1(seed, n_keep, burn, th1, th2, r):
    state = seed_state(seed)
    out = np.empty(n_keep, dtype=np.int64)
    y = _cond_count(state, th1 / (1.0 - th2), r)
    for t in range(burn + n_keep):
        y = _cond_count(state, th1 + th2 * y, r)
        if t >= burn:
            out[t - burn] = y
    return out


@njit(**_JIT)
def _sim_ingarch11(seed, n_keep, burn, th1, th2, delta):
    state = seed_state(seed)
    out = np.empty(n_keep, dtype=np.int64)
    lam = th1 / (1.0 - th2 - delta)
    y = poisson(state, lam)
    for t in range(burn + n_keep):
        lam = th1 + th2 * y + delta * lam
        y = poisson(state, lam)
        if t >= burn:
            out[t - burn] = y
    return out


@njit(**_JIT)
def _sim_inarch1_shift(seed, n_keep, burn, th1, th2, delta, tau0):
    # tau0 is the 1-based retained index from which +delta applies
    state = seed_state(seed)
    out = np.empty(n_keep, dtype=np.int64)
    y = poisson(state, th1 / (1.0 - th2))
    for t in range(burn + n_keep):
        lam = th1 + th2 * y
        if t >= burn and t - burn + 1 >= tau0:
            lam += delta
        y = poisson(state, lam)
        if t >= burn:
            out[t - burn] = y
    return out


def _simulate_values(model: Model, T: int, burn_in: int, seed: int) -> np.ndarray:
    seed_u = np.uint64(int(seed) & MASK64)
    if isinstance(model, Inar1):
        k, a0, a1, a2 = model.innovation._encoded()
        return _sim_inar1(seed_u, T, burn_in, float(model.p), k, a0, a1, a2)
    if isinstance(model, Inar2):
        k, a0, a1, a2 = model.innovation._encoded()
        return _sim_inar2(seed_u, T, burn_in, float(model.p1), float(model.p2),
                          k, a0, a1, a2)
    if isinstance(model, Inarch1):
        r = 0.0 if model.r is None else float(model.r)
        return _sim_inarch1(seed_u, T, burn_in, float(model.theta1),
                            float(model.theta2), r)
    if isinstance(model, Ingarch11):
        return _sim_ingarch11(seed_u, T, burn_in, float(model.theta1),
                              float(model.theta2), float(model.delta))
    if isinstance(model, Inarch1LevelShift):
        tau0 = math.ceil(model.phi * T)
        return _sim_inarch1_shift(seed_u, T, burn_in, float(model.theta1),
                                  float(model.theta2), float(model.delta),
                                  tau0)
    raise ValueError(f"unknown model {model!r}")


def simulate(model: Model, T: int, *, seed: int, burn_in: int = 500) -> CountSeries:
    """Simulate ``T`` observations after ``burn_in`` warm-up steps.

    Pure in (model, T, burn_in, seed): the same arguments always produce
    the same series, independent of platform or previous calls.
    """
    if not isinstance(T, (int, np.integer)) or isinstance(T, bool) or T < 1:
        raise ValueError("T must be a positive integer")
    if not isinstance(burn_in, (int, np.integer)) or burn_in < 0:
        raise ValueError("burn_in must be a nonnegative integer")
    return CountSeries(_simulate_values(model, int(T), int(burn_in), seed))


def sample_innovation(spec: Innovation, rng) -> int:
    """Draw one innovation variate from ``spec`` using a RandomStream."""
    kind, a0, a1, a2 = spec._encoded()
    return int(_innovation(rng._state, kind, a0, a1, a2))
