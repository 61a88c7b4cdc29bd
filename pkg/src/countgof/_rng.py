"""Pinned random number generation for reproducible simulations.

The bit generator is xoshiro256++ seeded from a single 64-bit integer
through the splitmix64 mixer. Every sampler on top of it is a fixed,
documented algorithm:

* uniform: top 53 bits of an output word,
* Poisson: sequential inversion for lam <= 30, Hormann's PTRS transformed
  rejection for larger means,
* binomial: sequential inversion (BINV) when n <= 64 or the trial count
  times min(p, 1 - p) is at most 10, Hormann's BTRS transformed rejection
  otherwise,
* gamma: Marsaglia-Tsang squeeze method with the usual shape boost below 1,
* standard normal: Marsaglia's polar method.

Nothing delegates to platform or library RNGs, so a seed reproduces the same
draws on every build and OS. Kernels are numba-compiled and GIL-free; the
generator state is an explicit uint64[4] array owned by the caller, which
makes streams cheap values rather than global state.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_U64 = np.uint64
MASK64 = (1 << 64) - 1

_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)

_JIT = {"cache": True, "nogil": True}


@njit(**_JIT)
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


@njit(**_JIT)
def seed_state(seed):
    """Expand a 64-bit seed into a xoshiro256++ state via splitmix64."""
    state = np.empty(4, dtype=np.uint64)
    x = _U64(seed)
    for i in range(4):
        x = x + _GOLDEN
        state[i] = _mix64(x)
    if state[0] | state[1] | state[2] | state[3] == _U64(0):
        state[0] = _GOLDEN  # the all-zero state is a fixed point of xoshiro
    return state


@njit(**_JIT)
def _rotl(x, k):
    return (x << k) | (x >> (_U64(64) - k))


@njit(**_JIT)
def next_u64(state):
    out = _rotl(state[0] + state[3], _U64(23)) + state[0]
    t = state[1] << _U64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], _U64(45))
    return out


@njit(**_JIT)
def uniform(state):
    """Uniform draw on [0, 1) with 53 random bits."""
    return (next_u64(state) >> _U64(11)) * 1.1102230246251565e-16


@njit(**_JIT)
def poisson(state, lam):
    """Poisson variate: inversion for lam <= 30, PTRS rejection above."""
    if lam <= 0.0:
        return np.int64(0)
    if lam <= 30.0:
        u = uniform(state)
        p = math.exp(-lam)
        f = p
        k = np.int64(0)
        # the cap only guards float saturation in the extreme upper tail
        while u > f and k < 400:
            k += 1
            p *= lam / k
            f += p
        return k
    b = 0.931 + 2.53 * math.sqrt(lam)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_lam = math.log(lam)
    while True:
        u = uniform(state) - 0.5
        v = uniform(state)
        us = 0.5 - abs(u)
        kf = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= v_r:
            return np.int64(kf)
        if kf < 0.0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b)
                <= kf * log_lam - lam - math.lgamma(kf + 1.0)):
            return np.int64(kf)


@njit(**_JIT)
def _binv(state, n, p):
    # sequential inversion, requires p <= 0.5
    q = 1.0 - p
    s = p / q
    r = math.exp(n * math.log(q))
    f = r
    u = uniform(state)
    mean = n * p
    limit = np.int64(min(float(n), mean + 45.0 * math.sqrt(mean + 1.0) + 80.0))
    x = np.int64(0)
    while u > f and x < limit:
        x += 1
        r *= s * (n - x + 1.0) / x
        f += r
    return x


@njit(**_JIT)
def _btrs(state, n, p):
    # transformed rejection, requires p <= 0.5 and n * p >= 10
    q = 1.0 - p
    spq = math.sqrt(n * p * q)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = n * p + 0.5
    v_r = 0.92 - 4.2 / b
    alpha = (2.83 + 5.1 / b) * spq
    lpq = math.log(p / q)
    m = math.floor((n + 1.0) * p)
    h = math.lgamma(m + 1.0) + math.lgamma(n - m + 1.0)
    while True:
        u = uniform(state) - 0.5
        v = uniform(state)
        us = 0.5 - abs(u)
        kf = math.floor((2.0 * a / us + b) * u + c)
        if kf < 0.0 or kf > n:
            continue
        if us >= 0.07 and v <= v_r:
            return np.int64(kf)
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(kf + 1.0) - math.lgamma(n - kf + 1.0) + (kf - m) * lpq:
            return np.int64(kf)


@njit(**_JIT)
def binomial(state, n, p):
    """Binomial variate: BINV for small n or mean, BTRS otherwise."""
    if n <= 0 or p <= 0.0:
        return np.int64(0)
    if p >= 1.0:
        return np.int64(n)
    flip = p > 0.5
    ps = 1.0 - p if flip else p
    if n <= 64 or n * ps <= 10.0:
        k = _binv(state, n, ps)
    else:
        k = _btrs(state, n, ps)
    return np.int64(n) - k if flip else k


@njit(**_JIT)
def normal(state):
    """Standard normal via Marsaglia's polar method."""
    while True:
        v1 = 2.0 * uniform(state) - 1.0
        v2 = 2.0 * uniform(state) - 1.0
        s = v1 * v1 + v2 * v2
        if 0.0 < s < 1.0:
            return v1 * math.sqrt(-2.0 * math.log(s) / s)


@njit(**_JIT)
def gamma(state, shape, scale):
    """Gamma variate via Marsaglia-Tsang; boosted below shape 1."""
    boost = 1.0
    k = shape
    if k < 1.0:
        boost = uniform(state) ** (1.0 / k)
        k += 1.0
    d = k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = uniform(state)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return boost * d * v * scale
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return boost * d * v * scale


@njit(**_JIT)
def neg_binomial(state, theta, r):
    """Mean-theta, dispersion-r mixed Poisson: Poisson(Gamma(r, theta / r))."""
    return poisson(state, gamma(state, r, theta / r))


def mix64(z: int) -> int:
    """splitmix64 finalizer on Python ints; reference for the kernels."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Derive the index-th child of a seed.

    Children are decorrelated by a full avalanche pass, so fan-out is safe
    in any order: worker index b always maps to the same child no matter
    how many workers run or how results are collected.
    """
    if index < 0:
        raise ValueError("index must be >= 0")
    return mix64((seed & MASK64) ^ mix64(index + 1))


class RandomStream:
    """A seeded stream of variates; the same seed gives the same draws
    on every platform and build."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._state = seed_state(_U64(self.seed))

    def spawn(self, index: int) -> "RandomStream":
        """Child stream number `index`, independent of this one."""
        return RandomStream(child_seed(self.seed, index))

    def uniform(self) -> float:
        return float(uniform(self._state))

    def poisson(self, lam: float) -> int:
        return int(poisson(self._state, float(lam)))

    def binomial(self, n: int, p: float) -> int:
        return int(binomial(self._state, np.int64(n), float(p)))

    def normal(self) -> float:
        return float(normal(self._state))

    def gamma(self, shape: float, scale: float) -> float:
        return float(gamma(self._state, float(shape), float(scale)))

    def neg_binomial(self, theta: float, r: float) -> int:
        return int(neg_binomial(self._state, float(theta), float(r)))
