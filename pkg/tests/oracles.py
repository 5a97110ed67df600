"""Independent exact re-implementations used as test oracles.

Everything here works on integer data in rational arithmetic, so ties are
decided exactly rather than up to floating-point tolerance.  Square roots
never appear: ``sqrt(a) * x <= sqrt(b) * y`` is decided from signs and
squares.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache


def mean(seg) -> Fraction:
    return Fraction(sum(seg), len(seg))


def median(seg) -> Fraction:
    s = sorted(seg)
    m = len(s) // 2
    return Fraction(s[m]) if len(s) % 2 else Fraction(s[m - 1] + s[m], 2)


def trimmed_mean(seg, gamma=0.25) -> Fraction:
    s = sorted(seg)
    g = math.floor(gamma * len(s))
    core = s[g:len(s) - g]
    return Fraction(sum(core), len(core))


ESTIMATORS = {"mean": mean, "median": median, "trimmed_mean": trimmed_mean}


def estimate(names, seg) -> tuple[Fraction, ...]:
    return tuple(ESTIMATORS[n](seg) for n in names)


def scaled_leq(a: int, x: Fraction, b: int, y: Fraction) -> bool:
    """Exact ``sqrt(a) * x <= sqrt(b) * y`` for positive integers ``a, b``."""
    if x <= 0 <= y:
        return True
    if x > 0 > y:
        return False
    if x > 0:
        return a * x * x <= b * y * y
    return a * x * x >= b * y * y


def exceeds(kind: str, a: int, obs, b: int, analog) -> bool:
    """``observed <= analog`` with observed ``sqrt(a) * obs`` and analog ``sqrt(b) * analog``."""
    if kind == "upper":
        return scaled_leq(a, obs[0], b, analog[0])
    if kind == "lower":
        return scaled_leq(a, -obs[0], b, -analog[0])
    return a * sum(v * v for v in obs) <= b * sum(v * v for v in analog)


def subsample_pvalue(x, l, names, theta0, kind) -> Fraction:
    n = len(x)
    full = estimate(names, x)
    obs = tuple(f - Fraction(t) for f, t in zip(full, theta0))
    N = n - l + 1
    hits = 0
    for j in range(N):
        w = estimate(names, x[j:j + l])
        if exceeds(kind, n, obs, l, tuple(a - f for a, f in zip(w, full))):
            hits += 1
    return Fraction(hits, N)


def mbb_pvalue(x, l, names, theta0, kind) -> Fraction:
    """Enumerate every ordered choice of block starts (no multiset shortcut)."""
    n = len(x)
    full = estimate(names, x)
    obs = tuple(f - Fraction(t) for f, t in zip(full, theta0))
    m, r = n // l, n % l
    blocks = [tuple(x[s:s + l]) for s in range(n - l + 1)]
    tails = [tuple(x[s:s + r]) for s in range(n - r + 1)] if r else [()]

    @lru_cache(maxsize=None)
    def stat(sample):
        return estimate(names, sample)

    hits = total = 0
    for choice in itertools.product(blocks, repeat=m):
        head = tuple(v for blk in choice for v in blk)
        for tail in tails:
            sample = head + tail
            boot = stat(tuple(sorted(sample)))
            total += 1
            if exceeds(kind, n, obs, n, tuple(a - f for a, f in zip(boot, full))):
                hits += 1
    return Fraction(hits, total)


def mbb_size(n: int, l: int) -> int:
    r = n % l
    return (n - l + 1) ** (n // l) * ((n - r + 1) if r else 1)


def second_stage_region(x, n_prime, l_prime, names) -> list[Fraction]:
    """Second-stage p-values for a location region, by direct enumeration."""
    n = len(x)
    full = estimate(names, x)
    N_prime = n_prime - l_prime + 1
    out = []
    for t in range(n - n_prime + 1):
        sub = estimate(names, x[t:t + n_prime])
        obs = tuple(a - f for a, f in zip(sub, full))
        hits = 0
        for j in range(t, t + N_prime):
            w = estimate(names, x[j:j + l_prime])
            if exceeds("vector_norm", n_prime, obs, l_prime, tuple(a - s for a, s in zip(w, sub))):
                hits += 1
        out.append(Fraction(hits, N_prime))
    return out
