"""Independent reference values for the tests.

Nothing here calls the package: the walk is enumerated path by path and
closed forms are written out directly.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def path_counts(tmax: int) -> dict:
    """``{(t, k, m): n}``: number of event sequences of length ``t <= tmax``
    with ``k`` spontaneous returns and ``m`` resets.

    Each sequence of ``t`` events (reset, step up, step down) is visited once by
    depth-first search; the probability of one sequence is
    ``r^m ((1-r)/2)^(t-m)``, so counts suffice for every ``r``.
    """
    counts: Counter = Counter()

    def walk(depth, x, k, m):
        counts[(depth, k, m)] += 1
        if depth == tmax:
            return
        walk(depth + 1, 0, k, m + 1)
        for step in (1, -1):
            nx = x + step
            walk(depth + 1, nx, k + (nx == 0), m)

    walk(0, 0, 0, 0)
    return dict(counts)


def brute_joint_law(r, t: int, tmax: int = 12) -> list[list]:
    """``P[k][m]`` at time ``t`` from the enumeration; exact if ``r`` is a Fraction."""
    half = (1 - r) / 2
    P = [[r * 0 for _ in range(t + 1)] for _ in range(t // 2 + 1)]
    for (depth, k, m), n in path_counts(tmax).items():
        if depth == t:
            P[k][m] += n * r**m * half ** (t - m)
    return P


def central_binomial(n: int) -> Fraction:
    """``b_n = C(2n, n) / 4^n``."""
    return Fraction(math.comb(2 * n, n), 4**n)


def first_return(tau: int) -> Fraction:
    if tau < 2 or tau % 2:
        return Fraction(0)
    n = tau // 2
    return central_binomial(n) / (2 * n - 1)


def survival(tau: int) -> Fraction:
    return central_binomial(tau // 2)


def binomial_pmf(t: int, m: int, r):
    return math.comb(t, m) * r**m * (1 - r) ** (t - m)


def half_gaussian_cdf(x):
    from scipy.special import erf

    return erf(np.asarray(x) / math.sqrt(2.0))


def amplitude(r: float) -> float:
    return math.sqrt(r / (2.0 - r))


def stationary_pmf(r: float, x: int) -> float:
    lam = (1.0 + math.sqrt(r * (2.0 - r))) / (1.0 - r)
    return amplitude(r) * lam ** (-abs(x))


# Reference extrema and minima, frozen as published values.
XI0 = 0.120084
PHI0 = 0.420084
A_CROSS_MAX = 0.134884
R_AT_A_CROSS_MAX = 0.160713
SIGMA_MAX = 0.126530
R_AT_SIGMA_MAX = 0.260465
