"""Weak-resetting crossover: ``N^x_t ~ sqrt(t) zeta`` with ``u = r t`` fixed.

The density ``f(zeta, u)`` is the inverse Laplace transform, in the variable
``u``, of ``sqrt(2u) exp(-lam sqrt(2u) zeta / sqrt(lam+1)) / sqrt(lam+1)``.
It is evaluated on a fixed Talbot contour after the shift ``p = lam + 1``,
which moves the branch point to the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

#: Validated box for the contour evaluator.
U_RANGE = (1e-3, 50.0)
ZETA_RANGE = (0.0, 10.0)
TALBOT_NODES = 48
#: Highest index of ``g_n`` supported.
G_MAX = 12

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


class CrossoverDomainError(ValueError):
    """Argument outside the validated box of the contour evaluator."""


@dataclass(frozen=True)
class MomentSet:
    """Moments ``mu[k-1] = <zeta^k>`` and cumulants ``gamma[k-1]`` for ``k = 1..kmax``."""

    u: float
    mu: tuple
    gamma: tuple


# -- fixed Talbot inversion ----------------------------------------------------


def _talbot_nodes(M: int):
    pi = 4 * np.arctan(np.longdouble(1))
    theta = np.arange(1, M, dtype=np.longdouble) * (pi / M)
    cot = 1.0 / np.tan(theta)
    sigma = theta + (theta * cot - 1.0) * cot
    return theta, cot, sigma


def talbot_inverse(F, t: float, M: int = TALBOT_NODES) -> float:
    """Fixed-Talbot approximation of the inverse Laplace transform of ``F`` at ``t > 0``.

    ``F`` must accept a complex numpy array.  All singularities of ``F`` must lie
    on the closed negative real axis.
    """
    if t <= 0:
        raise ValueError("inversion time must be positive")
    # The nodes carry factors up to e^{2M/5}; extended precision keeps the
    # cancellation in the sum from eating the last eight digits.
    theta, cot, sigma = _talbot_nodes(M)
    rc = np.longdouble(2 * M) / (5 * np.longdouble(t))
    s = rc * theta * (cot + 1j)
    t_ext = np.longdouble(t)
    F0 = F(np.array([rc], dtype=np.clongdouble))[0]
    terms = np.exp(t_ext * s) * F(s) * (1 + 1j * sigma)
    total = 0.5 * (F0 * np.exp(rc * t_ext)).real + np.sum(terms.real)
    return float(rc / M * total)


def _check_box(zeta: float, u: float) -> None:
    if not U_RANGE[0] <= u <= U_RANGE[1]:
        raise CrossoverDomainError(f"u={u} outside the validated range {U_RANGE}")
    if not ZETA_RANGE[0] <= zeta <= ZETA_RANGE[1]:
        raise CrossoverDomainError(f"zeta={zeta} outside the validated range {ZETA_RANGE}")


def crossover_density(zeta: float, u: float) -> float:
    """Limiting density ``f(zeta, u)`` of ``N^x_t / sqrt(t)`` at ``u = r t``."""
    _check_box(zeta, u)
    c = math.sqrt(2.0 * u)

    def image(p):
        root = np.sqrt(p)
        return c / root * np.exp(-(p - 1.0) * c * zeta / root)

    return max(math.exp(-u) * talbot_inverse(image, u), 0.0)


def crossover_cdf(zeta: float, u: float) -> float:
    """``P(zeta' <= zeta)`` for the crossover law, from the image ``(1 - e^{-lam a})/lam``."""
    _check_box(zeta, u)
    if zeta == 0:
        return 0.0
    c = math.sqrt(2.0 * u) * zeta

    def image(p):
        lam = p - 1.0
        a = c / np.sqrt(p)
        x = lam * a
        small = np.abs(x) < 1e-8
        safe = np.where(small, 1.0, lam)
        # -expm1(-x)/lam, with its limit a (1 - x/2) near lam = 0
        return np.where(small, a * (1.0 - 0.5 * x), -np.expm1(-x) / safe)

    return min(max(math.exp(-u) * talbot_inverse(image, u), 0.0), 1.0)


def density_small_u(zeta, u):
    """Two-term expansion of ``f`` in powers of ``u``."""
    zeta = np.asarray(zeta, dtype=float)
    gauss = SQRT_2_OVER_PI * np.exp(-0.5 * zeta * zeta)
    return gauss + (2.0 * zeta * erfc(zeta / math.sqrt(2.0)) - gauss) * u


def density_large_u(zeta, u):
    """Shifted Gaussian with its first correction in ``1/sqrt(u)``."""
    x = np.asarray(zeta, dtype=float) - math.sqrt(0.5 * u)
    return np.exp(-x * x) * INV_SQRT_PI * (1.0 + x * (2.0 * x * x + 1.0) / (4.0 * math.sqrt(2.0 * u)))


def half_gaussian_cdf(zeta):
    return erf(np.asarray(zeta, dtype=float) / math.sqrt(2.0))


# -- moments ---------------------------------------------------------------------


def g_functions(u: float, nmax: int) -> list[float]:
    """``g_n(u) = int_0^u (u-v)^n e^{-v} / sqrt(pi v) dv`` for ``n = 0..nmax``.

    Evaluated as ``n!/Gamma(n+3/2) u^{n+1/2} e^{-u} M(n+1, n+3/2, u)`` with the
    Kummer series summed term by term; every term is positive.
    """
    if nmax > G_MAX:
        raise ValueError(f"g_n is supported for n <= {G_MAX}")
    if u < 0:
        raise ValueError("u must be nonnegative")
    if u == 0:
        return [0.0] * (nmax + 1)
    out = []
    log_u = math.log(u)
    for n in range(nmax + 1):
        # terms grow to about e^u before decaying, so they are kept as logarithms
        log_terms = [0.0]
        a, b = n + 1.0, n + 1.5
        j = 0
        while j <= u or log_terms[-1] > max(log_terms) - 42.0:
            log_terms.append(log_terms[-1] + math.log((a + j) / (b + j) / (j + 1)) + log_u)
            j += 1
        top = max(log_terms)
        log_sum = top + math.log(math.fsum(math.exp(v - top) for v in log_terms))
        log_pref = math.lgamma(n + 1) - math.lgamma(n + 1.5) + (n + 0.5) * log_u - u
        out.append(math.exp(log_pref + log_sum))
    return out


def g_recursion(u: float, nmax: int) -> list[float]:
    """``g_n`` from the three-term recursion, with compensated summation.

    Forward recursion is stable for ``u >= nmax``; below that it loses digits
    and serves only as a cross-check of :func:`g_functions`.
    """
    if nmax > G_MAX:
        raise ValueError(f"g_n is supported for n <= {G_MAX}")
    e = math.erf(math.sqrt(u))
    g = [e, math.fsum([(u - 0.5) * e, math.sqrt(u / math.pi) * math.exp(-u)])]
    for n in range(2, nmax + 1):
        g.append(math.fsum([(u - n + 0.5) * g[n - 1], (n - 1) * u * g[n - 2]]))
    return g[: nmax + 1]


def moments_even(u: float, nmax: int) -> list[float]:
    """``[mu_2, mu_4, ..., mu_{2 nmax}]``; each is a polynomial of degree ``n`` in ``u``."""
    out = []
    for n in range(1, nmax + 1):
        pref = math.factorial(2 * n) * math.factorial(n) / 2**n
        out.append(
            pref
            * math.fsum(u**m / (math.factorial(m) * math.factorial(n - m) * math.factorial(n + m)) for m in range(n + 1))
        )
    return out


def moments_odd(u: float, nmax: int) -> list[float]:
    """``[mu_1, mu_3, ..., mu_{2 nmax + 1}]``; the ``u = 0`` values are the half-Gaussian ones."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    if u == 0:
        return [SQRT_2_OVER_PI * 2**n * math.factorial(n) for n in range(nmax + 1)]
    g = g_functions(u, 2 * nmax + 1)
    out = []
    for n in range(nmax + 1):
        pref = math.factorial(2 * n + 1) * math.factorial(n + 1) / (2.0 * u) ** (n + 0.5)
        out.append(
            pref
            * math.fsum(
                g[n + m] / (math.factorial(m) * math.factorial(n + 1 - m) * math.factorial(n + m)) for m in range(n + 2)
            )
        )
    return out


def moments(u: float, kmax: int) -> list[float]:
    """``[mu_1, ..., mu_kmax]``."""
    odd = moments_odd(u, (kmax - 1) // 2)
    even = moments_even(u, kmax // 2)
    return [odd[(k - 1) // 2] if k % 2 else even[k // 2 - 1] for k in range(1, kmax + 1)]


def cumulants_from_moments(mu: list[float]) -> list[float]:
    """Cumulants ``kappa_n = mu_n - sum_{m<n} binom(n-1, m-1) kappa_m mu_{n-m}``."""
    kappa = []
    for n in range(1, len(mu) + 1):
        acc = [mu[n - 1]]
        for m in range(1, n):
            acc.append(-math.comb(n - 1, m - 1) * kappa[m - 1] * mu[n - m - 1])
        kappa.append(math.fsum(acc))
    return kappa


def cumulants_gamma(u: float, kmax: int) -> MomentSet:
    if u <= 0:
        raise ValueError("u must be positive")
    mu = moments(u, kmax)
    return MomentSet(u, tuple(mu), tuple(cumulants_from_moments(mu)))


def occupancy_scaling(u: float) -> float:
    """``G(u)`` with ``U^(r)(t) ~ G(r t)/sqrt(t)`` for weak resetting."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    return math.sqrt(u) * math.erf(math.sqrt(u)) / math.sqrt(2.0) + math.exp(-u) / math.sqrt(2.0 * math.pi)
