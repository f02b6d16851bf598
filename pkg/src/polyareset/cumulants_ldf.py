"""Cumulant amplitudes of (crosses, dots) and their large-deviation functions.

The scaled cumulant generating function ``S(lam, mu)`` is expanded as a double
series by Newton iteration on the pair ``v = (1-r)w``, ``s = sqrt(1 - v^2)``,
which satisfies the polynomial system

    (1 - v)(1 - z + z s) - (r/(1-r)) y v s = 0,      v^2 + s^2 = 1,

with ``z = e^lam``, ``y = e^mu``.  When ``r`` is rational the iteration runs in
the exact field Q(A), ``A = sqrt(r/(2-r))``.  Large-deviation functions are
Legendre transforms of ``S`` evaluated through :mod:`polyareset.spectral`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import spectral
from .params import as_params
from .series import BivariateSeries
from .surd import QuadraticSurd

#: Largest total order accepted by :func:`entropy_series`.
MAX_SERIES_ORDER = 12
#: Tilts are bracketed in ``[-TILT_BOUND, TILT_BOUND]``.
TILT_BOUND = 40.0
#: Default number of points and edge shrink for emitted curves.
CURVE_POINTS = 401
CURVE_SHRINK = 1e-4


class LdfError(ValueError):
    """Argument outside the domain of a large-deviation function."""


class LegendreConvergenceError(RuntimeError):
    """Newton iteration for the joint transform failed; carries the last iterate."""

    def __init__(self, message: str, last: "LdfPoint"):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class CumulantTable:
    """``c[(k, l)]`` are the amplitudes of the joint cumulants of (crosses, dots)
    and ``C[n]`` those of their sum, all as floats."""

    r: object
    K: int
    c: dict
    C: dict


@dataclass(frozen=True)
class LdfPoint:
    """Value of a rate function together with the conjugate tilts.

    ``boundary`` is set when the tilt left ``[-40, 40]`` and the reported
    value is the closed-form limit rather than a solver output.
    """

    which: str
    args: tuple
    I: float
    tilt: tuple
    boundary: bool = False
    residual: float = 0.0
    extra: dict = field(default_factory=dict)


# -- series expansion of S ---------------------------------------------------


def _exp_series(K: int, zero, in_lam: bool) -> BivariateSeries:
    fact = [math.factorial(n) for n in range(K + 1)]

    def coef(i, j):
        n, other = (i, j) if in_lam else (j, i)
        return Fraction(1, fact[n]) if other == 0 else 0

    return BivariateSeries.from_function(coef, K, zero)


def _field_constants(params):
    """``(zero, r, q, s0)`` in the exact field Q(A) or in floats."""
    if params.is_exact:
        r = params.r
        d = r / (2 - r)
        zero = QuadraticSurd(0, 0, d)
        A = QuadraticSurd(0, 1, d)
        return zero, zero + r, zero + (1 - r), A * (2 - r)
    r = float(params.r)
    return 0.0, r, 1.0 - r, math.sqrt(r * (2.0 - r))


def _dominant_pair(params, K: int):
    zero, r, q, s0 = _field_constants(params)
    z = _exp_series(K, zero, in_lam=True)
    y = _exp_series(K, zero, in_lam=False)
    ratio = r / q
    v = BivariateSeries.constant(q, K, zero)
    s = BivariateSeries.constant(s0, K, zero)
    m = 0
    while m < K:
        m = min(2 * m + 1, K)
        zt, yt = z.truncate(m), y.truncate(m)
        zs = zt * s
        one_minus_v = 1 - v
        F1 = (one_minus_v * (1 - zt + zs) - yt * v * s * ratio).truncate(m)
        F2 = (v * v + s * s - 1).truncate(m)
        a = -(1 - zt + zs) - yt * s * ratio
        b = one_minus_v * zt - yt * v * ratio
        c = v * 2
        d = s * 2
        inv_det = (a * d - b * c).truncate(m).inverse().truncate(m)
        v = (v - ((d * F1 - b * F2) * inv_det)).truncate(m)
        s = (s - ((a * F2 - c * F1) * inv_det)).truncate(m)
        # the constant terms are known exactly
        v.coeffs[0][0], s.coeffs[0][0] = q, s0
    return v, s, q


def entropy_series(params, K: int = 6) -> BivariateSeries:
    """Double series of ``S(lam, mu) = -ln w*`` to total order ``K``.

    Coefficients are :class:`~polyareset.surd.QuadraticSurd` elements of Q(A)
    for rational ``r`` and floats otherwise.
    """
    params = as_params(params)
    if not 0 < params.r < 1:
        raise ValueError(f"requires 0 < r < 1, got r = {params.r}")
    if not 1 <= K <= MAX_SERIES_ORDER:
        raise ValueError(f"total order must lie in [1, {MAX_SERIES_ORDER}], got {K}")
    v, _, q = _dominant_pair(params, K)
    return -((v / q).log())


def cumulant_amplitudes(params, K: int = 6) -> CumulantTable:
    """``c_{k,l} = k! l! [lam^k mu^l] S`` and ``C_n = sum_k binom(n,k) c_{k,n-k}``."""
    params = as_params(params)
    S = entropy_series(params, K)
    c = {}
    for k in range(K + 1):
        for l in range(K + 1 - k):
            if k + l:
                c[(k, l)] = float(S[k, l] * (math.factorial(k) * math.factorial(l)))
    C = {n: math.fsum(math.comb(n, k) * c[(k, n - k)] for k in range(n + 1)) for n in range(1, K + 1)}
    return CumulantTable(params.r, K, c, C)


def closed_form_cumulants(params) -> CumulantTable:
    """Amplitudes up to third order from their explicit expressions in ``r`` and ``A``.

    ``c_{3,0}`` and ``C_3`` carry a factor ``A/r`` and are infinite at ``r = 0``.
    """
    params = as_params(params)
    r = float(params.r)
    A = math.sqrt(r / (2.0 - r))
    u = 2.0 - r
    A_over_r = math.inf if r == 0 else A / r
    c = {
        (1, 0): A - r,
        (0, 1): r,
        (2, 0): -(4 - 3 * r) / u * A + (2 + 4 * r - 9 * r**2 + 5 * r**3 - r**4) / u**2,
        (1, 1): (1 - r) / u * A - r * (1 - r),
        (0, 2): r * (1 - r),
        (3, 0): (3 + 38 * r - 76 * r**2 + 46 * r**3 - 8 * r**4) / u**3 * A_over_r
        - (12 + 14 * r - 66 * r**2 + 73 * r**3 - 43 * r**4 + 15 * r**5 - 2 * r**6) / u**3,
        (2, 1): -(1 - r) * (4 - 5 * r) / u**2 * A + r * (1 - r) * (12 - 32 * r + 30 * r**2 - 13 * r**3 + 2 * r**4) / u**3,
        (1, 2): (1 - r) * (1 - 2 * r) / u**2 * A - r * (1 - r) * (1 - 2 * r),
        (0, 3): r * (1 - r) * (1 - 2 * r),
    }
    C = {
        1: A,
        2: -A + (2 - r**2) / u**2,
        3: (3 + 20 * r - 31 * r**2 + 10 * r**3 + r**4) / u**3 * A_over_r - 3 * (2 - r**2) / u**2,
    }
    return CumulantTable(params.r, 3, c, C)


# -- amplitudes of the dot count ----------------------------------------------


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind."""
    row = [1] + [0] * k
    for m in range(1, n + 1):
        for j in range(min(m, k), 0, -1):
            row[j] = j * row[j] + row[j - 1]
        row[0] = 0
    return row[k]


def reset_cumulant_polys(lmax: int, method: str = "stirling") -> list[list[Fraction]]:
    """Coefficient lists (ascending powers of ``r``) of ``c_{0,l}``, ``l = 1..lmax``.

    ``method="stirling"`` uses the Stirling-number sum, ``"recursion"`` the
    differential recursion ``c_{0,l+1} = r(1-r) d c_{0,l}/dr``.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    if method == "stirling":
        return [
            [Fraction(0)] + [Fraction((-1) ** (k - 1) * math.factorial(k - 1) * stirling2(l, k)) for k in range(1, l + 1)]
            for l in range(1, lmax + 1)
        ]
    if method != "recursion":
        raise ValueError(f"unknown method {method!r}")
    polys = [[Fraction(0), Fraction(1)]]
    for _ in range(lmax - 1):
        p = polys[-1]
        dp = [k * p[k] for k in range(1, len(p))]
        # multiply by r - r^2
        nxt = [Fraction(0)] * (len(dp) + 2)
        for k, a in enumerate(dp):
            nxt[k + 1] += a
            nxt[k + 2] -= a
        polys.append(nxt)
    return polys


def reset_cumulants(params, lmax: int) -> list:
    """``[c_{0,1}, ..., c_{0,lmax}]`` evaluated at ``r`` (exact for rational ``r``)."""
    r = as_params(params).r
    out = []
    for poly in reset_cumulant_polys(lmax):
        acc = r * 0
        for a in reversed(poly):
            acc = acc * r + a
        out.append(acc)
    return out


# -- weak resetting ------------------------------------------------------------


def weak_reset_scaling(h: float, mu: float) -> float:
    """Scaling function ``F(h, mu)`` with ``S(lam, mu) ~ A^2 F(lam/A, mu)`` as ``r -> 0``."""
    radicand = math.exp(mu) + h * h / 16.0
    if radicand < 0:
        raise ValueError("negative radicand")
    return 2.0 * math.expm1(mu) + h * h / 4.0 + h * math.sqrt(radicand)


def weak_reset_amplitudes(pmax: int) -> list[Fraction]:
    """``a_0..a_pmax``: ``sqrt(1 + x/16) = sum_p a_p x^p / (2p+1)!``."""
    out = []
    for p in range(pmax + 1):
        b_p = Fraction(math.comb(2 * p, p), 4**p)
        sign = 1 if p % 2 else -1
        out.append(sign * Fraction(math.factorial(2 * p + 1), 16**p * (2 * p - 1)) * b_p)
    return out


# -- large deviations ------------------------------------------------------------


def boundary_values(params) -> tuple[float, float, float]:
    """``(I_A, I_B, I_C)`` at the vertices (0,0), (1/2,0), (0,1) of the density triangle."""
    r = float(as_params(params).r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"requires 0 < r < 1, got r = {r}")
    I_A = -math.log1p(-r)
    return I_A, I_A + 0.5 * math.log(2.0), -math.log(r)


def dot_rate(params, eta: float) -> float:
    """Binomial rate function ``eta ln(eta/r) + (1-eta) ln((1-eta)/(1-r))``."""
    r = float(as_params(params).r)

    def term(a, b):
        return 0.0 if a == 0 else a * math.log(a / b)

    return term(eta, r) + term(1.0 - eta, 1.0 - r)


def _hessian(r: float, lam: float, mu: float, h: float = 1e-6) -> np.ndarray:
    gl_p = spectral.entropy_grad(r, lam + h, mu)
    gl_m = spectral.entropy_grad(r, lam - h, mu)
    gm_p = spectral.entropy_grad(r, lam, mu + h)
    gm_m = spectral.entropy_grad(r, lam, mu - h)
    H = np.array(
        [
            [(gl_p[0] - gl_m[0]) / (2 * h), (gm_p[0] - gm_m[0]) / (2 * h)],
            [(gl_p[1] - gl_m[1]) / (2 * h), (gm_p[1] - gm_m[1]) / (2 * h)],
        ]
    )
    return 0.5 * (H + H.T)


def _in_triangle(xi: float, eta: float) -> bool:
    return xi > 0 and eta > 0 and 2 * xi + eta < 1


def legendre_joint(params, xi: float, eta: float, *, tol: float = 1e-10, max_iter: int = 200) -> LdfPoint:
    """``I(xi, eta) = sup_{lam, mu} [lam xi + mu eta - S(lam, mu)]``.

    Damped Newton on the convex dual ``S - lam xi - mu eta`` with a central
    difference Hessian, stopped when the gradient mismatch is below ``tol``.
    """
    r = spectral._unit_open(params)
    if not _in_triangle(xi, eta):
        raise LdfError(f"({xi}, {eta}) is not strictly inside the density triangle")
    target = np.array([xi, eta])

    def dual(t):
        return spectral.entropy(r, t[0], t[1]) - t @ target

    tilt = np.zeros(2)
    val = dual(tilt)
    mismatch = math.inf
    for _ in range(max_iter):
        grad = np.array(spectral.entropy_grad(r, *tilt)) - target
        mismatch = float(np.hypot(*grad))
        if mismatch <= tol:
            break
        H = _hessian(r, *tilt)
        try:
            step = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = -grad
        if not np.all(np.isfinite(step)) or step @ grad >= 0:
            step = -grad / max(np.abs(np.diag(H)).max(), 1e-12)
        norm = float(np.abs(step).max())
        if norm > 4.0:
            step *= 4.0 / norm
        alpha = 1.0
        while alpha > 1e-12:
            trial = np.clip(tilt + alpha * step, -TILT_BOUND, TILT_BOUND)
            trial_val = dual(trial)
            if trial_val <= val + 1e-4 * alpha * (step @ grad) or alpha * norm < 1e-13:
                break
            alpha *= 0.5
        if np.array_equal(trial, tilt):
            break
        tilt, val = trial, trial_val
    point = LdfPoint(
        which="joint",
        args=(xi, eta),
        # I >= 0; rounding can leave -1e-16 at the mean
        I=max(float(tilt @ target - spectral.entropy(r, *tilt)), 0.0),
        tilt=(float(tilt[0]), float(tilt[1])),
        boundary=bool(np.any(np.abs(tilt) >= TILT_BOUND)),
        residual=mismatch,
    )
    if mismatch > tol:
        raise LegendreConvergenceError(f"no convergence at ({xi}, {eta}): mismatch {mismatch:.3e}", point)
    return point


_UNIVARIATE = {
    # which: (valid interval, tilt -> (lam, mu), slope from the gradient)
    "dot": ((0.0, 1.0), lambda t: (0.0, t), lambda g: g[1]),
    "cross": ((0.0, 0.5), lambda t: (t, 0.0), lambda g: g[0]),
    "sum": ((0.0, 1.0), lambda t: (t, t), lambda g: g[0] + g[1]),
}


def _edge_values(params, which: str) -> tuple[float, float]:
    """Rate-function values at the two ends of the univariate interval."""
    I_A, I_B, I_C = boundary_values(params)
    if which == "cross":
        return spectral.decay_rate(params), I_B
    return I_A, I_C


def legendre_univariate(params, which: str, arg: float, *, method: str = "solver") -> LdfPoint:
    """Univariate rate functions of the dots (``"dot"``), crosses (``"cross"``)
    or their sum (``"sum"``) at density ``arg``.

    ``method="closed"`` is available for the dots (binomial form).  Otherwise
    the slope equation is solved by Brent's method with tilts in ``[-40, 40]``;
    densities beyond the reach of that bracket return the edge value with
    ``boundary=True``.
    """
    if which not in _UNIVARIATE:
        raise ValueError(f"which must be one of {sorted(_UNIVARIATE)}")
    r = spectral._unit_open(params)
    (lo, hi), tilt_of, slope_of = _UNIVARIATE[which]
    if not lo < arg < hi:
        raise LdfError(f"{which} density must lie in ({lo}, {hi}), got {arg}")
    if method == "closed":
        if which != "dot":
            raise ValueError("a closed form exists only for the dots")
        mu = math.log(arg / r) - math.log((1.0 - arg) / (1.0 - r))
        return LdfPoint("dot", (arg,), dot_rate(r, arg), (0.0, mu))
    if method != "solver":
        raise ValueError(f"unknown method {method!r}")

    def f(t):
        return slope_of(spectral.entropy_grad(r, *tilt_of(t))) - arg

    f_lo, f_hi = f(-TILT_BOUND), f(TILT_BOUND)
    if f_lo > 0 or f_hi < 0:
        left, right = _edge_values(r, which)
        t = -TILT_BOUND if f_lo > 0 else TILT_BOUND
        return LdfPoint(which, (arg,), left if f_lo > 0 else right, tilt_of(t), boundary=True, residual=abs(f(t)))
    t = brentq(f, -TILT_BOUND, TILT_BOUND, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    lam, mu = tilt_of(t)
    I = max(t * arg - spectral.entropy(r, lam, mu), 0.0)
    return LdfPoint(which, (arg,), I, (lam, mu), residual=abs(f(t)))


def univariate_grid(which: str, points: int = CURVE_POINTS, shrink: float = CURVE_SHRINK) -> np.ndarray:
    lo, hi = _UNIVARIATE[which][0]
    return np.linspace(lo + shrink, hi - shrink, points)


def mean_density(params, which: str) -> float:
    """Location of the minimum of the univariate rate function."""
    A, A_cross = spectral.amplitudes(params)
    return {"dot": float(as_params(params).r), "cross": A_cross, "sum": A}[which]


def quadratic_rate(params, xi: float, eta: float) -> float:
    """Gaussian approximation of ``I`` around the mean densities."""
    A, A_cross = spectral.amplitudes(params)
    c = closed_form_cumulants(params).c
    c20, c11, c02 = c[(2, 0)], c[(1, 1)], c[(0, 2)]
    dx, dy = xi - A_cross, eta - float(as_params(params).r)
    return (c02 * dx * dx - 2 * c11 * dx * dy + c20 * dy * dy) / (2 * (c20 * c02 - c11 * c11))
