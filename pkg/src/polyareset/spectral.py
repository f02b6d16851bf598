"""Dominant singularity of the tilted generating function.

The late-time growth of ``<exp(lam N^x + mu N^.)>`` is set by the smallest
positive zero ``w*`` of the denominator ``1 - r y w Z((1-r)w)``.  Clearing the
square root turns that condition into a cubic in ``w`` which is solved by the
trigonometric method.  Squaring also introduces a spurious root (it coincides
with ``w*`` on the line ``lam = 0``), so the genuine zero is picked out with
the unsquared denominator and polished by Newton's method on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .params import as_params

TWO_PI_3 = 2.0 * math.pi / 3.0


class CubicRegionError(ValueError):
    """The cubic does not have three distinct real roots (outside the tilt region)."""


class AdmissibilityError(ValueError):
    """No valid dominant zero could be located for the requested tilt."""


@dataclass(frozen=True)
class TiltPoint:
    lam: float
    mu: float

    @property
    def z(self) -> float:
        return math.exp(self.lam)

    @property
    def y(self) -> float:
        return math.exp(self.mu)


@dataclass(frozen=True)
class CubicCoefficients:
    P3: float
    P2: float
    P1: float
    P0: float

    def __call__(self, w: float) -> float:
        return ((self.P3 * w + self.P2) * w + self.P1) * w + self.P0

    def derivative(self, w: float) -> float:
        return (3.0 * self.P3 * w + 2.0 * self.P2) * w + self.P1

    @property
    def scale(self) -> float:
        return max(abs(self.P3), abs(self.P2), abs(self.P1), abs(self.P0))


@dataclass(frozen=True)
class TrigCubicSolution:
    B: float
    p_red: float
    q_red: float
    radius: float
    theta: float
    w1: float
    w2: float
    w3: float

    @property
    def roots(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)


class Amplitudes(NamedTuple):
    A: float
    A_cross: float


@dataclass(frozen=True)
class StationaryLaw:
    amplitude: float
    ratio: float

    def pmf(self, x):
        return self.amplitude * np.power(self.ratio, -np.abs(np.asarray(x, dtype=float)))


def _unit_open(params) -> float:
    params = as_params(params)
    r = float(params.r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"requires 0 < r < 1, got r = {r}")
    return r


# -- the cubic ---------------------------------------------------------------


def cubic_coeffs(params, lam: float, mu: float) -> CubicCoefficients:
    """Coefficients of the cubic whose roots contain ``w*(e^lam, e^mu)``."""
    r = _unit_open(params)
    z, y = math.exp(lam), math.exp(mu)
    q = 1.0 - r
    return CubicCoefficients(
        P3=q * (q * z + r * y) ** 2,
        P2=(r * y) ** 2 - (q * z) ** 2,
        P1=q * (1.0 - 2.0 * z) - 2.0 * r * y * z,
        P0=2.0 * z - 1.0,
    )


def _reduce(a3: float, a2: float, a1: float, a0: float):
    B = -a2 / (3.0 * a3)
    p = a1 / a3 - a2 * a2 / (3.0 * a3 * a3)
    q = a0 / a3 - a1 * a2 / (3.0 * a3 * a3) + 2.0 * a2**3 / (27.0 * a3**3)
    return B, p, q


def solve_cubic_trig(c: CubicCoefficients, *, allow_degenerate: bool = False) -> TrigCubicSolution:
    """Three real roots by the trigonometric method.

    Roots are returned in the classical labelling ``w1 = B + s cos(theta - 2pi/3)``,
    ``w2 = B + s cos(theta)``, ``w3 = B + s cos(theta + 2pi/3)`` with
    ``s = -sqrt(-4p/3)`` and ``theta`` in ``[0, pi/3]``.

    ``allow_degenerate`` accepts a (numerically) double root instead of
    raising; the caller is then responsible for polishing.
    """
    if c.P3 == 0:
        raise CubicRegionError("leading coefficient vanishes")
    B, p, q = _reduce(c.P3, c.P2, c.P1, c.P0)
    disc = 4.0 * p**3 + 27.0 * q**2
    scale = max(4.0 * abs(p) ** 3, 27.0 * q * q)
    if p >= 0 or disc > 1e-14 * scale:
        raise CubicRegionError(f"cubic has complex roots (4p^3 + 27q^2 = {disc:.3e})")
    if abs(disc) < 1e-14 * scale and not allow_degenerate:
        raise CubicRegionError("near-degenerate discriminant: double root at the region boundary")
    radius = -math.sqrt(-4.0 * p / 3.0)
    arg = -4.0 * q / radius**3
    if abs(arg) > 1.0:
        if abs(arg) - 1.0 > 1e-12 and not allow_degenerate:
            raise CubicRegionError(f"acos argument {arg!r} outside [-1, 1]")
        arg = math.copysign(1.0, arg)
    theta = math.acos(arg) / 3.0
    return TrigCubicSolution(
        B=B,
        p_red=p,
        q_red=q,
        radius=radius,
        theta=theta,
        w1=B + radius * math.cos(theta - TWO_PI_3),
        w2=B + radius * math.cos(theta),
        w3=B + radius * math.cos(theta + TWO_PI_3),
    )


def real_cubic_roots(a3: float, a2: float, a1: float, a0: float) -> list[float]:
    """Real roots of ``a3 w^3 + a2 w^2 + a1 w + a0``, ascending.

    Trigonometric formula when all three are real, Cardano otherwise.
    """
    B, p, q = _reduce(a3, a2, a1, a0)
    disc = 4.0 * p**3 + 27.0 * q**2
    scale = max(4.0 * abs(p) ** 3, 27.0 * q * q)
    if p < 0 and disc <= 1e-12 * scale:
        sol = solve_cubic_trig(CubicCoefficients(a3, a2, a1, a0), allow_degenerate=True)
        return sorted(sol.roots)
    root_d = math.sqrt(max(disc / 108.0, 0.0))
    x = float(np.cbrt(-q / 2.0 + root_d) + np.cbrt(-q / 2.0 - root_d))
    return [B + x]


# -- the unsquared denominator ----------------------------------------------
#
# The zero is tracked through the pair (w, e) with e = 1 - (1-r)w, the gap to
# the branch point of sqrt(1 - ((1-r)w)^2).  Whichever of the two is small is
# the working variable: for strongly negative tilts the zero sits within 1e-30
# of the branch point, for strongly positive ones within 1e-17 of w = 0.


def _denominator(r: float, z: float, y: float, w: float, e: float):
    """``D = e (1 - z (1 - s)) - r y w s`` with ``s = sqrt(e (2-e))``.

    Returns ``(D, dD/de, dD/dz, dD/dy)``; ``dD/dw = -(1-r) dD/de``.
    ``1 - s`` is formed as ``v^2 / (1 + s)`` with ``v = (1-r)w``.
    """
    q = 1.0 - r
    v = q * w
    s = math.sqrt(e * (2.0 - e))
    one_minus_s = v * v / (1.0 + s)
    D = e * (1.0 - z * one_minus_s) - r * y * w * s
    D_e = (1.0 - z * one_minus_s) + z * v * (e / s) + r * y * s / q - r * y * w * v / s
    D_z = -e * one_minus_s
    D_y = -r * w * s
    return D, D_e, D_z, D_y


class _Root(NamedTuple):
    w: float
    e: float
    near_branch: bool


def _pair(r: float, x: float, near_branch: bool) -> tuple[float, float]:
    q = 1.0 - r
    return ((1.0 - x) / q, x) if near_branch else (x, 1.0 - q * x)


def _solve(r: float, z: float, y: float, x0: float | None, near_branch: bool) -> float:
    """Zero of ``D`` in the working variable ``x`` (``e`` or ``w``)."""
    q = 1.0 - r
    # derivative of (w, e) with respect to x
    de_dx = 1.0 if near_branch else -q

    def f(x):
        return _denominator(r, z, y, *_pair(r, x, near_branch))[0]

    if near_branch:
        lo, hi = 1e-300, 0.5
    else:
        lo, hi = 0.0, 0.5 / q
    if x0 is not None:
        x = x0
        for _ in range(60):
            D, D_e, _, _ = _denominator(r, z, y, *_pair(r, x, near_branch))
            step = D / (D_e * de_dx)
            x_new = x - step
            if not lo < x_new <= hi or not math.isfinite(x_new):
                break
            if abs(x_new - x) <= 4e-16 * x_new:
                return x_new
            x = x_new
    # D > 0 at w = 0 and D < 0 next to the branch point
    if not (f(lo) * f(hi) <= 0):
        raise AdmissibilityError("no sign change of the denominator")
    return brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=2000)


def _dominant(r: float, lam: float, mu: float) -> _Root:
    z, y = math.exp(lam), math.exp(mu)
    q = 1.0 - r
    # which half of (0, 1/(1-r)) holds the zero: D decreases through it
    near_branch = _denominator(r, z, y, 0.5 / q, 0.5)[0] > 0
    x0 = None
    try:
        c = cubic_coeffs(r, lam, mu)
        roots = [w for w in real_cubic_roots(c.P3, c.P2, c.P1, c.P0) if 0.0 < q * w < 1.0]
    except (CubicRegionError, ZeroDivisionError, OverflowError, ValueError):
        roots = []
    if roots:
        scale = 1.0 + z + y
        best = min(roots, key=lambda w: abs(_denominator(r, z, y, w, 1.0 - q * w)[0]) / scale)
        x0 = 1.0 - q * best if near_branch else best
    x = _solve(r, z, y, x0, near_branch)
    w, e = _pair(r, x, near_branch)
    return _Root(w, e, near_branch)


def dominant_root(params, lam: float, mu: float) -> float:
    """Smallest positive zero ``w*`` of the tilted denominator."""
    return _dominant(_unit_open(params), lam, mu).w


def entropy(params, lam: float, mu: float) -> float:
    """Scaled cumulant generating function ``S(lam, mu) = -ln w*``."""
    r = _unit_open(params)
    root = _dominant(r, lam, mu)
    if root.near_branch:
        return math.log1p(-r) - math.log1p(-root.e)
    return -math.log(root.w)


def entropy_grad(params, lam: float, mu: float) -> tuple[float, float]:
    """``(dS/dlam, dS/dmu)`` by implicit differentiation of the denominator."""
    r = _unit_open(params)
    root = _dominant(r, lam, mu)
    z, y = math.exp(lam), math.exp(mu)
    _, D_e, D_z, D_y = _denominator(r, z, y, root.w, root.e)
    if D_e == 0:
        raise AdmissibilityError("double zero of the denominator")
    # w dD/dw = -(1-r) w dD/de
    wD_w = -(1.0 - r) * root.w * D_e
    return z * D_z / wD_w, y * D_y / wD_w


def entropy_grad_cubic(params, lam: float, mu: float) -> tuple[float, float]:
    """Same gradient from the cubic: ``xi = z P_z / (w P_w)`` at ``w*``.

    Singular on ``lam = 0``, where ``w*`` is a double root of the cubic.
    """
    r = _unit_open(params)
    q = 1.0 - r
    w = dominant_root(params, lam, mu)
    z, y = math.exp(lam), math.exp(mu)
    c = cubic_coeffs(params, lam, mu)
    P_w = c.derivative(w)
    if abs(P_w) <= 1e-12 * c.scale:
        raise AdmissibilityError("critical point of the cubic (double root)")
    lin = q * z + r * y
    P_z = 2 * q * q * lin * w**3 - 2 * q * q * z * w**2 + (-2 * q - 2 * r * y) * w + 2.0
    P_y = 2 * r * q * lin * w**3 + 2 * r * r * y * w**2 - 2 * r * z * w
    return z * P_z / (w * P_w), y * P_y / (w * P_w)


# -- amplitudes, decay rate, stationary law ----------------------------------


def amplitudes(params) -> Amplitudes:
    """Growth rates ``A = sqrt(r/(2-r))`` of returns+resets and ``A^x = A - r`` of returns."""
    r = float(as_params(params).r)
    A = math.sqrt(r / (2.0 - r))
    return Amplitudes(A, A - r)


def decay_rate(params) -> float:
    """Exponential tail rate of the dressed return-time law.

    ``e^sigma`` is the smallest root above 1 of
    ``r^2 (1-r) w^3 + r^2 w^2 + (1-r) w - 1``.
    """
    r = _unit_open(params)
    q = 1.0 - r
    coeffs = (r * r * q, r * r, q, -1.0)
    roots = [w for w in real_cubic_roots(*coeffs) if w > 1.0 and q * w < 1.0]
    if not roots:
        raise AdmissibilityError(f"no admissible root for r={r}")
    w = min(roots)
    for _ in range(5):
        f = ((coeffs[0] * w + coeffs[1]) * w + coeffs[2]) * w + coeffs[3]
        df = (3 * coeffs[0] * w + 2 * coeffs[1]) * w + coeffs[2]
        w -= f / df
    return math.log(w)


def golden_section_max(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Maximiser and maximum of a unimodal ``f`` on ``[a, b]``."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def max_cross_amplitude() -> tuple[float, float]:
    """``(argmax_r, max)`` of ``A^x(r)``."""
    return golden_section_max(lambda r: amplitudes(r).A_cross, 1e-4, 1.0 - 1e-4)


def max_decay_rate() -> tuple[float, float]:
    """``(argmax_r, max)`` of the decay rate."""
    return golden_section_max(decay_rate, 1e-4, 1.0 - 1e-4)


def stationary_law(params) -> StationaryLaw:
    """Steady-state position law ``p(x) = A * ratio^{-|x|}``."""
    r = _unit_open(params)
    return StationaryLaw(
        amplitude=math.sqrt(r / (2.0 - r)),
        ratio=(1.0 + math.sqrt(r * (2.0 - r))) / (1.0 - r),
    )
