"""Exact finite-time laws of returns and resets, by coefficient extraction.

Every quantity here is read off a generating function in the time variable
``w``.  The building blocks are the first-return generating function
``rho(w) = 1 - sqrt(1 - w^2)`` and the survival generating function
``R(w) = (1 - rho(w)) / (1 - w)``; resetting enters through the substitution
``w -> (1 - r) w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import ResetParams, as_params
from .series import EXACT, FLOAT, TruncatedSeries, series_rescale, series_sqrt, variable

#: Largest horizon for the joint law, per field.
JOINT_BUDGET = {EXACT: 64, FLOAT: 256}
#: Largest horizon for univariate laws, per field.
SERIES_BUDGET = {EXACT: 256, FLOAT: 8192}


class BudgetError(ValueError):
    """Requested horizon exceeds the configured truncation order."""


@dataclass(frozen=True)
class ReturnLaw:
    pmf: tuple
    survival: tuple


@dataclass(frozen=True)
class JointLaw:
    """``probs[k][m] = P(crosses = k, dots = m)`` at time ``t``."""

    t: int
    probs: tuple
    field: str

    def marginal_dots(self) -> list:
        return [sum(row[m] for row in self.probs) for m in range(self.t + 1)]

    def marginal_crosses(self) -> list:
        return [sum(row) for row in self.probs]

    def total(self):
        return sum(self.marginal_crosses())

    def mean_crosses(self):
        return sum(k * p for k, p in enumerate(self.marginal_crosses()))

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.probs])


@dataclass(frozen=True)
class DressedLaw:
    r: object
    pmf: tuple
    survival: tuple
    mean_return: float


def _resolve_field(params: ResetParams, field: str | None) -> str:
    if field is None:
        return params.field
    if field == EXACT and not params.is_exact:
        raise ValueError("exact field requested but r is a float; pass r as a ratio such as '3/10'")
    return field


def _check_budget(n: int, field: str, budget: dict, what: str) -> None:
    if n < 0:
        raise ValueError(f"{what} must be nonnegative")
    if n > budget[field]:
        raise BudgetError(f"{what}={n} exceeds the {field} budget of {budget[field]}")


@lru_cache(maxsize=32)
def first_return_gf(order: int, field: str = EXACT) -> TruncatedSeries:
    """``rho(w) = 1 - sqrt(1 - w^2)`` to the given order."""
    w = variable(order, field)
    return 1 - series_sqrt(1 - w * w)


@lru_cache(maxsize=32)
def survival_gf(order: int, field: str = EXACT) -> TruncatedSeries:
    """``R(w) = (1 - rho(w)) / (1 - w)``."""
    w = variable(order, field)
    return (1 - first_return_gf(order, field)) / (1 - w)


def _reset_blocks(params: ResetParams, order: int, field: str):
    """``rho((1-r)w)``, ``R((1-r)w)`` and the scalars ``r``, ``1-r`` in ``field``."""
    r = params.value(field)
    q = 1 - r
    return (
        series_rescale(first_return_gf(order, field), q),
        series_rescale(survival_gf(order, field), q),
        r,
        q,
    )


def return_law(tau_max: int, field: str = EXACT) -> ReturnLaw:
    """First-return probabilities and survival function up to ``tau_max``."""
    _check_budget(tau_max, field, SERIES_BUDGET, "tau_max")
    return ReturnLaw(
        pmf=tuple(first_return_gf(tau_max, field)),
        survival=tuple(survival_gf(tau_max, field)),
    )


def count_distribution(t: int, field: str = EXACT) -> list:
    """``P(N_t = n)`` for ``n = 0..t//2`` without resetting.

    ``sum_t w^t P(N_t = n) = R(w) rho(w)^n``.
    """
    _check_budget(t, field, SERIES_BUDGET, "t")
    rho = first_return_gf(t, field)
    term = survival_gf(t, field)
    out = []
    for _ in range(t // 2 + 1):
        out.append(term[t])
        term = term * rho
    return out


def mean_returns(tmax: int, field: str = EXACT) -> list:
    """``<N_t>`` for ``t = 0..tmax``, from ``rho / ((1 - w)(1 - rho))``."""
    _check_budget(tmax, field, SERIES_BUDGET, "tmax")
    w = variable(tmax, field)
    rho = first_return_gf(tmax, field)
    return list(rho / ((1 - w) * (1 - rho)))


def joint_law(params, t: int, field: str | None = None) -> JointLaw:
    """Joint law of the numbers of spontaneous returns and resets at time ``t``.

    Combining the two renewal layers gives ``Z(z, y, w) = R~ / (1 - z rho~ - r y w R~)``
    with ``rho~, R~`` evaluated at ``(1-r)w``, so that
    ``P(k, m) = binom(k+m, k) [w^t] R~ rho~^k (r w R~)^m``.
    """
    params = as_params(params)
    field = _resolve_field(params, field)
    _check_budget(t, field, JOINT_BUDGET, "t")
    rho_b, surv_b, r, _ = _reset_blocks(params, t, field)
    reset_block = variable(t, field) * surv_b * r

    kmax = t // 2
    xs = [surv_b]
    for _ in range(kmax):
        xs.append(xs[-1] * rho_b)
    ys = [TruncatedSeries.constant(1, t, field)]
    for _ in range(t):
        ys.append(ys[-1] * reset_block)

    if field == FLOAT:
        X = np.array([x.to_numpy() for x in xs])
        Y = np.array([y.to_numpy()[::-1] for y in ys])
        binom = np.array([[math.comb(k + m, k) for m in range(t + 1)] for k in range(kmax + 1)], dtype=float)
        probs = binom * (X @ Y.T)
        # entries with 2k + m > t are structurally zero
        k_idx, m_idx = np.indices(probs.shape)
        probs[2 * k_idx + m_idx > t] = 0.0
        return JointLaw(t, tuple(tuple(float(v) for v in row) for row in probs), field)

    rows = []
    for k, x in enumerate(xs):
        row = []
        for m, y in enumerate(ys):
            if 2 * k + m > t:
                row.append(x[0] * 0)
                continue
            acc = sum(x[j] * y[t - j] for j in range(2 * k, t - m + 1))
            row.append(math.comb(k + m, k) * acc)
        rows.append(tuple(row))
    return JointLaw(t, tuple(rows), field)


def dressed_gf(params, order: int, field: str | None = None) -> TruncatedSeries:
    """Generating function of the dressed return-time law under resetting."""
    params = as_params(params)
    field = _resolve_field(params, field)
    rho_b, _, r, q = _reset_blocks(params, order, field)
    w = variable(order, field)
    return (1 - w * q) * rho_b / (1 - w + w * rho_b * r)


def dressed_law(params, tau_max: int, field: str | None = None) -> DressedLaw:
    """Law of the time between successive spontaneous returns under resetting."""
    from .spectral import amplitudes

    params = as_params(params)
    field = _resolve_field(params, field)
    if params.r == 1:
        raise ValueError("r = 1: the walk never returns spontaneously, the dressed law is defective")
    _check_budget(tau_max, field, SERIES_BUDGET, "tau_max")
    _, surv_b, r, _ = _reset_blocks(params, tau_max, field)
    w = variable(tau_max, field)
    pmf = dressed_gf(params, tau_max, field)
    survival = surv_b / (1 - w * surv_b * r)
    a_cross = amplitudes(params).A_cross
    return DressedLaw(
        r=params.r,
        pmf=tuple(pmf),
        survival=tuple(survival),
        mean_return=1.0 / a_cross if a_cross > 0 else math.inf,
    )


def mean_crosses(params, tmax: int, field: str | None = None) -> list:
    """``<N_t^x>`` for ``t = 0..tmax`` under resetting."""
    params = as_params(params)
    field = _resolve_field(params, field)
    _check_budget(tmax, field, SERIES_BUDGET, "tmax")
    rho_b, _, _, q = _reset_blocks(params, tmax, field)
    w = variable(tmax, field)
    return list((1 - w * q) * rho_b / ((1 - w) * (1 - w) * (1 - rho_b)))


def occupancy(params, tmax: int, field: str | None = None) -> tuple[list, list]:
    """Probabilities ``U(t)`` and ``U^(r)(t)`` of a spontaneous return at time ``t``."""
    params = as_params(params)
    field = _resolve_field(params, field)
    _check_budget(tmax, field, SERIES_BUDGET, "tmax")
    plain = 1 / (1 - first_return_gf(tmax, field))
    dressed = 1 / (1 - dressed_gf(params, tmax, field))
    return list(plain), list(dressed)
