from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .series import EXACT, FLOAT


@dataclass(frozen=True)
class ResetParams:
    """Per-step resetting probability ``r``.

    ``r`` is kept as a :class:`~fractions.Fraction` when given as a ratio
    string (``"3/10"``), an int or a Fraction; any float stays a float.
    """

    r: Fraction | float

    def __post_init__(self):
        r = self.r
        if isinstance(r, str):
            r = parse_probability(r)
        elif isinstance(r, Rational) and not isinstance(r, bool):
            r = Fraction(r)
        else:
            r = float(r)
        if not 0 <= r <= 1:
            raise ValueError(f"resetting probability must lie in [0, 1], got {r}")
        object.__setattr__(self, "r", r)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.r, Fraction)

    @property
    def field(self) -> str:
        return EXACT if self.is_exact else FLOAT

    def value(self, field: str):
        """``r`` converted to the coefficient type of ``field``."""
        if field == EXACT:
            if not self.is_exact:
                raise ValueError("an exact computation needs r as a ratio (e.g. '3/10')")
            return self.r
        return float(self.r)

    def __float__(self) -> float:
        return float(self.r)


def parse_probability(text: str) -> Fraction | float:
    """``"3/10"`` -> Fraction(3, 10); ``"0.3"`` -> 0.3."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return float(text)


def as_params(r) -> ResetParams:
    return r if isinstance(r, ResetParams) else ResetParams(r)
