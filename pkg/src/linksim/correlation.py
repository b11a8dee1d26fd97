"""Chip-wise auto- and cross-correlation of spreading codes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "CorrelationProfile",
    "periodic_ccf",
    "periodic_acf",
    "aperiodic_ccf",
    "periodic_ccf_profile",
    "periodic_acf_profile",
]


@dataclass(frozen=True)
class CorrelationProfile:
    """Unnormalized correlation at lags ``0 .. period-1``."""

    raw: tuple[int, ...]
    period: int

    @property
    def lags(self) -> range:
        return range(self.period)

    @property
    def normalized(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.period) for v in self.raw)

    def rows(self):
        """Yield ``(lag, raw, normalized)`` with the normalized value as a float."""
        for lag, v in enumerate(self.raw):
            yield lag, v, v / self.period


def _chips(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1:
        raise ValueError("chip sequences must be one-dimensional")
    return x


def periodic_ccf(x, y, lag: int) -> int:
    """``sum_i x[i] * y[(i + lag) mod N]`` for equal-period codes."""
    x, y = _chips(x), _chips(y)
    if x.size != y.size:
        raise ValueError(f"period mismatch: {x.size} vs {y.size}")
    if x.size == 0:
        raise ValueError("empty sequence")
    return int(np.dot(x, np.roll(y, -(lag % y.size))))


def periodic_acf(x, lag: int) -> int:
    return periodic_ccf(x, x, lag)


def aperiodic_ccf(x, y, lag: int) -> int:
    """Sum of ``x[i] * y[i + lag]`` over the overlapping chips only.

    Lags at or beyond the sequence length give an empty overlap and 0.
    """
    x, y = _chips(x), _chips(y)
    lo = max(0, -lag)
    hi = min(x.size, y.size - lag)
    if hi <= lo:
        return 0
    return int(np.dot(x[lo:hi], y[lo + lag : hi + lag]))


def periodic_ccf_profile(x, y) -> CorrelationProfile:
    x, y = _chips(x), _chips(y)
    if x.size != y.size:
        raise ValueError(f"period mismatch: {x.size} vs {y.size}")
    n = x.size
    # circulant product: row `lag` of the stacked rolls
    shifts = np.stack([np.roll(y, -lag) for lag in range(n)])
    return CorrelationProfile(tuple(int(v) for v in shifts @ x), n)


def periodic_acf_profile(x) -> CorrelationProfile:
    return periodic_ccf_profile(x, x)
