"""Interval-union windows in H = R."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .profinite import EmptyWindow, WindowError

TOL = 1e-12


@dataclass(frozen=True)
class IntervalUnionWindow:
    """Disjoint sorted half-open intervals [a_i, b_i)."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise EmptyWindow("window has no intervals")
        for a, b in ivs:
            if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
                raise WindowError(f"bad interval [{a}, {b})")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if b0 > a1:
                raise WindowError("intervals must be sorted and pairwise disjoint")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def of(cls, *pairs: Sequence[float]) -> "IntervalUnionWindow":
        return cls(tuple(tuple(p) for p in pairs))

    @property
    def lo(self) -> float:
        return self.intervals[0][0]

    @property
    def hi(self) -> float:
        return self.intervals[-1][1]

    @property
    def diameter(self) -> float:
        return self.hi - self.lo

    def contains(self, h: np.ndarray | float) -> np.ndarray | bool:
        h = np.asarray(h, dtype=np.float64)
        out = np.zeros(h.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (h >= a) & (h < b)
        return out if out.shape else bool(out)

    def translate(self, d: float) -> "IntervalUnionWindow":
        return IntervalUnionWindow(tuple((a + d, b + d) for a, b in self.intervals))

    def merged(self) -> list[tuple[float, float]]:
        """Closure components: touching intervals are joined."""
        out = [list(self.intervals[0])]
        for a, b in self.intervals[1:]:
            if a <= out[-1][1]:
                out[-1][1] = max(out[-1][1], b)
            else:
                out.append([a, b])
        return [tuple(x) for x in out]


def measure(w: IntervalUnionWindow) -> float:
    return float(sum(b - a for a, b in w.intervals))


def measure_closure(w: IntervalUnionWindow) -> float:
    return float(sum(b - a for a, b in w.merged()))


def measure_interior(w: IntervalUnionWindow) -> float:
    # the boundary is a finite set, so removing it costs nothing
    return float(sum(b - a for a, b in w.merged()))


def covariogram(w: IntervalUnionWindow, h: float) -> float:
    """|w ∩ (w + h)| by summing pairwise interval overlaps."""
    total = 0.0
    for a, b in w.intervals:
        for c, d in w.intervals:
            lo, hi = max(a, c + h), min(b, d + h)
            if hi > lo:
                total += hi - lo
    return total


def covariogram_array(w: IntervalUnionWindow, h: Iterable[float]) -> np.ndarray:
    h = np.asarray(list(h) if not isinstance(h, np.ndarray) else h, dtype=np.float64)
    total = np.zeros(h.shape)
    for a, b in w.intervals:
        for c, d in w.intervals:
            total += np.clip(np.minimum(b, d + h) - np.maximum(a, c + h), 0.0, None)
    return total


def fourier_coefficient(w: IntervalUnionWindow, k: float | np.ndarray) -> complex | np.ndarray:
    """Integral of exp(2 pi i k h) over the window."""
    k = np.asarray(k, dtype=np.float64)
    out = np.zeros(k.shape, dtype=np.complex128)
    for a, b in w.intervals:
        # (b - a) e^{i pi k (a + b)} sinc(k (b - a)); stable near k = 0
        out += (b - a) * np.exp(1j * np.pi * k * (a + b)) * np.sinc(k * (b - a))
    return complex(out) if out.shape == () else out


@dataclass(frozen=True)
class RealPeriodGroup:
    """Period group of a window in R; only the trivial group occurs."""

    def is_trivial(self) -> bool:
        return True

    def generators(self) -> list[float]:
        return []

    def contains(self, h: float) -> bool:
        return abs(h) <= TOL

    def annihilated_by(self, eta: float) -> bool:
        return True


def haar_period_group(w: IntervalUnionWindow) -> RealPeriodGroup:
    """Always trivial: a nonempty window of finite measure in R has no nonzero period."""
    if measure(w) <= 0:
        raise EmptyWindow("window is empty")
    return RealPeriodGroup()
