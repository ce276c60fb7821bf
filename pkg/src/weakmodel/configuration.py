"""Finite samples of weak model sets in symmetric boxes [-n, n]."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import euclidean as eu
from . import profinite as pf
from .scheme import (ArithmeticScheme, EuclideanScheme, Scheme, TorusPoint, canonical_point,
                     lattice_points_in_box, translate_point)

MAX_BOX = 2**40


class Mode(str, enum.Enum):
    TRUNCATED = "TRUNCATED"
    SIEVE = "SIEVE"


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Configuration:
    """Points of Lambda_W(x) in [-n, n] with their internal coordinates.

    ``internal`` has one column per prime (arithmetic) or is a vector of
    reals (Euclidean).
    """

    scheme: Scheme
    window: object
    x: TorusPoint
    n: int | float
    mode: Mode
    points: np.ndarray
    internal: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_arithmetic(self) -> bool:
        return isinstance(self.scheme, ArithmeticScheme)

    @property
    def box_volume(self) -> float:
        # counting measure of [-n, n] in Z, Lebesgue measure in R
        return 2 * self.n + 1 if self.is_arithmetic else 2.0 * self.n

    def to_lines(self) -> list[str]:
        """One point per line: G-coordinate then internal coordinates."""
        out = []
        for i, y in enumerate(self.points):
            if self.is_arithmetic:
                out.append(" ".join([str(int(y))] + [str(int(v)) for v in self.internal[i]]))
            else:
                out.append(f"{y:.15g} {self.internal[i]:.15g}")
        return out


# -- sieve primitives ------------------------------------------------------------------

def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _strike_multiples(keep: np.ndarray, n: int, q: int) -> None:
    # keep[i] refers to the integer i - n
    keep[n % q::q] = False


def _sieve_mask(w: pf.ResidueSetWindow, n: int) -> np.ndarray:
    """Membership of every integer of [-n, n] in the untruncated window.

    Primes of P use their residue sets; all other primes use the default
    rule at the tail exponent.
    """
    space = w.space
    ints = np.arange(-n, n + 1, dtype=np.int64)
    keep = np.ones(len(ints), dtype=bool)
    for ind, m in zip(w.indicators, space.moduli):
        keep &= ind[np.mod(ints, m)].astype(bool)
    a = w.default.excluded_exponent(space.tail_exponent)
    if a == math.inf:
        return keep
    if a == 0:
        return np.zeros_like(keep)
    a = int(a)
    in_p = set(space.primes)
    limit = int(round(n ** (1.0 / a))) + 1
    for p in primes_up_to(limit):
        p = int(p)
        if p in in_p:
            continue
        q = p**a
        if q > n:
            # only 0 is a multiple within the box
            keep[n] = False
            continue
        _strike_multiples(keep, n, q)
    # 0 is a multiple of every p^a with p outside P
    keep[n] = False
    return keep


# -- generation ------------------------------------------------------------------------------

def _arith_residues(space: pf.ProfiniteSpace, ints: np.ndarray, x_h: Sequence[int]) -> list[np.ndarray]:
    return [np.mod(ints + x, m) for x, m in zip(x_h, space.moduli)]


def generate(s: Scheme, w, x: TorusPoint | None = None, n: int | float = 10,
             mode: Mode | str = Mode.TRUNCATED) -> Configuration:
    """Exactly the points of Lambda_W(x) in [-n, n], sorted, with internal coordinates."""
    mode = Mode(mode)
    if n < 1:
        raise ConfigurationError("box radius must be >= 1")
    if n > MAX_BOX:
        raise ConfigurationError(f"box radius {n} exceeds the supported range")
    if isinstance(s, ArithmeticScheme):
        return _generate_arithmetic(s, w, x, int(n), mode)
    if mode is not Mode.TRUNCATED:
        raise ConfigurationError("SIEVE mode needs an arithmetic scheme")
    return _generate_euclidean(s, w, x, float(n))


def _generate_arithmetic(s: ArithmeticScheme, w, x: TorusPoint | None, n: int,
                         mode: Mode) -> Configuration:
    space = s.space
    x = canonical_point(s, x or TorusPoint(0, (0,) * len(space.primes)))
    if pf.haar_measure(w) == 0:
        raise pf.EmptyWindow("window has Haar measure zero")
    ints = np.arange(-n, n + 1, dtype=np.int64)
    if mode is Mode.TRUNCATED:
        mask = pf.window_indicator(w, _arith_residues(space, ints, x.h))
    else:
        if any(x.h):
            raise ConfigurationError("SIEVE mode is defined for the torus point 0 only")
        mask = None
        for c, pw in pf.terms(w):
            if pw.default not in (pf.DefaultRule.CUBEFREE, pf.DefaultRule.SQUAREFREE_IN):
                raise ConfigurationError(
                    f"SIEVE mode needs CUBEFREE or SQUAREFREE_IN default rules, got {pw.default.value}")
            m = _sieve_mask(pw, n).astype(np.int8) * c
            mask = m if mask is None else mask + m
        mask = mask.astype(bool)
    pts = ints[mask]
    internal = np.stack(_arith_residues(space, pts, x.h), axis=1) if len(pts) else \
        np.zeros((0, len(space.primes)), dtype=np.int64)
    return Configuration(s, w, x, n, mode, pts, internal)


def _generate_euclidean(s: EuclideanScheme, w: eu.IntervalUnionWindow, x: TorusPoint | None,
                        n: float) -> Configuration:
    x = x or TorusPoint(0.0, 0.0)
    x = TorusPoint(float(x.g), float(x.h))
    _, _, g, h = lattice_points_in_box(s, x, -n, n, w.lo, w.hi)
    keep = (g >= -n) & (g <= n) & w.contains(h)
    g, h = g[keep], h[keep]
    order = np.argsort(g, kind="stable")
    return Configuration(s, w, x, n, Mode.TRUNCATED, g[order], h[order])


def shift(c: Configuration, g: int | float) -> Configuration:
    """S_g: the configuration at T_g x in the same box.

    Inside [-n + |g|, n - |g|] its points are exactly the old points moved by g.
    """
    if not c.is_arithmetic:
        return generate(c.scheme, c.window, TorusPoint(c.x.g + g, c.x.h), c.n, c.mode)
    if c.mode is Mode.SIEVE:
        raise ConfigurationError("SIEVE configurations only exist at the torus point 0")
    x = translate_point(c.scheme, c.x, int(g))
    return generate(c.scheme, c.window, x, c.n, c.mode)


def internal_shift(c: Configuration, d: Sequence[int]) -> Configuration:
    """The configuration of the window d + W at the same torus point."""
    if not c.is_arithmetic:
        raise ConfigurationError("internal shifts are implemented for arithmetic schemes")
    return generate(c.scheme, pf.translate(c.window, d), c.x, c.n, c.mode)
