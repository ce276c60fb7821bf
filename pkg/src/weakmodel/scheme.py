"""Cut-and-project schemes (G, H, L) with G = Z or R."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import euclidean as eu
from . import profinite as pf

PAIRING_TOL = 1e-12
# exhaustive arithmetic enumerations refuse moduli beyond this
MAX_EXHAUSTIVE = 5_000_000


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class ArithmeticScheme:
    """G = Z, H = prod Z/p^k, L = {(n, Delta(n))}; the torus is identified with H."""

    space: pf.ProfiniteSpace

    kind = "arithmetic"

    @property
    def modulus(self) -> int:
        return self.space.modulus

    @property
    def dens(self) -> Fraction:
        return Fraction(1)

    def star_map(self, n: int) -> tuple[int, ...]:
        return self.space.reduce(int(n))


@dataclass(frozen=True)
class EuclideanScheme:
    """G = H = R with lattice spanned by two vectors (g_i, h_i)."""

    basis: tuple[tuple[float, float], tuple[float, float]]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    kind = "euclidean"

    def __post_init__(self) -> None:
        (g1, h1), (g2, h2) = [(float(a), float(b)) for a, b in self.basis]
        object.__setattr__(self, "basis", ((g1, h1), (g2, h2)))
        if abs(g1 * h2 - g2 * h1) < 1e-14:
            raise SchemeError("lattice basis is degenerate (zero determinant)")
        object.__setattr__(self, "warnings", tuple(self._check_projections()))

    def _check_projections(self, bound: int = 200) -> list[str]:
        # both properties are assumed; a bounded integer search can only refute them
        out = []
        (g1, h1), (g2, h2) = self.basis
        a = np.arange(-bound, bound + 1)
        A, B = np.meshgrid(a, a)
        nonzero = (A != 0) | (B != 0)
        if np.any(nonzero & (np.abs(A * g1 + B * g2) < 1e-9)):
            out.append(f"projection to G looks non-injective (integer relation with |coeff| <= {bound})")
        if np.any(nonzero & (np.abs(A * h1 + B * h2) < 1e-9)):
            out.append(f"projection to H looks non-dense (integer relation with |coeff| <= {bound})")
        return out

    @property
    def matrix(self) -> np.ndarray:
        # columns are lattice basis vectors, rows are (G, H)
        (g1, h1), (g2, h2) = self.basis
        return np.array([[g1, g2], [h1, h2]])

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def dens(self) -> float:
        return 1.0 / abs(self.determinant)

    def g_part(self, coords: Sequence[int]) -> float:
        (g1, _), (g2, _) = self.basis
        return coords[0] * g1 + coords[1] * g2

    def star_map(self, coords: Sequence[int]) -> float:
        (_, h1), (_, h2) = self.basis
        return coords[0] * h1 + coords[1] * h2


Scheme = Union[ArithmeticScheme, EuclideanScheme]


@dataclass(frozen=True)
class TorusPoint:
    """Representative (x_G, x_H) of x + L."""

    g: float | int = 0
    h: tuple[int, ...] | float = 0.0


def canonical_point(s: Scheme, x: TorusPoint) -> TorusPoint:
    """Arithmetic: absorb x_G into x_H.  Euclidean: fundamental-domain representative."""
    if isinstance(s, ArithmeticScheme):
        h = s.space.reduce(x.h if not isinstance(x.h, float) else (0,) * len(s.space.primes))
        return TorusPoint(0, s.space.add(h, s.space.neg(s.star_map(int(x.g)))))
    c = np.linalg.solve(s.matrix, np.array([float(x.g), float(x.h)]))
    c -= np.floor(c)
    g, h = s.matrix @ c
    return TorusPoint(float(g), float(h))


def translate_point(s: Scheme, x: TorusPoint, g: float | int) -> TorusPoint:
    """T_g x = x + (g, 0), in canonical form."""
    return canonical_point(s, TorusPoint(x.g + g, x.h))


def density(s: Scheme) -> Fraction | float:
    return s.dens


def star_map(s: Scheme, n_or_point) -> tuple[int, ...] | float:
    return s.star_map(n_or_point)


# -- annihilator ----------------------------------------------------------------------

@dataclass(frozen=True)
class AnnihilatorChar:
    """(chi, eta) in L°; chi is j/N (arithmetic) or real, eta per-prime indices or real."""

    chi: Fraction | float
    eta: tuple[int, ...] | float
    coords: tuple[int, int] | None = None


def _crt_units(space: pf.ProfiniteSpace) -> list[int]:
    N = space.modulus
    return [pow(N // m, -1, m) for m in space.moduli]


def eta_for_frequency(space: pf.ProfiniteSpace, j: int) -> tuple[int, ...]:
    """Internal character paired with chi = j/N: chi(1) * eta(Delta 1) = 1."""
    return tuple((-j * u) % m for u, m in zip(_crt_units(space), space.moduli))


def eta_indices(space: pf.ProfiniteSpace, js: np.ndarray) -> np.ndarray:
    """Vectorised ``eta_for_frequency``; shape (len(js), len(primes))."""
    js = np.asarray(js, dtype=np.int64)
    cols = [np.mod(-np.mod(js, m) * u, m) for u, m in zip(_crt_units(space), space.moduli)]
    return np.stack(cols, axis=1)


def arithmetic_char(s: ArithmeticScheme, chi: Fraction | int | float) -> AnnihilatorChar | None:
    """The annihilator element above chi, or None if chi is off the lattice."""
    if isinstance(chi, float):
        t = chi * s.modulus
        if abs(t - round(t)) > PAIRING_TOL * max(1.0, abs(t)):
            return None
        chi = Fraction(round(t), s.modulus)
    chi = Fraction(chi)
    if s.modulus % chi.denominator:
        return None
    chi -= math.floor(chi)
    j = int(chi * s.modulus)
    return AnnihilatorChar(chi, eta_for_frequency(s.space, j))


def pairing_defect(s: Scheme, c: AnnihilatorChar) -> float:
    """max over lattice generators of |chi(l_G) eta(l_H) - 1|."""
    if isinstance(s, ArithmeticScheme):
        total = c.chi + sum(Fraction(m, mod) for m, mod in zip(c.eta, s.space.moduli))
        return 0.0 if total.denominator == 1 else float(abs(np.exp(2j * np.pi * float(total)) - 1))
    out = 0.0
    for g, h in s.basis:
        out = max(out, abs(np.exp(2j * np.pi * (c.chi * g + c.eta * h)) - 1))
    return float(out)


def _euclidean_dual(s: EuclideanScheme, bound: float, eta_bound: float) -> list[AnnihilatorChar]:
    M = s.matrix
    Minv = np.linalg.inv(M)
    # (chi, eta) = k M^{-1}, so k = (chi, eta) M
    k1 = int(math.ceil(bound * abs(M[0, 0]) + eta_bound * abs(M[1, 0]))) + 1
    k2 = int(math.ceil(bound * abs(M[0, 1]) + eta_bound * abs(M[1, 1]))) + 1
    K1, K2 = np.meshgrid(np.arange(-k1, k1 + 1), np.arange(-k2, k2 + 1), indexing="ij")
    K = np.stack([K1.ravel(), K2.ravel()], axis=1)
    ce = K @ Minv
    keep = (np.abs(ce[:, 0]) <= bound + 1e-12) & (np.abs(ce[:, 1]) <= eta_bound + 1e-12)
    K, ce = K[keep], ce[keep]
    order = np.lexsort((ce[:, 1], ce[:, 0]))
    return [AnnihilatorChar(float(ce[i, 0]), float(ce[i, 1]), (int(K[i, 0]), int(K[i, 1])))
            for i in order]


DEFAULT_ETA_BOUND = 8.0


def annihilator_frequencies(s: Scheme, bound: float | None = None,
                            eta_bound: float = DEFAULT_ETA_BOUND) -> list[AnnihilatorChar]:
    """Arithmetic: all N characters j/N.  Euclidean: dual points with |chi| <= bound.

    In the Euclidean case the projection of L° to the chi-axis is dense, so
    an internal cutoff |eta| <= eta_bound is needed to get a finite list.
    """
    if isinstance(s, ArithmeticScheme):
        N = s.modulus
        if N > MAX_EXHAUSTIVE:
            raise SchemeError(f"modulus {N} too large for exhaustive enumeration")
        etas = eta_indices(s.space, np.arange(N))
        return [AnnihilatorChar(Fraction(j, N), tuple(int(x) for x in etas[j])) for j in range(N)]
    return _euclidean_dual(s, 0.0 if bound is None else float(bound), eta_bound)


def eigenvalue_group(s: Scheme, periods, bound: float | None = None,
                     eta_bound: float = DEFAULT_ETA_BOUND) -> list[AnnihilatorChar]:
    """Annihilator elements whose eta is trivial on the period group."""
    chars = annihilator_frequencies(s, bound, eta_bound)
    if periods.is_trivial():
        return chars
    return [c for c in chars if periods.annihilated_by(c.eta)]


# -- lattice enumeration (Euclidean) ---------------------------------------------------

def lattice_points_in_box(s: EuclideanScheme, x: TorusPoint, g_lo: float, g_hi: float,
                          h_lo: float, h_hi: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Candidate points x + l with G-part in [g_lo, g_hi] and H-part in [h_lo, h_hi].

    Returns coordinates (a, b) and parts (g, h); a superset with a margin of
    one lattice step, callers apply the exact membership test.
    """
    (g1, h1), (g2, h2) = s.basis
    xg, xh = float(x.g), float(x.h)
    Minv = np.linalg.inv(s.matrix)
    corners = np.array([[g, h] for g in (g_lo, g_hi) for h in (h_lo, h_hi)]) - [xg, xh]
    cb = corners @ Minv[1]
    b = np.arange(math.floor(cb.min()) - 1, math.ceil(cb.max()) + 2, dtype=np.int64)
    lo = np.full(b.shape, -np.inf)
    hi = np.full(b.shape, np.inf)
    for c1, c2, off, l, u in ((g1, g2, xg, g_lo, g_hi), (h1, h2, xh, h_lo, h_hi)):
        if c1 != 0.0:
            t1 = (l - c2 * b - off) / c1
            t2 = (u - c2 * b - off) / c1
            lo = np.maximum(lo, np.minimum(t1, t2))
            hi = np.minimum(hi, np.maximum(t1, t2))
    ok = hi >= lo - 2
    b, lo, hi = b[ok], lo[ok], hi[ok]
    a_lo = np.floor(lo).astype(np.int64) - 1
    a_hi = np.ceil(hi).astype(np.int64) + 1
    counts = np.clip(a_hi - a_lo + 1, 0, None)
    total = int(counts.sum())
    bb = np.repeat(b, counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    aa = np.repeat(a_lo, counts) + (np.arange(total) - starts)
    g = g1 * aa + g2 * bb + xg
    h = h1 * aa + h2 * bb + xh
    return aa, bb, g, h


# -- uniform discreteness -----------------------------------------------------------------

class DiscretenessRadius(NamedTuple):
    radius: float
    search_bound: float


def uniform_discreteness_radius(s: Scheme, w) -> DiscretenessRadius:
    """A radius r such that distinct points of any Lambda_W(x) are at least r apart.

    Arithmetic: the least n >= 1 with Delta(n) in W - W, found as the first
    n with c_W(Delta n) > 0.  Euclidean: the least positive G-part of a
    lattice point whose H-part lies in the closure of W - W.
    """
    if isinstance(s, ArithmeticScheme):
        N = s.modulus
        if pf.haar_measure(w) == 0:
            raise pf.EmptyWindow("window is empty")
        chunk = 1 << 16
        start = 1
        while start <= N:
            ns = np.arange(start, min(start + chunk, N + 1), dtype=np.int64)
            c = pf.covariogram_on_integers(w, ns)
            hits = np.nonzero(c > 0.5 / N)[0]
            if len(hits):
                return DiscretenessRadius(float(ns[hits[0]]), float(N))
            start += chunk
        return DiscretenessRadius(float(N), float(N))
    diam = w.diameter
    bound = 4.0 / s.dens + abs(s.basis[0][0]) + abs(s.basis[1][0])
    for _ in range(60):
        _, _, g, h = lattice_points_in_box(s, TorusPoint(0.0, 0.0), 0.0, bound, -diam, diam)
        keep = (g > 1e-12) & (g <= bound) & (np.abs(h) <= diam + 1e-12)
        if np.any(keep):
            return DiscretenessRadius(float(g[keep].min()), bound)
        bound *= 2
    raise SchemeError("no lattice point found with H-part in W - W")
