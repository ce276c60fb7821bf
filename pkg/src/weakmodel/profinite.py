"""Exact window calculus on H = prod_p Z/p^k Z over a finite prime set.

Windows are products of per-prime residue sets (``ResidueSetWindow``) or
differences of two nested products (``DifferenceWindow``).  Every quantity
is reduced to signed sums of products so that measures, covariograms and
period groups stay exact rationals, whatever the size of the modulus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

ZERO_TOL = 1e-12


class WindowError(ValueError):
    """Raised for malformed spaces or windows."""


class EmptyWindow(WindowError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class DefaultRule(str, enum.Enum):
    """How a window looks at primes without explicit residue data."""

    FULL = "FULL"
    CUBEFREE = "CUBEFREE"
    SQUAREFREE_IN = "SQUAREFREE_IN"
    EMPTY = "EMPTY"

    def excluded_exponent(self, k: int) -> float:
        """Exponent a such that the rule removes p^a Z from Z/p^k Z.

        ``inf`` means nothing is removed, 0 means everything is.
        """
        if self is DefaultRule.FULL:
            return math.inf
        if self is DefaultRule.EMPTY:
            return 0
        if self is DefaultRule.CUBEFREE:
            return k
        return -(-2 * k // 3)

    def residues(self, p: int, k: int) -> frozenset[int]:
        a = self.excluded_exponent(k)
        m = p**k
        if a == math.inf:
            return frozenset(range(m))
        step = p ** int(a)
        return frozenset(r for r in range(m) if r % step)

    def local_density(self, p: int, k: int) -> Fraction:
        a = self.excluded_exponent(k)
        if a == math.inf:
            return Fraction(1)
        return 1 - Fraction(1, p ** int(a))


@dataclass(frozen=True)
class ProfiniteSpace:
    """Truncated internal space prod_{p in P} Z/p^{k_p} Z.

    ``tail_exponent`` is the exponent the default rules use for the primes
    beyond P (the untruncated product); it defaults to ``max(exponents)``.
    """

    primes: tuple[int, ...]
    exponents: tuple[int, ...]
    tail_exponent: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))
        object.__setattr__(self, "exponents", tuple(int(k) for k in self.exponents))
        if not self.primes:
            raise WindowError("prime set must be nonempty")
        if len(self.primes) != len(self.exponents):
            raise WindowError("primes and exponents differ in length")
        if any(not is_prime(p) for p in self.primes):
            raise WindowError(f"not all entries are prime: {self.primes}")
        if any(b <= a for a, b in zip(self.primes, self.primes[1:])):
            raise WindowError("primes must be strictly increasing")
        if any(k < 1 for k in self.exponents):
            raise WindowError("exponents must be >= 1")
        if not self.tail_exponent:
            object.__setattr__(self, "tail_exponent", max(self.exponents))
        elif self.tail_exponent < 1:
            raise WindowError("tail exponent must be >= 1")

    @classmethod
    def uniform(cls, primes: Iterable[int], k: int) -> "ProfiniteSpace":
        primes = tuple(primes)
        return cls(primes, (k,) * len(primes), k)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(p**k for p, k in zip(self.primes, self.exponents))

    @property
    def modulus(self) -> int:
        return math.prod(self.moduli)

    def index(self, p: int) -> int:
        try:
            return self.primes.index(p)
        except ValueError:
            raise WindowError(f"prime {p} is not in {self.primes}") from None

    def reduce(self, h: Sequence[int] | int) -> tuple[int, ...]:
        """Reduce an integer (via the diagonal embedding) or a tuple."""
        if isinstance(h, (int, np.integer)):
            return tuple(int(h) % m for m in self.moduli)
        if len(h) != len(self.moduli):
            raise WindowError(f"element {tuple(h)} has wrong length")
        return tuple(int(x) % m for x, m in zip(h, self.moduli))

    def crt(self, h: Sequence[int]) -> int:
        """The unique n in [0, N) with n = h_p mod p^k_p for every p."""
        N = self.modulus
        n = 0
        for x, m in zip(self.reduce(h), self.moduli):
            c = N // m
            n += x * c * pow(c, -1, m)
        return n % N

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements, lexicographic in (h_p) with primes increasing."""
        return iter(np.ndindex(*self.moduli))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(-x % m for x, m in zip(a, self.moduli))


@dataclass(frozen=True)
class ResidueSetWindow:
    """Product window prod_p R_p with a default rule off the exceptional primes."""

    space: ProfiniteSpace
    default: DefaultRule = DefaultRule.FULL
    exceptional: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "default", DefaultRule(self.default))
        exc = {}
        for p, rs in dict(self.exceptional).items():
            i = self.space.index(int(p))
            m = self.space.moduli[i]
            rs = frozenset(int(r) for r in rs)
            bad = [r for r in rs if not 0 <= r < m]
            if bad:
                raise WindowError(f"residues {sorted(bad)} outside Z/{m} at prime {p}")
            exc[int(p)] = rs
        # sorted tuple keeps the dataclass hashable and the order deterministic
        object.__setattr__(self, "exceptional", tuple(sorted(exc.items())))

    @classmethod
    def from_sets(cls, space: ProfiniteSpace, sets: Sequence[Iterable[int]],
                  default: DefaultRule = DefaultRule.FULL) -> "ResidueSetWindow":
        return cls(space, default, {p: frozenset(s) for p, s in zip(space.primes, sets)})

    @property
    def exceptional_map(self) -> dict[int, frozenset[int]]:
        return dict(self.exceptional)

    def is_exceptional(self, p: int) -> bool:
        return p in self.exceptional_map

    def residues(self, p: int) -> frozenset[int]:
        exc = self.exceptional_map
        if p in exc:
            return exc[p]
        return self.default.residues(p, self.space.exponents[self.space.index(p)])

    @cached_property
    def factors(self) -> tuple[frozenset[int], ...]:
        return tuple(self.residues(p) for p in self.space.primes)

    @cached_property
    def indicators(self) -> tuple[np.ndarray, ...]:
        out = []
        for rs, m in zip(self.factors, self.space.moduli):
            a = np.zeros(m, dtype=np.int64)
            a[list(rs)] = 1
            out.append(a)
        return tuple(out)

    def contains(self, h: Sequence[int]) -> bool:
        h = self.space.reduce(h)
        return all(x in rs for x, rs in zip(h, self.factors))

    def is_empty(self) -> bool:
        return any(not rs for rs in self.factors)

    def translate(self, d: Sequence[int]) -> "ResidueSetWindow":
        """The window d + W; all primes of P become exceptional."""
        d = self.space.reduce(d)
        sets = [frozenset((r + x) % m for r in rs)
                for rs, x, m in zip(self.factors, d, self.space.moduli)]
        return ResidueSetWindow.from_sets(self.space, sets, self.default)

    def negate(self) -> "ResidueSetWindow":
        sets = [frozenset(-r % m for r in rs) for rs, m in zip(self.factors, self.space.moduli)]
        return ResidueSetWindow.from_sets(self.space, sets, self.default)


@dataclass(frozen=True)
class DifferenceWindow:
    """W minus V for nested product windows V inside W."""

    outer: ResidueSetWindow
    inner: ResidueSetWindow

    def __post_init__(self) -> None:
        if self.outer.space != self.inner.space:
            raise WindowError("outer and inner windows live on different spaces")
        for p, w_p, v_p in zip(self.space.primes, self.outer.factors, self.inner.factors):
            if not v_p <= w_p:
                raise WindowError(f"inner window not contained in outer window at prime {p}")

    @property
    def space(self) -> ProfiniteSpace:
        return self.outer.space

    def contains(self, h: Sequence[int]) -> bool:
        return self.outer.contains(h) and not self.inner.contains(h)

    def is_empty(self) -> bool:
        return haar_measure(self) == 0

    def translate(self, d: Sequence[int]) -> "DifferenceWindow":
        return DifferenceWindow(self.outer.translate(d), self.inner.translate(d))

    def negate(self) -> "DifferenceWindow":
        return DifferenceWindow(self.outer.negate(), self.inner.negate())


Window = Union[ResidueSetWindow, DifferenceWindow]


def terms(w: Window) -> list[tuple[int, ResidueSetWindow]]:
    """Signed product decomposition 1_w = sum c_i 1_{P_i}."""
    if isinstance(w, DifferenceWindow):
        return [(1, w.outer), (-1, w.inner)]
    return [(1, w)]


def _space(w: Window) -> ProfiniteSpace:
    return w.space


# -- measures and covariograms ------------------------------------------------

def haar_measure(w: Window) -> Fraction:
    total = Fraction(0)
    for c, pw in terms(w):
        prod = Fraction(1)
        for rs, m in zip(pw.factors, pw.space.moduli):
            prod *= Fraction(len(rs), m)
        total += c * prod
    return total


def _overlap(a: np.ndarray, b: np.ndarray, h: int) -> int:
    # |A ∩ (B + h)|
    return int(np.dot(a, np.roll(b, h)))


def cross_covariogram(a: ResidueSetWindow, b: ResidueSetWindow, h: Sequence[int]) -> Fraction:
    """m_H(A ∩ (B + h)) for product windows."""
    h = a.space.reduce(h)
    out = Fraction(1)
    for ia, ib, x, m in zip(a.indicators, b.indicators, h, a.space.moduli):
        out *= Fraction(_overlap(ia, ib, x), m)
        if not out:
            break
    return out


def covariogram(w: Window, h: Sequence[int]) -> Fraction:
    """c_w(h) = m_H(w ∩ (w + h)), by inclusion-exclusion over the product terms."""
    ts = terms(w)
    return sum((ci * cj * cross_covariogram(a, b, h) for ci, a in ts for cj, b in ts),
               Fraction(0))


def _overlap_tables(a: ResidueSetWindow, b: ResidueSetWindow) -> list[np.ndarray]:
    """Per prime, |A_p ∩ (B_p + h)| for every h (circular correlation)."""
    out = []
    for ia, ib in zip(a.indicators, b.indicators):
        corr = np.fft.ifft(np.fft.fft(ia) * np.conj(np.fft.fft(ib))).real
        out.append(np.rint(corr).astype(np.int64))
    return out


def covariogram_on_integers(w: Window, lags: np.ndarray | Sequence[int]) -> np.ndarray:
    """c_w(Delta(k)) for integer lags k, as float64 (exact up to rounding of a ratio)."""
    lags = np.asarray(lags, dtype=np.int64)
    space = w.space
    ts = terms(w)
    total = np.zeros(lags.shape, dtype=np.float64)
    for ci, a in ts:
        for cj, b in ts:
            prod = np.ones(lags.shape, dtype=np.float64)
            for table, m in zip(_overlap_tables(a, b), space.moduli):
                prod *= table[np.mod(lags, m)] / m
            total += ci * cj * prod
    return total


def covariogram_on_integers_exact(w: Window, lags: Iterable[int]) -> list[Fraction]:
    space = w.space
    ts = terms(w)
    tables = {(i, j): _overlap_tables(a, b) for i, (_, a) in enumerate(ts)
              for j, (_, b) in enumerate(ts)}
    out = []
    for k in lags:
        v = Fraction(0)
        for i, (ci, _) in enumerate(ts):
            for j, (cj, _) in enumerate(ts):
                num = 1
                for table, m in zip(tables[i, j], space.moduli):
                    num *= int(table[k % m])
                v += ci * cj * Fraction(num, space.modulus)
        out.append(v)
    return out


# -- period groups --------------------------------------------------------------

@dataclass(frozen=True)
class PeriodGroup:
    """Subgroup prod_p d_p Z / p^k Z; ``divisors[i]`` divides the i-th modulus."""

    space: ProfiniteSpace
    divisors: tuple[int, ...]

    def __post_init__(self) -> None:
        for d, m in zip(self.divisors, self.space.moduli):
            if d <= 0 or m % d:
                raise WindowError(f"{d} does not divide {m}")

    @classmethod
    def trivial(cls, space: ProfiniteSpace) -> "PeriodGroup":
        return cls(space, space.moduli)

    @classmethod
    def full(cls, space: ProfiniteSpace) -> "PeriodGroup":
        return cls(space, (1,) * len(space.primes))

    @property
    def order(self) -> int:
        return math.prod(m // d for m, d in zip(self.space.moduli, self.divisors))

    def is_trivial(self) -> bool:
        return self.divisors == self.space.moduli

    def generators(self) -> list[tuple[int, ...]]:
        """One generator per nontrivial prime component."""
        gens = []
        for i, (d, m) in enumerate(zip(self.divisors, self.space.moduli)):
            if d != m:
                g = [0] * len(self.divisors)
                g[i] = d
                gens.append(tuple(g))
        return gens

    def contains(self, h: Sequence[int]) -> bool:
        h = self.space.reduce(h)
        return all(x % d == 0 for x, d in zip(h, self.divisors))

    def elements(self) -> list[tuple[int, ...]]:
        axes = [range(0, m, d) for d, m in zip(self.divisors, self.space.moduli)]
        return [tuple(int(x) for x in t) for t in np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T]

    def intersect(self, other: "PeriodGroup") -> "PeriodGroup":
        if other.space != self.space:
            raise WindowError("period groups on different spaces")
        return PeriodGroup(self.space, tuple(math.lcm(a, b) for a, b in zip(self.divisors, other.divisors)))

    def annihilated_by(self, m: Sequence[int]) -> bool:
        """True if the character with indices m is trivial on the group."""
        return all((x * d) % mod == 0 for x, d, mod in zip(m, self.divisors, self.space.moduli))


def _unit(space: ProfiniteSpace, i: int, x: int) -> tuple[int, ...]:
    h = [0] * len(space.primes)
    h[i] = x
    return tuple(h)


def haar_period_group(w: Window) -> PeriodGroup:
    """Periods {h : c_w(h) = c_w(0)}, found prime by prime.

    Every subgroup of the product splits into its prime components, and the
    subgroups of Z/p^k form a chain, so it suffices to test p^i e_p.
    """
    space = w.space
    c0 = covariogram(w, (0,) * len(space.primes))
    divisors = []
    for i, (p, k) in enumerate(zip(space.primes, space.exponents)):
        for j in range(k + 1):
            if covariogram(w, _unit(space, i, p**j)) == c0:
                divisors.append(p**j)
                break
    return PeriodGroup(space, tuple(divisors))


# -- periodization -------------------------------------------------------------------

def _invariant_part(rs: frozenset[int], d: int, m: int) -> frozenset[int]:
    # {h : h + dZ ⊆ R}
    return frozenset(h for h in range(m) if all((h + t) % m in rs for t in range(0, m, d)))


def _meeting_part(rs: frozenset[int], d: int, m: int) -> frozenset[int]:
    # {h : (h + dZ) ∩ R nonempty}
    return frozenset(h for h in range(m) if any((h + t) % m in rs for t in range(0, m, d)))


def periodization(w: Window, group: PeriodGroup, h: Sequence[int]) -> Fraction:
    """psi(h): average of 1_w over the coset h + group."""
    h = w.space.reduce(h)
    total = Fraction(0)
    for c, pw in terms(w):
        prod = Fraction(1)
        for rs, x, d, m in zip(pw.factors, h, group.divisors, w.space.moduli):
            hits = sum(1 for t in range(0, m, d) if (x + t) % m in rs)
            prod *= Fraction(hits * d, m)
        total += c * prod
    return total


def symmetric_difference_measure(a: Window, b: Window) -> Fraction:
    """m_H(a △ b) = m(a) + m(b) - 2 m(a ∩ b), exact."""
    meet = Fraction(0)
    for ci, p in terms(a):
        for cj, q in terms(b):
            prod = Fraction(1)
            for rp, rq, m in zip(p.factors, q.factors, a.space.moduli):
                prod *= Fraction(len(rp & rq), m)
            meet += ci * cj * prod
    return haar_measure(a) + haar_measure(b) - 2 * meet


def w_inv(w: Window) -> Window:
    """The period-invariant version {psi = 1} of w.

    On a finite group Haar-null means empty, so the result must coincide
    with w; the identity is asserted rather than assumed.
    """
    group = haar_period_group(w)
    space = w.space
    if isinstance(w, DifferenceWindow):
        # psi = psi_W - psi_V with 0 <= psi_V <= psi_W <= 1, so psi = 1 iff
        # psi_W = 1 and psi_V = 0
        a = [_invariant_part(rs, d, m) for rs, d, m in zip(w.outer.factors, group.divisors, space.moduli)]
        b = [_meeting_part(rs, d, m) for rs, d, m in zip(w.inner.factors, group.divisors, space.moduli)]
        outer = ResidueSetWindow.from_sets(space, a, w.outer.default)
        inner = ResidueSetWindow.from_sets(space, [x & y for x, y in zip(a, b)], w.inner.default)
        out: Window = DifferenceWindow(outer, inner)
    else:
        a = [_invariant_part(rs, d, m) for rs, d, m in zip(w.factors, group.divisors, space.moduli)]
        out = ResidueSetWindow.from_sets(space, a, w.default)
    for g in group.generators():
        if symmetric_difference_measure(out, translate(out, g)) != 0:
            raise AssertionError("periodization is not invariant under the period group")
    if symmetric_difference_measure(out, w) != 0:
        raise AssertionError("w_inv differs from w on a set of positive measure")
    return out


def translate(w: Window, d: Sequence[int]) -> Window:
    return w.translate(d)


# -- Haar thinness -------------------------------------------------------------------

class Thinness(str, enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class ThinnessVerdict:
    status: Thinness
    witness: int | str | None = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.status is Thinness.TRUE


def _rule_subset(v: DefaultRule, w: DefaultRule, k: int) -> tuple[bool, bool]:
    """(V-rule ⊆ W-rule, strictly) on Z/p^k for any p."""
    # both rules remove a subgroup p^a Z; larger a removes less
    av, aw = v.excluded_exponent(k), w.excluded_exponent(k)
    return av <= aw, av < aw


def is_haar_thin(v: ResidueSetWindow, w: ResidueSetWindow) -> ThinnessVerdict:
    """Structural decision of "V is Haar thin in W" for product-with-default windows.

    Cylinder sets fix finitely many coordinates, so strict containment of
    the default rules on the untruncated tail is what makes thinness hold.
    A truncation only witnesses it through a prime of P where both windows
    follow their (strictly nested) default rules.
    """
    if v.space != w.space:
        raise WindowError("windows live on different spaces")
    space = w.space
    for p, v_p, w_p in zip(space.primes, v.factors, w.factors):
        if not v_p <= w_p:
            return ThinnessVerdict(Thinness.FALSE, p, f"V_{p} is not contained in W_{p}")
    sub, strict = _rule_subset(v.default, w.default, space.tail_exponent)
    if not sub:
        return ThinnessVerdict(Thinness.FALSE, "tail",
                               f"default rule {v.default.value} not contained in {w.default.value}")
    if not strict:
        return ThinnessVerdict(Thinness.UNDECIDED, None,
                               "default rules coincide; finite truncation cannot witness thinness")
    witnesses = [p for p, k in zip(space.primes, space.exponents)
                 if not v.is_exceptional(p) and not w.is_exceptional(p)
                 and _rule_subset(v.default, w.default, k)[1]]
    if not witnesses:
        return ThinnessVerdict(Thinness.UNDECIDED, None,
                               "exceptional data is exhaustive; finite truncation cannot witness thinness")
    return ThinnessVerdict(Thinness.TRUE, witnesses[0],
                           f"default rules strictly nested ({v.default.value} ⊊ {w.default.value})")


# -- characters and transforms ----------------------------------------------------------

def _local_transforms(pw: ResidueSetWindow) -> list[np.ndarray]:
    # f[m] = (1/M) sum_{r in R} exp(2 pi i m r / M), via the inverse FFT
    return [np.fft.ifft(ind.astype(np.complex128)) for ind in pw.indicators]


def character_value(space: ProfiniteSpace, m: Sequence[int], h: Sequence[int]) -> complex:
    """eta_m(h) = exp(2 pi i sum_p m_p h_p / p^k)."""
    frac = Fraction(0)
    for a, b, mod in zip(m, h, space.moduli):
        frac += Fraction((a * b) % mod, mod)
    frac -= math.floor(frac)
    return complex(np.exp(2j * np.pi * float(frac)))


def fourier_coefficient(w: Window, eta: Sequence[int]) -> complex:
    """m_H(eta * 1_w) for the internal character with per-prime indices eta."""
    eta = w.space.reduce(eta)
    total = 0j
    for c, pw in terms(w):
        val = 1 + 0j
        for f, x in zip(_local_transforms(pw), eta):
            val *= f[x]
        total += c * val
    return complex(total)


def local_transform_is_zero(rs: frozenset[int], p: int, k: int, m: int) -> bool:
    """Exact test of sum_{r in R} zeta^{m r} = 0 for zeta = exp(2 pi i / p^k).

    zeta^m is a primitive p^j-th root; a rational combination of its powers
    vanishes iff its coefficients are constant along each coset of p^{j-1}.
    """
    M = p**k
    m %= M
    if m == 0:
        return not rs
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    j = k - v
    q = p**j
    counts = [0] * q
    for r in rs:
        counts[(r * m) % q] += 1
    step = p ** (j - 1)
    return all(counts[t] == counts[t % step] for t in range(q))


def fourier_is_zero(w: Window, eta: Sequence[int]) -> bool:
    """Exact zero test for product windows, 1e-12 tolerance for differences."""
    eta = w.space.reduce(eta)
    if isinstance(w, ResidueSetWindow):
        return any(local_transform_is_zero(rs, p, k, x)
                   for rs, p, k, x in zip(w.factors, w.space.primes, w.space.exponents, eta))
    return abs(fourier_coefficient(w, eta)) <= ZERO_TOL


def window_elements(w: Window) -> list[tuple[int, ...]]:
    """Explicit list of elements (lexicographic); only sensible for small N."""
    return [h for h in w.space.elements() if w.contains(h)]


def window_indicator(w: Window, residues: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorised membership test; ``residues[i]`` holds h_p values for prime i."""
    out = None
    for c, pw in terms(w):
        mask = np.ones(len(residues[0]), dtype=bool)
        for ind, r in zip(pw.indicators, residues):
            mask &= ind[r].astype(bool)
        contrib = c * mask.astype(np.int8)
        out = contrib if out is None else out + contrib
    return out.astype(bool)
