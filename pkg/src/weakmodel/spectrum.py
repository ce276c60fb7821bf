"""Theoretical autocorrelation, diffraction and Fourier-Bohr coefficients.

Arithmetic spectra are exhaustive over the N characters j/N of the
truncated scheme.  ``untruncated=True`` multiplies in the Euler factors of
the primes outside P (the default rules there), which is what a SIEVE
configuration converges to.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import euclidean as eu
from . import profinite as pf
from .scheme import (AnnihilatorChar, ArithmeticScheme, EuclideanScheme, Scheme, SchemeError,
                     TorusPoint, annihilator_frequencies, arithmetic_char, canonical_point,
                     eta_indices, lattice_points_in_box, MAX_EXHAUSTIVE)
from .verdicts import EXACT_TOL, Verdict, VerdictKind, heuristic_tolerance

TAIL_PRIME_LIMIT = 1_000_000


# -- Euler factors of the untruncated tail ---------------------------------------------

def _a(rule: pf.DefaultRule, space: pf.ProfiniteSpace) -> float:
    return rule.excluded_exponent(space.tail_exponent)


def _zeta_product(a: float, primes: Sequence[int]) -> float:
    """prod over p outside ``primes`` of (1 - p^{-a})."""
    if a == math.inf:
        return 1.0
    if a < 2:
        return 0.0
    inside = math.prod(1 - p ** (-a) for p in primes)
    return float(1 / mpmath.zeta(a)) / inside


def tail_factor(rule: pf.DefaultRule, space: pf.ProfiniteSpace) -> float:
    """Haar measure of the default-rule part of the window beyond P."""
    return _zeta_product(_a(rule, space), space.primes)


@lru_cache(maxsize=None)
def _tail_base(a: float, b: float, primes: tuple[int, ...]) -> float:
    # prod over p outside P of (1 - p^-a - p^-b)
    if min(a, b) < 2:
        return 0.0
    from .configuration import primes_up_to

    ps = primes_up_to(TAIL_PRIME_LIMIT).astype(np.float64)
    ps = ps[~np.isin(ps, primes)]
    pa = 0.0 if a == math.inf else ps ** (-a)
    pb = 0.0 if b == math.inf else ps ** (-b)
    logs = np.log1p(-(pa + pb))
    L = float(TAIL_PRIME_LIMIT)
    # primes beyond L: sum p^-s ~ L^{1-s} / ((s - 1) log L)
    rest = sum(L ** (1 - s) / ((s - 1) * math.log(L)) for s in (a, b) if s != math.inf)
    return float(math.exp(logs.sum() - rest))


def tail_cross(rule_a: pf.DefaultRule, rule_b: pf.DefaultRule, space: pf.ProfiniteSpace,
               k: int) -> float:
    """prod over p outside P of m(A_p ∩ (B_p + k)) for two default rules.

    Locally this is 1 - p^-a - p^-b, plus p^-max(a,b) when p^min(a,b) divides k.
    """
    a, b = _a(rule_a, space), _a(rule_b, space)
    lo, hi = min(a, b), max(a, b)
    if k == 0:
        return _zeta_product(lo, space.primes)
    base = _tail_base(a, b, space.primes)
    if base == 0.0 or lo == math.inf:
        return base
    lo, k = int(lo), abs(int(k))
    out = base
    p = 2
    while p**lo <= k:
        if pf.is_prime(p) and p not in space.primes and k % p**lo == 0:
            plain = 1 - sum(p ** (-e) for e in (a, b) if e != math.inf)
            extra = 0.0 if hi == math.inf else p ** (-hi)
            out *= (plain + extra) / plain
        p += 1
    return out


# -- transforms -----------------------------------------------------------------------------

def _local_tables(pw: pf.ResidueSetWindow) -> list[np.ndarray]:
    return [np.fft.ifft(ind.astype(np.complex128)) for ind in pw.indicators]


def window_transform_all(w, space: pf.ProfiniteSpace, js: np.ndarray,
                         untruncated: bool = False) -> np.ndarray:
    """1̌_w(eta_j) for the characters paired with chi = j/N, vectorised."""
    etas = eta_indices(space, js)
    out = np.zeros(len(js), dtype=np.complex128)
    for c, pw in pf.terms(w):
        val = np.ones(len(js), dtype=np.complex128)
        for i, f in enumerate(_local_tables(pw)):
            val *= f[etas[:, i]]
        if untruncated:
            val *= tail_factor(pw.default, space)
        out += c * val
    return out


def _phase(s: Scheme, x: TorusPoint, c: AnnihilatorChar) -> complex:
    """conj(chi(x_G)) conj(eta(x_H))."""
    if isinstance(s, ArithmeticScheme):
        t = -c.chi * x.g - sum(Fraction(m * h, mod) for m, h, mod in zip(c.eta, x.h, s.space.moduli))
        t -= math.floor(t)
        return complex(np.exp(2j * np.pi * float(t)))
    return complex(np.exp(-2j * np.pi * (c.chi * float(x.g) + c.eta * float(x.h))))


def internal_transform(s: Scheme, w, c: AnnihilatorChar, untruncated: bool = False) -> complex:
    if isinstance(s, ArithmeticScheme):
        if untruncated:
            j = int(c.chi * s.modulus)
            return complex(window_transform_all(w, s.space, np.array([j]), True)[0])
        return pf.fourier_coefficient(w, c.eta)
    return complex(eu.fourier_coefficient(w, c.eta))


class FBFlag(str, enum.Enum):
    ON_LATTICE = "ON_LATTICE"
    OFF_LATTICE = "OFF_LATTICE"


def theoretical_fb(s: Scheme, w, x: TorusPoint | None, chi, untruncated: bool = False
                   ) -> tuple[complex, FBFlag]:
    """dens * conj(chi(x_G)) * conj(eta(x_H)) * 1̌_W(eta) on pi(L°), 0 elsewhere.

    ``chi`` is a frequency (arithmetic) or an ``AnnihilatorChar``.
    """
    if isinstance(chi, AnnihilatorChar):
        c = chi
    elif isinstance(s, ArithmeticScheme):
        c = arithmetic_char(s, chi)
        if c is None:
            return 0j, FBFlag.OFF_LATTICE
    else:
        raise SchemeError("Euclidean FB coefficients need an AnnihilatorChar")
    x = canonical_point(s, x) if x is not None else _origin(s)
    val = float(s.dens) * _phase(s, x, c) * internal_transform(s, w, c, untruncated)
    return complex(val), FBFlag.ON_LATTICE


def theoretical_fb_all(s: ArithmeticScheme, w, x: TorusPoint | None = None,
                       untruncated: bool = False) -> np.ndarray:
    """Theoretical FB coefficients at chi = j/N for j = 0..N-1."""
    N = s.modulus
    if N > MAX_EXHAUSTIVE:
        raise SchemeError(f"modulus {N} too large for exhaustive enumeration")
    js = np.arange(N)
    vals = window_transform_all(w, s.space, js, untruncated)
    x = canonical_point(s, x) if x is not None else _origin(s)
    if any(x.h):
        # conj(eta_j(x_H)) = exp(-2 pi i sum_p m_p x_p / p^k), with m_p paired to j
        etas = eta_indices(s.space, js)
        t = np.zeros(N, dtype=np.float64)
        for i, (h, mod) in enumerate(zip(x.h, s.space.moduli)):
            t += np.mod(etas[:, i] * h, mod) / mod
        vals = vals * np.exp(-2j * np.pi * np.mod(t, 1.0))
    return float(s.dens) * vals


def _origin(s: Scheme) -> TorusPoint:
    if isinstance(s, ArithmeticScheme):
        return TorusPoint(0, (0,) * len(s.space.primes))
    return TorusPoint(0.0, 0.0)


def theoretical_density(s: Scheme, w, untruncated: bool = False) -> float:
    if isinstance(s, ArithmeticScheme):
        if untruncated:
            return float(sum(c * float(pf.haar_measure(pw)) * tail_factor(pw.default, s.space)
                             for c, pw in pf.terms(w)))
        return float(pf.haar_measure(w))
    return s.dens * eu.measure(w)


# -- autocorrelation ------------------------------------------------------------------------------

@dataclass
class AutocorrelationTable:
    """lag -> dens * c_W(star(lag)); exact Fractions in the arithmetic case."""

    lags: list
    values: list

    def as_dict(self) -> dict:
        return dict(zip(self.lags, self.values))

    def __getitem__(self, lag):
        return self.as_dict()[lag]


def theoretical_autocorrelation(s: Scheme, w, lags: Iterable | float | None = None,
                                untruncated: bool = False) -> AutocorrelationTable:
    """Autocorrelation coefficients.

    Arithmetic: ``lags`` is an iterable of integers.  Euclidean: ``lags`` is a
    radius R and the table lists the G-parts of lattice points in [-R, R]
    whose internal part has positive covariogram.
    """
    if isinstance(s, ArithmeticScheme):
        lags = [int(k) for k in lags]
        if untruncated:
            vals = []
            ts = pf.terms(w)
            for k in lags:
                v = 0.0
                for ci, a in ts:
                    for cj, b in ts:
                        v += ci * cj * float(pf.cross_covariogram(a, b, s.star_map(k))) * \
                            tail_cross(a.default, b.default, s.space, k)
                vals.append(v)
            return AutocorrelationTable(lags, vals)
        return AutocorrelationTable(lags, pf.covariogram_on_integers_exact(w, lags))
    R = float(lags if lags is not None else 10.0)
    diam = w.diameter
    _, _, g, h = lattice_points_in_box(s, TorusPoint(0.0, 0.0), -R, R, -diam, diam)
    keep = (np.abs(g) <= R) & (np.abs(h) < diam)
    g, h = g[keep], h[keep]
    cov = eu.covariogram_array(w, h)
    pos = cov > 0
    order = np.argsort(g[pos])
    return AutocorrelationTable([float(v) for v in g[pos][order]],
                                [float(v) for v in s.dens * cov[pos][order]])


# -- diffraction --------------------------------------------------------------------------------

class PeakClass(str, enum.Enum):
    BRAGG = "BRAGG"
    PERIOD_EXTINCTION = "PERIOD_EXTINCTION"
    ACCIDENTAL_EXTINCTION = "ACCIDENTAL_EXTINCTION"


@dataclass
class SpectrumEntry:
    char: AnnihilatorChar
    intensity: float
    fb: complex
    klass: PeakClass


@dataclass
class DiffractionSpectrum:
    entries: list[SpectrumEntry]
    dens: float
    window_measure: float
    # Euclidean only: estimated intensity beyond |eta| > eta_bound in the listed chi range
    tail_estimate: float | None = None
    notes: list[str] = field(default_factory=list)

    def intensity_at(self, chi) -> float:
        for e in self.entries:
            if e.char.chi == chi:
                return e.intensity
        return 0.0

    @property
    def total_intensity(self) -> float:
        return float(math.fsum(e.intensity for e in self.entries))


def _classify(in_eigen: bool, zero: bool) -> PeakClass:
    if not in_eigen:
        return PeakClass.PERIOD_EXTINCTION
    return PeakClass.ACCIDENTAL_EXTINCTION if zero else PeakClass.BRAGG


def theoretical_diffraction(s: Scheme, w, freq_bound: float | None = None,
                            eta_bound: float | None = None, x: TorusPoint | None = None,
                            frequencies: Sequence | None = None, untruncated: bool = False
                            ) -> DiffractionSpectrum:
    """Pure point diffraction dens^2 |1̌_W(eta)|^2 at every chi in pi(L°).

    Arithmetic spectra list all N frequencies unless ``frequencies`` picks
    some of them.  With ``untruncated`` the values include the Euler factors
    of the primes outside P and zeros are detected numerically.
    """
    if isinstance(s, ArithmeticScheme):
        N = s.modulus
        periods = pf.haar_period_group(w)
        if frequencies is None:
            fb = theoretical_fb_all(s, w, x, untruncated)
            js = np.arange(N)
        else:
            chars = [arithmetic_char(s, f) for f in frequencies]
            if any(c is None for c in chars):
                raise SchemeError("spectrum frequencies must lie in pi(L°)")
            fb = np.array([theoretical_fb(s, w, x, c, untruncated)[0] for c in chars])
            js = np.array([int(c.chi * N) for c in chars], dtype=np.int64)
        etas = eta_indices(s.space, js)
        entries = []
        for i, j in enumerate(js):
            eta = tuple(int(v) for v in etas[i])
            in_eigen = periods.annihilated_by(eta)
            if untruncated:
                zero = abs(fb[i]) <= EXACT_TOL
            else:
                zero = pf.fourier_is_zero(w, eta) if in_eigen else True
            value = 0j if zero else complex(fb[i])
            entries.append(SpectrumEntry(AnnihilatorChar(Fraction(int(j), N), eta),
                                         0.0 if zero else float(abs(fb[i]) ** 2),
                                         value, _classify(in_eigen, zero)))
        return DiffractionSpectrum(entries, 1.0, theoretical_density(s, w, untruncated))
    from .scheme import DEFAULT_ETA_BOUND

    E = DEFAULT_ETA_BOUND if eta_bound is None else float(eta_bound)
    B = 0.0 if freq_bound is None else float(freq_bound)
    chars = annihilator_frequencies(s, B, E)
    x = x if x is not None else _origin(s)
    entries = []
    for c in chars:
        f, _ = theoretical_fb(s, w, x, c)
        inten = abs(f) ** 2
        entries.append(SpectrumEntry(c, inten, f, _classify(True, abs(f) <= EXACT_TOL)))
    # |1̌_W(eta)| <= K/(pi |eta|) for K intervals; dual points fill the strip
    # |chi| <= B with density |det| per unit area
    K = len(w.intervals)
    det = abs(s.determinant)
    tail = s.dens**2 * 2 * max(B, 0.5) * det * 2 * K**2 / (math.pi**2 * E)
    return DiffractionSpectrum(entries, s.dens, eu.measure(w), tail,
                               [f"listed: |chi| <= {B:g} and |eta| <= {E:g}; tail_estimate bounds the "
                                "intensity left out by the eta cutoff inside that chi range"])


def extinction_report(s: ArithmeticScheme, w) -> list[tuple[Fraction, PeakClass]]:
    if not isinstance(s, ArithmeticScheme):
        raise SchemeError("extinction reports are exhaustive and need an arithmetic scheme")
    spec = theoretical_diffraction(s, w)
    return [(e.char.chi, e.klass) for e in spec.entries]


# -- consistent phase ---------------------------------------------------------------------------

def consistent_phase_check(spec: DiffractionSpectrum, empirical: Sequence[tuple[object, complex]],
                           probes: Sequence[tuple[float, complex]] = (), n: float = 0,
                           tolerance: float = EXACT_TOL) -> list[Verdict]:
    """|a_chi|^2 against the intensity at chi; off-lattice probes against 0."""
    by_chi = {e.char.chi: e.intensity for e in spec.entries}
    out = []
    for chi, a in empirical:
        if chi not in by_chi:
            raise KeyError(f"frequency {chi} is not in the spectrum")
        out.append(Verdict.compare(n, VerdictKind.CONSISTENT_PHASE, f"chi={chi}",
                                   abs(a) ** 2, by_chi[chi], tolerance))
    for chi, a in probes:
        out.append(Verdict.compare(n, VerdictKind.CONSISTENT_PHASE, f"probe={chi!r}",
                                   abs(a) ** 2, 0.0, tolerance))
    return out
