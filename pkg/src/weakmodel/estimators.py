"""Empirical averages over the symmetric box [-n, n].

With ``wraparound=True`` (TRUNCATED arithmetic configurations whose box
length 2n is a multiple of N) the sample is the half-open box [-n, n) read
as the cyclic group Z/2n.  Every estimator is then an average over whole
periods and equals its theoretical target exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import euclidean as eu
from . import profinite as pf
from . import spectrum as sp
from .configuration import Configuration, ConfigurationError, Mode, generate
from .scheme import (DEFAULT_ETA_BOUND, AnnihilatorChar, ArithmeticScheme, Scheme, TorusPoint,
                     annihilator_frequencies, lattice_points_in_box)
from .verdicts import EXACT_TOL, Verdict, VerdictKind, heuristic_tolerance

# above this many lags the pair counts come from one FFT correlation
FFT_LAGS = 32
# Fractions with larger denominators fall back to float phases
MAX_EXACT_DEN = 3_000_000_000


@dataclass(frozen=True)
class Sample:
    points: np.ndarray
    internal: np.ndarray
    volume: float
    wrap: int | None


def sample(c: Configuration, wraparound: bool = False) -> Sample:
    """Points and box volume used by the estimators."""
    if not wraparound:
        return Sample(c.points, c.internal, c.box_volume, None)
    if not c.is_arithmetic or c.mode is not Mode.TRUNCATED:
        raise ConfigurationError("wraparound needs a TRUNCATED arithmetic configuration")
    n = int(c.n)
    if (2 * n) % c.scheme.modulus:
        raise ConfigurationError(f"wraparound needs 2n to be a multiple of N={c.scheme.modulus}")
    keep = c.points < n
    return Sample(c.points[keep], c.internal[keep], float(2 * n), 2 * n)


def is_exact(c: Configuration, wraparound: bool) -> bool:
    """Whether the estimators are exact averages over whole periods."""
    return (wraparound and c.is_arithmetic and c.mode is Mode.TRUNCATED
            and (2 * int(c.n)) % c.scheme.modulus == 0)


def tolerance_for(c: Configuration, wraparound: bool) -> float:
    return EXACT_TOL if is_exact(c, wraparound) else heuristic_tolerance(c.box_volume)


# -- density and Fourier-Bohr ----------------------------------------------------------------

def empirical_density(c: Configuration, wraparound: bool = False) -> float:
    smp = sample(c, wraparound)
    if smp.volume <= 0:
        raise ConfigurationError("empty box")
    return len(smp.points) / smp.volume


def _fb_rational(points: np.ndarray, q: int) -> np.ndarray:
    """sum_y exp(-2 pi i a y / q) for a = 0..q-1."""
    counts = np.bincount(np.mod(points, q), minlength=q).astype(np.float64)
    return np.fft.fft(counts)


def empirical_fb(c: Configuration, chi, wraparound: bool = False) -> complex:
    """(1/|A_n|) * sum over points of conj(chi(y))."""
    smp = sample(c, wraparound)
    if isinstance(chi, AnnihilatorChar):
        chi = chi.chi
    if c.is_arithmetic and isinstance(chi, (int, Fraction)):
        chi = Fraction(chi)
        q = chi.denominator
        if q <= MAX_EXACT_DEN:
            # residues a*y mod q are exact integers, so only the final phase is rounded
            r = np.mod(np.mod(smp.points, q) * (chi.numerator % q), q)
            if q <= 1 << 22:
                counts = np.bincount(r)
                ph = np.exp(-2j * np.pi * np.arange(len(counts)) / q)
                return complex(counts @ ph / smp.volume)
            return complex(np.exp(-2j * np.pi * r / q).sum() / smp.volume)
        chi = float(chi)
    chi = float(chi)
    if not math.isfinite(chi):
        raise ValueError("frequency must be finite")
    ph = np.mod(chi * smp.points.astype(np.float64), 1.0)
    return complex(np.exp(-2j * np.pi * ph).sum() / smp.volume)


def empirical_fb_all(c: Configuration, q: int | None = None, wraparound: bool = False) -> np.ndarray:
    """Empirical FB coefficients at a/q for a = 0..q-1 (q defaults to N)."""
    if not c.is_arithmetic:
        raise ConfigurationError("exhaustive FB tables need an arithmetic configuration")
    smp = sample(c, wraparound)
    q = c.scheme.modulus if q is None else int(q)
    return _fb_rational(smp.points, q) / smp.volume


def lattice_frequencies(s: ArithmeticScheme, max_den: int) -> list[Fraction]:
    """All chi = j/N (in [0, 1)) whose reduced denominator is at most ``max_den``."""
    N = s.modulus
    dens = [q for q in range(1, min(N, max_den) + 1) if N % q == 0]
    out = {Fraction(a, q) for q in dens for a in range(q)}
    return sorted(out)


# -- autocorrelation ------------------------------------------------------------------------------

def _pair_counts_fft(points: np.ndarray, lo: int, length: int, cyclic: bool) -> np.ndarray:
    size = length if cyclic else 2 * length
    ind = np.zeros(size)
    ind[points - lo] = 1.0
    f = np.fft.rfft(ind)
    return np.rint(np.fft.irfft(f * np.conj(f), n=size))


def empirical_autocorrelation(c: Configuration, lags: Iterable, wraparound: bool = False,
                              atol: float = 1e-9) -> dict:
    """lag k -> |{(y, y') : y - y' = k}| / |A_n|.

    Lags that do not fit in the box are dropped with a warning.  Euclidean
    differences match a lag within ``atol``.
    """
    smp = sample(c, wraparound)
    lags = list(lags)
    limit = smp.wrap if smp.wrap is not None else 2 * c.n
    fit = [k for k in lags if abs(k) < limit or (smp.wrap is None and abs(k) == limit)]
    dropped = [k for k in lags if k not in fit]
    if dropped:
        warnings.warn(f"lags beyond the box were dropped: {dropped[:5]}"
                      f"{' ...' if len(dropped) > 5 else ''}", stacklevel=2)
    pts = smp.points
    out = {}
    if c.is_arithmetic:
        ks = [int(k) for k in fit]
        if len(ks) > FFT_LAGS:
            n = int(c.n)
            if smp.wrap is not None:
                counts = _pair_counts_fft(pts, -n, smp.wrap, True)
                get = lambda k: counts[k % smp.wrap]
            else:
                counts = _pair_counts_fft(pts, -n, 2 * n + 1, False)
                get = lambda k: counts[k % len(counts)]
            for k in ks:
                out[k] = float(get(k)) / smp.volume
        else:
            for k in ks:
                if smp.wrap is not None:
                    shifted = np.mod(pts + k + int(c.n), smp.wrap) - int(c.n)
                else:
                    shifted = pts + k
                out[k] = int(np.isin(shifted, pts).sum()) / smp.volume
        return out
    srt = np.sort(pts)
    for k in fit:
        k = float(k)
        target = srt + k
        lo = np.searchsorted(srt, target - atol, side="left")
        hi = np.searchsorted(srt, target + atol, side="right")
        out[k] = int((hi - lo).sum()) / smp.volume
    return out


# -- internal test functions ------------------------------------------------------------------

class InternalFunction:
    """An internal test function eta with a closed-form target dens * m_H(eta * 1_W)."""

    def evaluate(self, c: Configuration, internal: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def integrate(self, s: Scheme, w, untruncated: bool = False) -> complex:
        raise NotImplementedError


def _with_factor(pw: pf.ResidueSetWindow, p: int, rs: frozenset[int]) -> pf.ResidueSetWindow:
    sets = list(pw.factors)
    i = pw.space.index(p)
    sets[i] = sets[i] & rs
    return pf.ResidueSetWindow.from_sets(pw.space, sets, pw.default)


@dataclass(frozen=True)
class Constant(InternalFunction):
    value: complex = 1.0

    def evaluate(self, c, internal):
        return np.full(len(internal), self.value, dtype=np.complex128)

    def integrate(self, s, w, untruncated=False):
        return self.value * sp.theoretical_density(s, w, untruncated)


@dataclass(frozen=True)
class ResidueCylinder(InternalFunction):
    """Indicator of {h : h_p in residues} on the p-component."""

    p: int
    residues: frozenset[int]

    def evaluate(self, c, internal):
        i = c.scheme.space.index(self.p)
        return np.isin(internal[:, i], list(self.residues)).astype(np.complex128)

    def integrate(self, s, w, untruncated=False):
        rs = frozenset(int(r) % s.space.moduli[s.space.index(self.p)] for r in self.residues)
        total = 0.0
        for coef, pw in pf.terms(w):
            v = float(pf.haar_measure(_with_factor(pw, self.p, rs)))
            if untruncated:
                v *= sp.tail_factor(pw.default, s.space)
            total += coef * v
        return complex(total)


@dataclass(frozen=True)
class InternalCharacter(InternalFunction):
    """h -> exp(2 pi i sum_p m_p h_p / p^k)."""

    eta: tuple[int, ...]

    def evaluate(self, c, internal):
        t = np.zeros(len(internal))
        for i, (m, mod) in enumerate(zip(self.eta, c.scheme.space.moduli)):
            t += np.mod(m * internal[:, i], mod) / mod
        return np.exp(2j * np.pi * np.mod(t, 1.0))

    def integrate(self, s, w, untruncated=False):
        total = 0j
        for coef, pw in pf.terms(w):
            v = pf.fourier_coefficient(pw, self.eta)
            if untruncated:
                v *= sp.tail_factor(pw.default, s.space)
            total += coef * v
        return total


@dataclass(frozen=True)
class IntervalIndicator(InternalFunction):
    a: float
    b: float

    def evaluate(self, c, internal):
        return ((internal >= self.a) & (internal < self.b)).astype(np.complex128)

    def integrate(self, s, w, untruncated=False):
        inter = sum(max(0.0, min(b, self.b) - max(a, self.a)) for a, b in w.intervals)
        return complex(s.dens * inter)


@dataclass(frozen=True)
class Trig(InternalFunction):
    """h -> exp(2 pi i k h)."""

    k: float

    def evaluate(self, c, internal):
        return np.exp(2j * np.pi * self.k * internal)

    def integrate(self, s, w, untruncated=False):
        return complex(s.dens * eu.fourier_coefficient(w, self.k))


def weighted_internal_average(c: Configuration, test: InternalFunction, wraparound: bool = False) -> complex:
    """(1/|A_n|) * sum over points of eta(y_H)."""
    smp = sample(c, wraparound)
    return complex(test.evaluate(c, smp.internal).sum() / smp.volume)


def internal_average_target(c: Configuration, test: InternalFunction) -> complex:
    return test.integrate(c.scheme, c.window, c.mode is Mode.SIEVE)


# -- genericity ---------------------------------------------------------------------------------

def _label(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def default_lags(c: Configuration) -> list:
    if c.is_arithmetic:
        return list(range(0, min(2 * c.scheme.modulus, int(c.n), 256) + 1))
    return sp.theoretical_autocorrelation(c.scheme, c.window, min(c.n, 8.0)).lags


def default_frequencies(c: Configuration, max_den: int | None = None,
                        freq_bound: float = 2.0, eta_bound: float | None = None) -> list:
    s = c.scheme
    if isinstance(s, ArithmeticScheme):
        if max_den is None and s.modulus <= 100_000:
            return [Fraction(j, s.modulus) for j in range(s.modulus)]
        return lattice_frequencies(s, max_den or 125)
    return annihilator_frequencies(s, freq_bound, DEFAULT_ETA_BOUND if eta_bound is None else eta_bound)


def estimator_verdicts(c: Configuration, lags: Sequence | None = None,
                       frequencies: Sequence | None = None, wraparound: bool = False,
                       tolerance: float | None = None) -> list[Verdict]:
    """Density, autocorrelation and FB verdicts for a single configuration."""
    s, w = c.scheme, c.window
    untr = c.mode is Mode.SIEVE
    tol = tolerance_for(c, wraparound) if tolerance is None else tolerance
    n = c.n
    out = [Verdict.compare(n, VerdictKind.UNIFORM_DIST, "", empirical_density(c, wraparound),
                           sp.theoretical_density(s, w, untr), tol)]
    lags = default_lags(c) if lags is None else list(lags)
    emp = empirical_autocorrelation(c, lags, wraparound)
    if c.is_arithmetic:
        theo = sp.theoretical_autocorrelation(s, w, list(emp), untr).as_dict()
    else:
        theo = {k: s.dens * eu.covariogram(w, s_h) for k, s_h in _euclid_lag_h(c, emp)}
    for k in emp:
        out.append(Verdict.compare(n, VerdictKind.GENERIC_2_G, _label(k), emp[k], float(theo[k]), tol))
    freqs = default_frequencies(c) if frequencies is None else list(frequencies)
    out.extend(fb_verdicts(c, freqs, wraparound, tol))
    return out


def _euclid_lag_h(c: Configuration, emp: dict) -> list[tuple[float, float]]:
    """H-parts of the lattice points whose G-parts are the requested lags."""
    s, diam = c.scheme, c.window.diameter
    R = max(abs(k) for k in emp) + 1.0
    _, _, g, h = lattice_points_in_box(s, TorusPoint(0.0, 0.0), -R, R, -diam, diam)
    inside = np.abs(h) < diam
    g, h = g[inside], h[inside]
    out = []
    for k in emp:
        i = int(np.argmin(np.abs(g - k))) if len(g) else -1
        if i < 0 or abs(g[i] - k) > 1e-9:
            raise ValueError(f"lag {k} is not the G-part of a lattice point with H-part in W - W")
        out.append((k, float(h[i])))
    return out


def fb_verdicts(c: Configuration, frequencies: Sequence, wraparound: bool = False,
                tolerance: float | None = None) -> list[Verdict]:
    s, w = c.scheme, c.window
    untr = c.mode is Mode.SIEVE
    tol = tolerance_for(c, wraparound) if tolerance is None else tolerance
    out = []
    if isinstance(s, ArithmeticScheme):
        N = s.modulus
        full = len(frequencies) == N and all(Fraction(f) == Fraction(j, N)
                                              for j, f in enumerate(frequencies))
        if full:
            emp = empirical_fb_all(c, N, wraparound)
            theo = sp.theoretical_fb_all(s, w, c.x, untr)
            for j, f in enumerate(frequencies):
                out.append(Verdict.compare(c.n, VerdictKind.GENERIC_1_GH, _label(f), emp[j], theo[j], tol))
            return out
        for f in frequencies:
            t, _ = sp.theoretical_fb(s, w, c.x, f, untr)
            out.append(Verdict.compare(c.n, VerdictKind.GENERIC_1_GH, _label(f),
                                       empirical_fb(c, f, wraparound), t, tol))
        return out
    for ch in frequencies:
        t, _ = sp.theoretical_fb(s, w, c.x, ch)
        out.append(Verdict.compare(c.n, VerdictKind.GENERIC_1_GH, _label(ch.chi),
                                   empirical_fb(c, ch.chi), t, tol))
    return out


def genericity_verdicts(s: Scheme, w, x: TorusPoint | None = None,
                        n_schedule: Sequence = (100, 1000), mode: Mode | str = Mode.TRUNCATED,
                        lags: Sequence | None = None, frequencies: Sequence | None = None,
                        wraparound: bool = False, tolerance: float | None = None) -> list[Verdict]:
    """Per-n convergence table of density, autocorrelation and FB verdicts."""
    ns = list(n_schedule)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_schedule must be increasing")
    out = []
    for n in ns:
        c = generate(s, w, x, n, mode)
        out.extend(estimator_verdicts(c, lags, frequencies, wraparound, tolerance))
    return out
