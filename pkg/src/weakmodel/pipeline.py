"""One function per subcommand, each taking a validated Descriptor."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import estimators as es
from . import euclidean as eu
from . import profinite as pf
from . import spectrum as sp
from .configuration import Configuration, Mode, generate
from .descriptor import Descriptor
from .scheme import (AnnihilatorChar, ArithmeticScheme, annihilator_frequencies, eigenvalue_group,
                     uniform_discreteness_radius)
from .verdicts import Verdict, VerdictKind, heuristic_tolerance

# period-group elements and eigenvalue lists are only spelled out below this size
LIST_LIMIT = 4096


@dataclass
class RunResult:
    verdicts: list[Verdict] = field(default_factory=list)
    tolerances: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, vs: list[Verdict]) -> None:
        self.verdicts.extend(vs)
        for v in vs:
            if v.tolerance not in self.tolerances:
                self.tolerances.append(v.tolerance)


def configurations(d: Descriptor):
    for n in d.n_schedule:
        yield generate(d.scheme, d.window, d.x, n, d.mode)


def _frequencies(d: Descriptor, c: Configuration) -> list:
    if d.is_arithmetic:
        if isinstance(d.frequencies, list):
            return d.frequencies
        return es.default_frequencies(c, d.frequencies if isinstance(d.frequencies, int) else None)
    if isinstance(d.frequencies, list):
        raise ValueError("Euclidean runs take frequencies from freq_bound and eta_bound")
    return annihilator_frequencies(d.scheme, d.freq_bound, d.eta_bound)


def _tol(d: Descriptor, c: Configuration) -> float:
    return es.tolerance_for(c, d.wraparound) if d.tolerance is None else d.tolerance


def summary(d: Descriptor) -> dict[str, Any]:
    s, w = d.scheme, d.window
    out: dict[str, Any] = {"kind": d.kind, "name": d.name, "mode": d.mode.value}
    if isinstance(s, ArithmeticScheme):
        out.update(modulus=s.modulus, dens="1", window_measure=str(pf.haar_measure(w)))
        if d.mode is Mode.SIEVE:
            out["untruncated_density"] = f"{sp.theoretical_density(s, w, True):.15g}"
        if isinstance(w, pf.DifferenceWindow):
            v = pf.is_haar_thin(w.inner, w.outer)
            out["inner_thin"] = v.status.value
    else:
        out.update(dens=f"{s.dens:.15g}", window_measure=f"{eu.measure(w):.15g}",
                   determinant=f"{s.determinant:.15g}", warnings=list(s.warnings))
    return out


def run_generate(d: Descriptor) -> list[tuple[float, list[str]]]:
    return [(c.n, c.to_lines()) for c in configurations(d)]


def run_density(d: Descriptor) -> RunResult:
    r = RunResult()
    for c in configurations(d):
        r.add([Verdict.compare(c.n, VerdictKind.UNIFORM_DIST, "",
                               es.empirical_density(c, d.wraparound),
                               sp.theoretical_density(d.scheme, d.window, c.mode is Mode.SIEVE),
                               _tol(d, c))])
    return r


def run_autocorr(d: Descriptor) -> RunResult:
    r = RunResult()
    for c in configurations(d):
        vs = es.estimator_verdicts(c, d.lags, [], d.wraparound, _tol(d, c))
        r.add([v for v in vs if v.kind is VerdictKind.GENERIC_2_G])
    return r


def _probe_verdicts(c: Configuration, probes: list[float], wrap: bool) -> list[Verdict]:
    # off-lattice probes are never exact; they get the heuristic allowance
    tol = heuristic_tolerance(c.box_volume)
    return [Verdict.compare(c.n, VerdictKind.CONSISTENT_PHASE, f"probe={p:.15g}",
                            abs(es.empirical_fb(c, p, wrap)) ** 2, 0.0, tol) for p in probes]


def run_fourier_bohr(d: Descriptor) -> RunResult:
    r = RunResult()
    for c in configurations(d):
        r.add(es.fb_verdicts(c, _frequencies(d, c), d.wraparound, _tol(d, c)))
        r.add(_probe_verdicts(c, d.probes, d.wraparound))
    return r


def run_diffract(d: Descriptor) -> sp.DiffractionSpectrum:
    s = d.scheme
    untr = d.mode is Mode.SIEVE
    if isinstance(s, ArithmeticScheme):
        freqs = d.frequencies
        if isinstance(freqs, int):
            freqs = es.lattice_frequencies(s, freqs)
        elif freqs is None and s.modulus > 100_000:
            freqs = es.lattice_frequencies(s, 125)
        return sp.theoretical_diffraction(s, d.window, x=d.x, frequencies=freqs, untruncated=untr)
    return sp.theoretical_diffraction(s, d.window, d.freq_bound, d.eta_bound, d.x)


def run_periods(d: Descriptor) -> dict[str, Any]:
    s, w = d.scheme, d.window
    out: dict[str, Any] = {}
    if isinstance(s, ArithmeticScheme):
        g = pf.haar_period_group(w)
        out["order"] = g.order
        out["generators"] = [list(x) for x in g.generators()]
        if g.order <= LIST_LIMIT:
            out["elements"] = [list(x) for x in g.elements()]
        winv = pf.w_inv(w)
        out["w_inv_equals_w"] = pf.symmetric_difference_measure(winv, w) == 0
        if s.modulus <= LIST_LIMIT:
            eig = eigenvalue_group(s, g)
            out["eigenvalues"] = [_frac(c.chi) for c in eig]
        else:
            out["eigenvalue_count"] = s.modulus // g.order
        if isinstance(w, pf.DifferenceWindow):
            v = pf.is_haar_thin(w.inner, w.outer)
            out["inner_thin"] = {"status": v.status.value, "witness": v.witness, "note": v.note}
    else:
        out["order"] = 1
        out["generators"] = []
        out["note"] = "a nonempty interval-union window in R has no nonzero period"
    rad = uniform_discreteness_radius(s, w)
    out["discreteness_radius"] = rad.radius
    return out


def run_genericity(d: Descriptor) -> RunResult:
    r = RunResult()
    for c in configurations(d):
        r.add(es.estimator_verdicts(c, d.lags, _frequencies(d, c), d.wraparound, _tol(d, c)))
    return r


def run_compare(d: Descriptor) -> RunResult:
    """generate -> estimators -> spectrum -> consistent_phase_check."""
    r = RunResult()
    s = d.scheme
    for c in configurations(d):
        tol = _tol(d, c)
        freqs = _frequencies(d, c)
        r.add(es.estimator_verdicts(c, d.lags, freqs, d.wraparound, tol))
        untr = c.mode is Mode.SIEVE
        if isinstance(s, ArithmeticScheme):
            full = len(freqs) == s.modulus
            spec = sp.theoretical_diffraction(s, d.window, x=c.x, untruncated=untr,
                                              frequencies=None if full else freqs)
            if full:
                emp_all = es.empirical_fb_all(c, wraparound=d.wraparound)
                emp = [(e.char.chi, emp_all[i]) for i, e in enumerate(spec.entries)]
            else:
                emp = [(e.char.chi, es.empirical_fb(c, e.char.chi, d.wraparound)) for e in spec.entries]
        else:
            spec = sp.theoretical_diffraction(s, d.window, d.freq_bound, d.eta_bound, c.x)
            emp = [(e.char.chi, es.empirical_fb(c, e.char.chi)) for e in spec.entries]
        r.add(sp.consistent_phase_check(spec, emp, (), c.n, tol))
        r.add(_probe_verdicts(c, d.probes, d.wraparound))
    return r


def _frac(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return f"{x:.15g}"


def chi_label(c: AnnihilatorChar) -> str:
    return _frac(c.chi)
