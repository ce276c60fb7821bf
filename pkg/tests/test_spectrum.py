import math
from fractions import Fraction

import numpy as np
import pytest

from weakmodel import estimators as es
from weakmodel import euclidean as eu
from weakmodel import profinite as pf
from weakmodel import spectrum as sp
from weakmodel.configuration import Mode, generate
from weakmodel.scheme import ArithmeticScheme, TorusPoint, eigenvalue_group

from conftest import TAU, cubefree_not_squarefree, fibonacci, single, z8


@pytest.fixture
def w4():
    return ArithmeticScheme(z8()), single({4})


def period_demo():
    space = pf.ProfiniteSpace.uniform([2, 3], 3)
    w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE, {2: frozenset(range(8))})
    return ArithmeticScheme(space), w


class TestAutocorrelation:
    def test_single_residue(self, w4):
        t = sp.theoretical_autocorrelation(*w4, range(-17, 18))
        assert t.as_dict() == {k: Fraction(1, 8) if k % 8 == 0 else 0 for k in range(-17, 18)}

    def test_lag_zero_and_symmetry(self):
        s, w = cubefree_not_squarefree([2, 3])
        t = sp.theoretical_autocorrelation(s, w, range(-60, 61)).as_dict()
        assert t[0] == pf.haar_measure(w)
        assert all(t[k] == t[-k] >= 0 for k in range(61))

    def test_fibonacci_tent(self):
        s, w = fibonacci()
        t = sp.theoretical_autocorrelation(s, w, 6.0)
        assert t.lags[len(t.lags) // 2] == 0.0
        # the tent: lags 1 and tau have H-parts 1 and 1 - tau
        d = dict(zip(np.round(t.lags, 9), t.values))
        assert abs(d[1.0] - s.dens * (TAU - 1)) < 1e-12
        assert abs(d[round(TAU, 9)] - s.dens * (TAU - (TAU - 1))) < 1e-12
        assert abs(d[0.0] - s.dens * TAU) < 1e-12

    def test_untruncated_tail(self):
        s, w = cubefree_not_squarefree([2, 3])
        t = sp.theoretical_autocorrelation(s, w, [0, 1, 4, 8, 27], untruncated=True).values
        # direct count over the true cube-free but not square-free integers up to 2 * 10^6
        oracle = [0.2239802707, 0.0412175, 0.010891, 0.123695, 0.0727205]
        for a, b in zip(t, oracle):
            assert abs(a - b) < 5e-4


class TestTailFactors:
    def test_squarefree_density(self):
        space = pf.ProfiniteSpace.uniform([2, 3, 5], 2)
        w = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
        assert abs(sp.theoretical_density(ArithmeticScheme(space), w, True) - 6 / math.pi**2) < 1e-14

    def test_cubefree_not_squarefree(self):
        import mpmath

        s, w = cubefree_not_squarefree([2, 3, 5])
        want = float(1 / mpmath.zeta(3) - 1 / mpmath.zeta(2))
        assert abs(sp.theoretical_density(s, w, True) - want) < 1e-14

    def test_tail_cross_at_zero(self):
        space = pf.ProfiniteSpace.uniform([2], 3)
        r = pf.DefaultRule.CUBEFREE
        assert sp.tail_cross(r, r, space, 0) == sp.tail_factor(r, space)


class TestDiffraction:
    def test_single_residue(self, w4):
        d = sp.theoretical_diffraction(*w4)
        assert all(abs(e.intensity - 1 / 64) < 1e-15 for e in d.entries)
        assert [e.klass for e in d.entries] == [sp.PeakClass.BRAGG] * 8

    def test_central_peak(self):
        s, w = cubefree_not_squarefree([2, 3])
        d = sp.theoretical_diffraction(s, w)
        assert abs(d.entries[0].intensity - float(pf.haar_measure(w)) ** 2) < 1e-15

    def test_period_extinctions(self):
        s, w = period_demo()
        d = sp.theoretical_diffraction(s, w)
        for e in d.entries:
            extinct = 27 % e.char.chi.denominator != 0
            assert (e.klass is sp.PeakClass.PERIOD_EXTINCTION) == extinct
            if extinct:
                assert e.intensity == 0

    def test_total_intensity_and_wiener(self):
        s, w = cubefree_not_squarefree([2, 3])
        d = sp.theoretical_diffraction(s, w)
        inten = np.array([e.intensity for e in d.entries])
        assert abs(inten.sum() - float(pf.haar_measure(w))) < 1e-12
        N = s.modulus
        back = np.fft.fft(inten)  # sum_j I_j exp(-2 pi i j k / N)
        cov = pf.covariogram_on_integers_exact(w, range(N))
        assert np.max(np.abs(back - np.array([float(c) for c in cov]))) < 1e-12

    def test_fb_link_and_difference_law(self):
        s, w = cubefree_not_squarefree([2, 3])
        d = sp.theoretical_diffraction(s, w)
        x = TorusPoint(0, (3, 17))
        for e in d.entries[::7]:
            fb, _ = sp.theoretical_fb(s, w, x, e.char.chi)
            assert abs(abs(fb) ** 2 - e.intensity) < 1e-12
            a, _ = sp.theoretical_fb(s, w.outer, None, e.char.chi)
            b, _ = sp.theoretical_fb(s, w.inner, None, e.char.chi)
            assert abs(e.fb - (a - b)) < 1e-12

    def test_restricted_frequencies(self):
        s, w = cubefree_not_squarefree([2, 3])
        full = sp.theoretical_diffraction(s, w)
        part = sp.theoretical_diffraction(s, w, frequencies=[Fraction(1, 8), Fraction(2, 27)])
        by = {e.char.chi: e.intensity for e in full.entries}
        assert [e.intensity for e in part.entries] == [by[Fraction(1, 8)], by[Fraction(2, 27)]]

    def test_euclidean_ratios(self):
        s, w = fibonacci()
        d = sp.theoretical_diffraction(s, w, 1.5, 8.0)
        i0 = d.intensity_at(0.0)
        assert abs(i0 - (s.dens * TAU) ** 2) < 1e-12
        for e in d.entries:
            want = abs(eu.fourier_coefficient(w, e.char.eta) / eu.measure(w)) ** 2
            assert abs(e.intensity / i0 - want) < 1e-12
        assert d.tail_estimate > 0


class TestFB:
    def test_values(self, w4):
        s, w = w4
        assert sp.theoretical_fb(s, w, None, 0)[0] == pytest.approx(1 / 8, abs=1e-15)
        assert abs(sp.theoretical_fb(s, w, None, Fraction(1, 8))[0] + 1 / 8) < 1e-15
        # x_H = 4 gives eta(4) = -1 for the paired eta = 7
        assert abs(sp.theoretical_fb(s, w, TorusPoint(0, (4,)), Fraction(1, 8))[0] - 1 / 8) < 1e-15

    def test_off_lattice(self, w4):
        val, flag = sp.theoretical_fb(*w4, None, Fraction(1, 3))
        assert val == 0 and flag is sp.FBFlag.OFF_LATTICE

    def test_vectorised_matches_pointwise(self):
        s, w = cubefree_not_squarefree([2, 3])
        x = TorusPoint(0, (5, 11))
        table = sp.theoretical_fb_all(s, w, x)
        for j in (0, 3, 100, 215):
            assert abs(table[j] - sp.theoretical_fb(s, w, x, Fraction(j, 216))[0]) < 1e-14


class TestExtinction:
    def test_single_residue_all_bragg(self, w4):
        assert {k for _, k in sp.extinction_report(*w4)} == {sp.PeakClass.BRAGG}

    def test_coset_window(self):
        s = ArithmeticScheme(z8())
        rep = dict(sp.extinction_report(s, single({0, 1, 4, 5})))
        direct = [sum(np.exp(2j * np.pi * j * h / 8) for h in (0, 1, 4, 5)) for j in range(8)]
        for j in range(8):
            k = rep[Fraction(j, 8)]
            if j % 2:
                assert k is sp.PeakClass.PERIOD_EXTINCTION
            elif abs(direct[j]) < 1e-12:
                assert k is sp.PeakClass.ACCIDENTAL_EXTINCTION
            else:
                assert k is sp.PeakClass.BRAGG
        assert rep[Fraction(1, 2)] is sp.PeakClass.ACCIDENTAL_EXTINCTION
        assert rep[Fraction(1, 4)] is rep[Fraction(3, 4)] is sp.PeakClass.BRAGG

    def test_period_extinctions_complement_eigenvalues(self):
        s, w = period_demo()
        eig = {c.chi for c in eigenvalue_group(s, pf.haar_period_group(w))}
        rep = sp.extinction_report(s, w)
        assert {chi for chi, k in rep if k is sp.PeakClass.PERIOD_EXTINCTION} == \
            {chi for chi, _ in rep} - eig


class TestConsistentPhase:
    def test_exact_run(self):
        s, w = cubefree_not_squarefree([2, 3])
        c = generate(s, w, None, 432)
        d = sp.theoretical_diffraction(s, w)
        emp = es.empirical_fb_all(c, wraparound=True)
        vs = sp.consistent_phase_check(d, [(e.char.chi, emp[i]) for i, e in enumerate(d.entries)])
        assert all(v.passed for v in vs) and max(v.abs_error for v in vs) <= 1e-12

    def test_wrong_torus_point_still_passes(self):
        s, w = cubefree_not_squarefree([2, 3])
        c = generate(s, w, TorusPoint(0, (3, 5)), 432)
        d = sp.theoretical_diffraction(s, w)
        emp = es.empirical_fb_all(c, wraparound=True)
        assert abs(emp[1] - d.entries[1].fb) > 1e-3  # phases differ
        vs = sp.consistent_phase_check(d, [(e.char.chi, emp[i]) for i, e in enumerate(d.entries)])
        assert all(v.passed for v in vs)

    def test_probes(self):
        s, w = cubefree_not_squarefree([2, 3])
        c = generate(s, w, None, 10**5)
        d = sp.theoretical_diffraction(s, w)
        probes = [(p, es.empirical_fb(c, p)) for p in (1 / math.sqrt(2), math.e / 10)]
        vs = sp.consistent_phase_check(d, [], probes, tolerance=1e-2)
        assert len(vs) == 2 and all(v.passed for v in vs)

    def test_unknown_frequency(self):
        s, w = cubefree_not_squarefree([2, 3])
        d = sp.theoretical_diffraction(s, w)
        with pytest.raises(KeyError):
            sp.consistent_phase_check(d, [(Fraction(1, 5), 0j)])
