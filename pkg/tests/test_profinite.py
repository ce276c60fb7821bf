from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakmodel import profinite as pf

from conftest import single, z8


def brute_covariogram(w, h):
    space = w.space
    elems = set(pf.window_elements(w))
    hits = sum(1 for x in elems if space.add(x, space.neg(h)) in elems)
    return Fraction(hits, space.modulus)


@st.composite
def product_windows(draw, primes=(2, 3), max_k=3):
    ks = [draw(st.integers(1, max_k)) for _ in primes]
    space = pf.ProfiniteSpace(tuple(primes), tuple(ks))
    sets = []
    for m in space.moduli:
        rs = draw(st.sets(st.integers(0, m - 1), min_size=1, max_size=m))
        sets.append(rs)
    return pf.ResidueSetWindow.from_sets(space, sets)


class TestSpace:
    def test_reduce_and_crt_roundtrip(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 3)
        for n in (-217, -1, 0, 5, 215, 1000):
            assert space.crt(space.reduce(n)) == n % 216

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            pf.ProfiniteSpace((4,), (1,))

    def test_default_rule_residues(self):
        assert pf.DefaultRule.CUBEFREE.residues(2, 3) == frozenset(range(1, 8))
        assert pf.DefaultRule.SQUAREFREE_IN.residues(2, 3) == frozenset({1, 2, 3, 5, 6, 7})
        assert pf.DefaultRule.EMPTY.residues(3, 1) == frozenset()
        assert pf.DefaultRule.FULL.local_density(5, 2) == 1


class TestMeasures:
    def test_cubefree_measure(self):
        w = pf.ResidueSetWindow(z8(), pf.DefaultRule.CUBEFREE)
        assert pf.haar_measure(w) == Fraction(7, 8)

    def test_squarefree_measure(self):
        w = pf.ResidueSetWindow(pf.ProfiniteSpace.uniform([2], 2), pf.DefaultRule.SQUAREFREE_IN)
        assert pf.haar_measure(w) == Fraction(3, 4)

    def test_difference_measure(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 3)
        w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE)
        v = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
        assert pf.haar_measure(pf.DifferenceWindow(w, v)) == Fraction(19, 108)

    def test_difference_needs_containment(self):
        space = z8()
        with pytest.raises(pf.WindowError):
            pf.DifferenceWindow(single({1}), single({1, 2}))

    def test_residues_out_of_range(self):
        with pytest.raises(pf.WindowError):
            single({8})


class TestCovariogram:
    def test_single_residue(self):
        w = single({4})
        assert pf.covariogram(w, (0,)) == Fraction(1, 8)
        assert all(pf.covariogram(w, (h,)) == 0 for h in range(1, 8))

    @settings(max_examples=60, deadline=None)
    @given(product_windows())
    def test_matches_brute_force(self, w):
        for h in list(w.space.elements())[:: max(1, w.space.modulus // 12)]:
            assert pf.covariogram(w, h) == brute_covariogram(w, h)

    @settings(max_examples=40, deadline=None)
    @given(product_windows())
    def test_symmetric_and_peaked(self, w):
        c0 = pf.covariogram(w, (0,) * len(w.space.primes))
        assert c0 == pf.haar_measure(w)
        for h in list(w.space.elements())[:20]:
            c = pf.covariogram(w, h)
            assert c == pf.covariogram(w, w.space.neg(h))
            assert 0 <= c <= c0

    def test_integer_lags_exact_and_float_agree(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 2)
        w = pf.ResidueSetWindow.from_sets(space, [{0, 1, 3}, {2, 4, 5, 8}])
        lags = list(range(-40, 41))
        exact = pf.covariogram_on_integers_exact(w, lags)
        approx = pf.covariogram_on_integers(w, lags)
        for k, e, a in zip(lags, exact, approx):
            assert e == pf.covariogram(w, space.reduce(k))
            assert abs(float(e) - a) < 1e-15


class TestPeriods:
    def test_single_residue_trivial(self):
        assert pf.haar_period_group(single({4})).is_trivial()

    def test_coset_window(self):
        g = pf.haar_period_group(single({0, 1, 4, 5}))
        assert g.elements() == [(0,), (4,)]

    def test_full_prime_component(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 3)
        w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE, {2: frozenset(range(8))})
        g = pf.haar_period_group(w)
        assert g.divisors == (1, 27)
        assert g.order == 8

    @settings(max_examples=60, deadline=None)
    @given(product_windows())
    def test_matches_brute_force(self, w):
        space = w.space
        c0 = pf.covariogram(w, (0,) * len(space.primes))
        brute = {h for h in space.elements() if pf.covariogram(w, h) == c0}
        assert set(pf.haar_period_group(w).elements()) == brute
        elems = set(pf.window_elements(w))
        assert brute == {h for h in space.elements() if {space.add(x, h) for x in elems} == elems}

    def test_annihilated_by(self):
        g = pf.haar_period_group(single({0, 1, 4, 5}))
        assert [m for m in range(8) if g.annihilated_by((m,))] == [0, 2, 4, 6]


class TestWinv:
    @settings(max_examples=40, deadline=None)
    @given(product_windows())
    def test_equals_window(self, w):
        inv = pf.w_inv(w)
        assert pf.symmetric_difference_measure(inv, w) == 0
        g = pf.haar_period_group(w)
        for d in g.elements():
            assert pf.symmetric_difference_measure(pf.translate(inv, d), inv) == 0

    def test_periodization_of_coset_window(self):
        w = single({0, 1, 4, 5})
        g = pf.haar_period_group(w)
        assert [pf.periodization(w, g, (h,)) for h in range(8)] == [1, 1, 0, 0, 1, 1, 0, 0]


class TestThinness:
    def test_squarefree_in_cubefree(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 3)
        v = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
        w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE)
        assert pf.is_haar_thin(v, w).status is pf.Thinness.TRUE

    def test_not_contained(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 3)
        v = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE)
        w = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
        assert pf.is_haar_thin(v, w).status is pf.Thinness.FALSE

    def test_same_rules_undecided(self):
        space = pf.ProfiniteSpace.uniform([2], 3)
        v = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE, {2: frozenset({1})})
        w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE)
        assert pf.is_haar_thin(v, w).status is pf.Thinness.UNDECIDED


class TestTransforms:
    def test_single_residue_values(self):
        w = single({4})
        for m in range(8):
            assert abs(pf.fourier_coefficient(w, (m,)) - (-1) ** m / 8) < 1e-15

    def test_cubefree_at_half(self):
        w = pf.ResidueSetWindow(z8(), pf.DefaultRule.CUBEFREE)
        assert abs(pf.fourier_coefficient(w, (4,)) - (-1 / 8)) < 1e-15

    def test_matches_direct_dft(self):
        w = single({0, 1, 4, 5})
        for m in range(8):
            direct = sum(np.exp(2j * np.pi * m * h / 8) for h in (0, 1, 4, 5)) / 8
            assert abs(pf.fourier_coefficient(w, (m,)) - direct) < 1e-15

    @settings(max_examples=60, deadline=None)
    @given(product_windows(max_k=2))
    def test_exact_zero_test(self, w):
        elems = pf.window_elements(w)
        for m in w.space.elements():
            direct = sum(pf.character_value(w.space, m, h) for h in elems) / w.space.modulus
            assert pf.fourier_is_zero(w, m) == (abs(direct) < 1e-9)

    def test_plancherel_finite(self):
        space = pf.ProfiniteSpace.uniform([2, 3], 2)
        w = pf.ResidueSetWindow.from_sets(space, [{0, 3}, {1, 2, 7}])
        total = sum(abs(pf.fourier_coefficient(w, m)) ** 2 for m in space.elements())
        assert abs(total - float(pf.haar_measure(w))) < 1e-14


def test_window_indicator_matches_contains():
    space = pf.ProfiniteSpace.uniform([2, 3], 2)
    w = pf.DifferenceWindow(pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE),
                            pf.ResidueSetWindow.from_sets(space, [{1}, {1, 2}]))
    ints = np.arange(-50, 50)
    mask = pf.window_indicator(w, [np.mod(ints, m) for m in space.moduli])
    assert list(mask) == [w.contains(space.reduce(int(n))) for n in ints]
