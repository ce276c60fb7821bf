import numpy as np
import pytest

from weakmodel import profinite as pf
from weakmodel.configuration import ConfigurationError, Mode, generate, internal_shift, shift
from weakmodel.scheme import ArithmeticScheme, TorusPoint

from conftest import cubefree_not_squarefree, fibonacci, single, z8


def test_single_residue_points():
    c = generate(ArithmeticScheme(z8()), single({4}), None, 20)
    assert list(c.points) == [-20, -12, -4, 4, 12, 20]
    assert list(c.internal[:, 0]) == [4] * 6


def test_torus_point_shifts_residues():
    s = ArithmeticScheme(z8())
    c = generate(s, single({4}), TorusPoint(0, (1,)), 20)
    assert list(c.points) == [-13, -5, 3, 11, 19]


def test_truncated_matches_brute_force():
    s, w = cubefree_not_squarefree([2, 3])
    c = generate(s, w, None, 300)
    brute = [n for n in range(-300, 301) if w.contains(s.star_map(n))]
    assert list(c.points) == brute


def test_sieve_squarefree_small():
    space = pf.ProfiniteSpace.uniform([2, 3, 5], 2)
    s = ArithmeticScheme(space)
    w = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
    c = generate(s, w, None, 30, Mode.SIEVE)
    sqf = [n for n in range(1, 31) if all(n % (p * p) for p in range(2, 6))]
    assert list(c.points) == sorted([-n for n in sqf] + sqf)
    assert len(c) == 38


def test_sieve_cubefree_not_squarefree_matches_direct():
    s, w = cubefree_not_squarefree([2, 3])
    c = generate(s, w, None, 5000, Mode.SIEVE)

    def kfree(n, a):
        q = 2
        while q**a <= n:
            if n % q**a == 0:
                return False
            q += 1
        return True

    brute = [n for n in range(-5000, 5001) if n and kfree(abs(n), 3) and not kfree(abs(n), 2)]
    assert list(c.points) == brute


def test_sieve_rejects_full_rule():
    s = ArithmeticScheme(z8())
    with pytest.raises(ConfigurationError):
        generate(s, pf.ResidueSetWindow(z8()), None, 10, Mode.SIEVE)


def test_empty_window_rejected():
    with pytest.raises(pf.EmptyWindow):
        generate(ArithmeticScheme(z8()), pf.ResidueSetWindow(z8(), pf.DefaultRule.EMPTY), None, 10)


def test_shift_moves_points():
    s, w = cubefree_not_squarefree([2, 3])
    c = generate(s, w, None, 400)
    for g in (1, 7, -30):
        d = shift(c, g)
        inner = lambda pts: set(int(y) for y in pts if abs(y) <= 400 - abs(g))
        assert inner(d.points) == {int(y) + g for y in c.points if abs(y + g) <= 400 - abs(g)}


def test_internal_shift():
    s = ArithmeticScheme(z8())
    c = generate(s, single({4}), None, 16)
    d = internal_shift(c, (1,))
    assert list(d.points) == [-11, -3, 5, 13]


def test_fibonacci_gaps_and_count():
    s, w = fibonacci()
    c = generate(s, w, None, 10_000)
    assert len(c) == 14473
    gaps = np.unique(np.round(np.diff(c.points), 9))
    assert np.allclose(gaps, [1.0, (1 + 5**0.5) / 2])
    assert np.all(w.contains(c.internal))


def test_to_lines():
    c = generate(ArithmeticScheme(z8()), single({4}), None, 4)
    assert c.to_lines() == ["-4 4", "4 4"]
