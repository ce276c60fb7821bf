from pathlib import Path

import pytest

from weakmodel import euclidean as eu
from weakmodel import profinite as pf
from weakmodel.scheme import ArithmeticScheme, EuclideanScheme

DESCRIPTORS = Path(__file__).resolve().parent.parent / "descriptors"
TAU = (1 + 5**0.5) / 2


def z8():
    return pf.ProfiniteSpace.uniform([2], 3)


def single(rs, space=None):
    space = space or z8()
    return pf.ResidueSetWindow.from_sets(space, [rs])


def cubefree_not_squarefree(primes, k=3):
    space = pf.ProfiniteSpace.uniform(primes, k)
    w = pf.ResidueSetWindow(space, pf.DefaultRule.CUBEFREE)
    v = pf.ResidueSetWindow(space, pf.DefaultRule.SQUAREFREE_IN)
    return ArithmeticScheme(space), pf.DifferenceWindow(w, v)


def fibonacci():
    s = EuclideanScheme(((1.0, 1.0), (TAU, 1 - TAU)))
    return s, eu.IntervalUnionWindow.of((-1.0, TAU - 1))


@pytest.fixture
def descriptors_dir():
    return DESCRIPTORS


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
