"""Scheme descriptors: a YAML document naming a scheme, window and run settings.

Every validation failure is a ``DescriptorError`` carrying a dotted field
path (``window.exceptional.2``) and, when parsed from text, the line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from . import euclidean as eu
from . import profinite as pf
from .configuration import Mode
from .scheme import ArithmeticScheme, EuclideanScheme, Scheme, SchemeError, TorusPoint

SCHEMA = "weakmodel-descriptor/1"

_TOP_KEYS = {"schema", "name", "kind", "space", "basis", "window", "inner_window", "torus_point",
             "mode", "n_schedule", "frequencies", "lags", "probes", "wraparound", "tolerance",
             "freq_bound", "eta_bound"}


class DescriptorError(ValueError):
    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.message = message
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}{field}: {message}")

    def to_dict(self) -> dict:
        return {"field": self.field, "message": self.message, "line": self.line}


@dataclass
class Descriptor:
    kind: str
    scheme: Scheme
    window: Any
    x: TorusPoint
    mode: Mode = Mode.TRUNCATED
    n_schedule: list = field(default_factory=lambda: [100])
    # None: every truncated frequency; int: reduced denominators up to it; list: explicit
    frequencies: Any = None
    lags: list | None = None
    probes: list = field(default_factory=list)
    wraparound: bool = False
    tolerance: float | None = None
    freq_bound: float = 2.0
    eta_bound: float = 8.0
    name: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def is_arithmetic(self) -> bool:
        return self.kind == "arithmetic"


# -- small field readers -----------------------------------------------------------------------

def _req(d: dict, key: str, path: str):
    if key not in d:
        raise DescriptorError(f"{path}{key}", "required field is missing")
    return d[key]


def _int(v, path: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise DescriptorError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise DescriptorError(path, f"must be >= {lo}")
    return v


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DescriptorError(path, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise DescriptorError(path, "must be finite")
    return float(v)


def _list(v, path: str) -> list:
    if not isinstance(v, list):
        raise DescriptorError(path, f"expected a list, got {type(v).__name__}")
    return v


def _map(v, path: str) -> dict:
    if not isinstance(v, dict):
        raise DescriptorError(path, f"expected a mapping, got {type(v).__name__}")
    return v


def parse_frequency(v, path: str) -> Fraction | float:
    """'a/b' strings and integers are exact; floats stay floats."""
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise DescriptorError(path, f"not a frequency: {v!r}") from None
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    return _real(v, path)


# -- sections -----------------------------------------------------------------------------------

def _space(d: dict) -> pf.ProfiniteSpace:
    sp = _map(_req(d, "space", ""), "space")
    primes = [_int(p, f"space.primes.{i}", 2) for i, p in enumerate(_list(_req(sp, "primes", "space."), "space.primes"))]
    if "exponents" in sp:
        exps = [_int(k, f"space.exponents.{i}", 1) for i, k in enumerate(_list(sp["exponents"], "space.exponents"))]
    else:
        exps = [_int(_req(sp, "exponent", "space."), "space.exponent", 1)] * len(primes)
    tail = _int(sp.get("tail_exponent", 0), "space.tail_exponent", 0)
    for i, p in enumerate(primes):
        if not pf.is_prime(p):
            raise DescriptorError(f"space.primes.{i}", f"{p} is not prime")
    try:
        return pf.ProfiniteSpace(tuple(primes), tuple(exps), tail)
    except (ValueError, pf.WindowError) as e:
        raise DescriptorError("space", str(e)) from None


def _rule(v, path: str) -> pf.DefaultRule:
    try:
        return pf.DefaultRule(str(v).upper())
    except ValueError:
        names = ", ".join(r.value for r in pf.DefaultRule)
        raise DescriptorError(path, f"unknown default rule {v!r} (one of {names})") from None


def _residue_window(space: pf.ProfiniteSpace, v, path: str) -> pf.ResidueSetWindow:
    v = _map(v, path)
    rule = _rule(v.get("default", "FULL"), f"{path}.default")
    exc = _map(v.get("exceptional", {}) or {}, f"{path}.exceptional")
    sets = []
    for p, rs in exc.items():
        p_int = _int(p, f"{path}.exceptional.{p}")
        if p_int not in space.primes:
            raise DescriptorError(f"{path}.exceptional.{p}", f"{p_int} is not one of the primes {list(space.primes)}")
        mod = space.moduli[space.index(p_int)]
        vals = []
        for i, r in enumerate(_list(rs, f"{path}.exceptional.{p}")):
            r = _int(r, f"{path}.exceptional.{p}.{i}")
            if not 0 <= r < mod:
                raise DescriptorError(f"{path}.exceptional.{p}.{i}", f"residue {r} is outside [0, {mod})")
            vals.append(r)
        sets.append((p_int, frozenset(vals)))
    try:
        return pf.ResidueSetWindow(space, rule, tuple(sorted(sets)))
    except pf.WindowError as e:
        raise DescriptorError(path, str(e)) from None


def _interval_window(v, path: str) -> eu.IntervalUnionWindow:
    v = _map(v, path)
    ivs = _list(_req(v, "intervals", f"{path}."), f"{path}.intervals")
    pairs = []
    for i, iv in enumerate(ivs):
        iv = _list(iv, f"{path}.intervals.{i}")
        if len(iv) != 2:
            raise DescriptorError(f"{path}.intervals.{i}", "an interval is a pair [a, b]")
        pairs.append((_real(iv[0], f"{path}.intervals.{i}.0"), _real(iv[1], f"{path}.intervals.{i}.1")))
    try:
        return eu.IntervalUnionWindow(tuple(pairs))
    except pf.WindowError as e:
        raise DescriptorError(f"{path}.intervals", str(e)) from None


def _euclid_difference(outer: eu.IntervalUnionWindow, inner: eu.IntervalUnionWindow) -> eu.IntervalUnionWindow:
    for c, d in inner.intervals:
        if not any(a <= c and d <= b for a, b in outer.merged()):
            raise DescriptorError("inner_window", "inner window is not contained in window")
    pieces = list(outer.intervals)
    for c, d in inner.intervals:
        nxt = []
        for x, y in pieces:
            if x < min(y, c):
                nxt.append((x, min(y, c)))
            if max(x, d) < y:
                nxt.append((max(x, d), y))
        pieces = nxt
    if not pieces:
        raise DescriptorError("inner_window", "the difference window is empty")
    return eu.IntervalUnionWindow(tuple(pieces))


def _scheme_and_window(d: dict) -> tuple[str, Scheme, Any]:
    kind = _req(d, "kind", "")
    if kind not in ("arithmetic", "euclidean"):
        raise DescriptorError("kind", f"expected 'arithmetic' or 'euclidean', got {kind!r}")
    if kind == "arithmetic":
        space = _space(d)
        s = ArithmeticScheme(space)
        w = _residue_window(space, _req(d, "window", ""), "window")
        if d.get("inner_window") is not None:
            v = _residue_window(space, d["inner_window"], "inner_window")
            try:
                w = pf.DifferenceWindow(w, v)
            except pf.WindowError as e:
                raise DescriptorError("inner_window", str(e)) from None
        if pf.haar_measure(w) == 0:
            raise DescriptorError("window", "window has Haar measure zero")
        return kind, s, w
    basis = _list(_req(d, "basis", ""), "basis")
    if len(basis) != 2:
        raise DescriptorError("basis", "expected two basis vectors [g, h]")
    vecs = []
    for i, b in enumerate(basis):
        b = _list(b, f"basis.{i}")
        if len(b) != 2:
            raise DescriptorError(f"basis.{i}", "a basis vector is a pair [g, h]")
        vecs.append((_real(b[0], f"basis.{i}.0"), _real(b[1], f"basis.{i}.1")))
    try:
        s = EuclideanScheme(tuple(vecs))
    except SchemeError as e:
        raise DescriptorError("basis", str(e)) from None
    w = _interval_window(_req(d, "window", ""), "window")
    if d.get("inner_window") is not None:
        w = _euclid_difference(w, _interval_window(d["inner_window"], "inner_window"))
    return kind, s, w


def _torus_point(d: dict, s: Scheme) -> TorusPoint:
    v = d.get("torus_point")
    if v is None:
        return TorusPoint(0, (0,) * len(s.space.primes)) if isinstance(s, ArithmeticScheme) else TorusPoint(0.0, 0.0)
    v = _map(v, "torus_point")
    if isinstance(s, ArithmeticScheme):
        g = _int(v.get("g", 0), "torus_point.g")
        h = _list(v.get("h", [0] * len(s.space.primes)), "torus_point.h")
        if len(h) != len(s.space.primes):
            raise DescriptorError("torus_point.h", f"expected {len(s.space.primes)} residues")
        return TorusPoint(g, tuple(_int(x, f"torus_point.h.{i}") for i, x in enumerate(h)))
    return TorusPoint(_real(v.get("g", 0.0), "torus_point.g"), _real(v.get("h", 0.0), "torus_point.h"))


def from_dict(d: dict) -> Descriptor:
    """Validate a parsed descriptor document."""
    d = _map(d, "<document>")
    schema = d.get("schema")
    if schema != SCHEMA:
        raise DescriptorError("schema", f"expected {SCHEMA!r}, got {schema!r}")
    for k in d:
        if k not in _TOP_KEYS:
            raise DescriptorError(str(k), "unknown field")
    kind, s, w = _scheme_and_window(d)
    x = _torus_point(d, s)
    try:
        mode = Mode(str(d.get("mode", "TRUNCATED")).upper())
    except ValueError:
        raise DescriptorError("mode", "expected TRUNCATED or SIEVE") from None
    if mode is Mode.SIEVE:
        if kind != "arithmetic":
            raise DescriptorError("mode", "SIEVE mode needs an arithmetic scheme")
        for _, pw in pf.terms(w):
            if pw.default not in (pf.DefaultRule.CUBEFREE, pf.DefaultRule.SQUAREFREE_IN):
                raise DescriptorError("mode", "SIEVE mode needs CUBEFREE or SQUAREFREE_IN default rules")
        if isinstance(x.h, tuple) and (any(x.h) or x.g):
            raise DescriptorError("torus_point", "SIEVE mode is defined at the torus point 0 only")
    ns = d.get("n_schedule", [100])
    ns = [_int(n, f"n_schedule.{i}", 1) if kind == "arithmetic" else _real(n, f"n_schedule.{i}")
          for i, n in enumerate(_list(ns, "n_schedule"))]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DescriptorError("n_schedule", "must be a nonempty increasing list")
    freqs = d.get("frequencies")
    if freqs is not None and freqs != "all":
        if isinstance(freqs, dict):
            freqs = _int(_req(freqs, "max_den", "frequencies."), "frequencies.max_den", 1)
        else:
            freqs = [parse_frequency(f, f"frequencies.{i}") for i, f in enumerate(_list(freqs, "frequencies"))]
    else:
        freqs = None
    lags = d.get("lags")
    if lags is not None:
        if isinstance(lags, dict):
            top = _int(_req(lags, "max", "lags."), "lags.max", 0)
            lags = list(range(0, top + 1))
        else:
            lags = [(_int if kind == "arithmetic" else _real)(k, f"lags.{i}") for i, k in enumerate(_list(lags, "lags"))]
    probes = [_real(p, f"probes.{i}") for i, p in enumerate(_list(d.get("probes", []) or [], "probes"))]
    wrap = d.get("wraparound", False)
    if not isinstance(wrap, bool):
        raise DescriptorError("wraparound", "expected true or false")
    if wrap and (kind != "arithmetic" or mode is not Mode.TRUNCATED):
        raise DescriptorError("wraparound", "wraparound needs a TRUNCATED arithmetic descriptor")
    tol = d.get("tolerance")
    if tol is not None:
        tol = _real(tol, "tolerance")
        if tol < 0:
            raise DescriptorError("tolerance", "must be >= 0")
    return Descriptor(kind, s, w, x, mode, ns, freqs, lags, probes, wrap, tol,
                      _real(d.get("freq_bound", 2.0), "freq_bound"),
                      _real(d.get("eta_bound", 8.0), "eta_bound"),
                      str(d.get("name", "")), d)


def _line_of(text: str, path: str) -> int | None:
    """1-based line of the node at a dotted field path, or of its nearest parent."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    line = None
    for part in path.split("."):
        if node is None:
            break
        line = node.start_mark.line + 1
        nxt = None
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if str(k.value) == part:
                    line, nxt = k.start_mark.line + 1, v
                    break
        elif isinstance(node, yaml.SequenceNode) and part.isdigit() and int(part) < len(node.value):
            nxt = node.value[int(part)]
            line = nxt.start_mark.line + 1
        node = nxt
    return line


def loads(text: str) -> Descriptor:
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise DescriptorError("<document>", f"not valid YAML: {getattr(e, 'problem', e)}",
                              mark.line + 1 if mark else None) from None
    try:
        return from_dict(d)
    except DescriptorError as e:
        raise DescriptorError(e.field, e.message, _line_of(text, e.field)) from None


def load(path: str) -> Descriptor:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


def with_overrides(desc: Descriptor, **kw) -> Descriptor:
    """Apply command-line overrides (None values are ignored) and revalidate."""
    d = dict(desc.raw)
    for k, v in kw.items():
        if v is not None:
            d[k] = v
    return from_dict(d)
