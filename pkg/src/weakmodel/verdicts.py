"""Verdict records and the tolerance policy shared by estimators and spectrum."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

EXACT_TOL = 1e-12


class VerdictKind(str, enum.Enum):
    UNIFORM_DIST = "UNIFORM_DIST"
    GENERIC_1_GH = "GENERIC_1_GH"
    GENERIC_2_G = "GENERIC_2_G"
    CONSISTENT_PHASE = "CONSISTENT_PHASE"


@dataclass(frozen=True)
class Verdict:
    n: float
    kind: VerdictKind
    label: str
    empirical: complex
    theoretical: complex
    abs_error: float
    tolerance: float
    passed: bool

    @classmethod
    def compare(cls, n, kind: VerdictKind, label: str, empirical, theoretical,
                tolerance: float) -> "Verdict":
        e, t = complex(empirical), complex(theoretical)
        err = abs(e - t)
        if not (math.isfinite(err) and math.isfinite(tolerance)):
            raise ValueError("verdict values must be finite")
        return cls(n, kind, label, e, t, err, tolerance, err <= tolerance)


def heuristic_tolerance(volume: float) -> float:
    """Convergence allowance for non-periodic runs: max(1e-3, 5/sqrt(|A_n|))."""
    return max(1e-3, 5.0 / math.sqrt(volume))
