"""CSV tables and the run manifest.  Output is byte-for-byte reproducible."""

from __future__ import annotations

import csv
import hashlib
import io
import platform
from importlib import metadata
from typing import Any, Iterable, Mapping

import yaml

VERDICT_COLUMNS = ["n", "kind", "frequency-or-lag", "empirical_re", "empirical_im",
                   "theoretical_re", "theoretical_im", "abs_error", "tolerance", "pass"]
SPECTRUM_COLUMNS = ["chi_num", "chi_den", "chi_real", "intensity", "fb_re", "fb_im", "class"]


def fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        v = v + 0.0  # no "-0"
        return f"{v:.15g}"
    return str(v)


def _csv(columns: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for r in rows:
        wr.writerow([fmt(x) for x in r])
    return buf.getvalue()


def verdict_csv(rows: Iterable[Mapping]) -> str:
    return _csv(VERDICT_COLUMNS, ([r["n"], r["kind"], r["label"], r["empirical_re"], r["empirical_im"],
                                   r["theoretical_re"], r["theoretical_im"], r["abs_error"],
                                   r["tolerance"], r["passed"]] for r in rows))


def spectrum_csv(rows: Iterable[Mapping]) -> str:
    rows = list(rows)
    cols = list(SPECTRUM_COLUMNS)
    if rows and rows[0].get("chi_real") is None:
        cols.remove("chi_real")
    else:
        cols.remove("chi_num")
        cols.remove("chi_den")
    key = {"class": "klass"}
    return _csv(cols, ([r[key.get(c, c)] for c in cols] for r in rows))


def versions() -> dict[str, str]:
    from . import __version__

    out = {"python": platform.python_version(), "weakmodel": __version__}
    for pkg in ("numpy", "fastapi", "pydantic"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def manifest(subcommand: str, descriptor_path: str, descriptor_text: str, options: Mapping,
             tolerances: list[float], outputs: list[str], passed: bool | None = None) -> str:
    doc = {
        "subcommand": subcommand,
        "descriptor": {
            "path": descriptor_path,
            "sha256": hashlib.sha256(descriptor_text.encode("utf-8")).hexdigest(),
            "text": descriptor_text,
        },
        "options": {k: v for k, v in options.items() if v is not None},
        "versions": versions(),
        "tolerances": [fmt(float(t)) for t in sorted(set(tolerances))],
        "outputs": sorted(outputs),
    }
    if passed is not None:
        doc["passed"] = passed
    return yaml.safe_dump(doc, sort_keys=True, allow_unicode=True)
