"""Command-line client.

Requests go to the in-process app unless ``--url`` names a running server.
Exit codes: 0 ok, 1 usage error, 2 descriptor validation failure,
3 a verdict failed (compare and genericity only).
"""

from __future__ import annotations

import os
import sys
import warnings

import click
import yaml

from . import tables

EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_FAILED = 3


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _client(url: str | None):
    if url:
        import httpx

        return httpx.Client(base_url=url, timeout=600.0)
    with warnings.catch_warnings():
        # starlette nags about its httpx transport; nothing to act on here
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _parse_lags(text: str | None) -> list[float] | None:
    """'0:10' (inclusive) and '0,3,8' forms; they can be mixed."""
    if text is None:
        return None
    out: list[float] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ":" in part:
                a, b = (int(x) for x in part.split(":"))
                out.extend(range(a, b + 1))
            elif part:
                out.append(float(part))
    except ValueError:
        raise click.BadParameter(f"cannot read lags {text!r}", param_hint="--lags") from None
    return out


def _parse_probes(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot read probes {text!r}", param_hint="--probes") from None


def _post(ctx: click.Context, path: str, text: str, options: dict) -> dict:
    client = _client(ctx.obj.get("url"))
    try:
        resp = client.post(path, json={"descriptor": text, "options": options})
    except Exception as e:  # connection problems with --url
        raise Failure(EXIT_USAGE, f"request failed: {e}") from None
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if isinstance(detail, list):
        msgs = []
        for d in detail:
            if "field" in d:
                where = f"line {d['line']}, " if d.get("line") else ""
                msgs.append(f"{where}{d['field']}: {d['message']}")
            else:
                msgs.append(f"{'.'.join(str(x) for x in d.get('loc', []))}: {d.get('msg')}")
        detail = "\n".join(msgs)
    raise Failure(EXIT_INVALID if resp.status_code == 422 else EXIT_USAGE, str(detail))


def _write(out: str, name: str, content: str) -> str:
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(content)
    return name


def _run(ctx: click.Context, command: str, descriptor: str, n, mode, freq_bound, out, wraparound,
         probes, lags) -> None:
    with open(descriptor, encoding="utf-8") as f:
        text = f.read()
    options = {"n": n, "mode": mode.upper() if mode else None, "freq_bound": freq_bound,
               "wraparound": wraparound, "probes": _parse_probes(probes), "lags": _parse_lags(lags)}
    options = {k: v for k, v in options.items() if v is not None}
    body = _post(ctx, "/" + command, text, options)

    files: dict[str, str] = {}
    passed = None
    tolerances: list[float] = []
    if command == "validate":
        report = yaml.safe_dump(body["summary"], sort_keys=True)
    elif command == "generate":
        for smp in body["samples"]:
            files[f"points_n{tables.fmt(smp['n'])}.txt"] = "".join(l + "\n" for l in smp["lines"])
        report = "".join(f"n={tables.fmt(s['n'])}: {s['count']} points\n" for s in body["samples"])
    elif command == "diffract":
        files["spectrum.csv"] = tables.spectrum_csv(body["rows"])
        report = (f"{len(body['rows'])} frequencies, total intensity "
                  f"{tables.fmt(body['total_intensity'])}\n")
    elif command == "periods":
        files["periods.yaml"] = yaml.safe_dump(body["periods"], sort_keys=True)
        report = files["periods.yaml"]
    else:
        files[f"{command}.csv"] = tables.verdict_csv(body["rows"])
        passed = body["passed"]
        tolerances = body["tolerances"]
        bad = sum(not r["passed"] for r in body["rows"])
        report = f"{len(body['rows'])} verdicts, {bad} failed\n"

    if out is None:
        click.echo(report if command in ("validate", "periods") or not files
                   else "".join(files.values()), nl=False)
    else:
        os.makedirs(out, exist_ok=True)
        written = [_write(out, name, content) for name, content in sorted(files.items())]
        man = tables.manifest(command, descriptor, text, options, tolerances, written, passed)
        _write(out, "manifest.yaml", man)
        click.echo(report, nl=False)
    if passed is False and command in ("genericity", "compare"):
        raise Failure(EXIT_FAILED, "at least one verdict failed")


@click.group()
@click.option("--url", default=None, help="Base URL of a running service (default: in-process).")
@click.pass_context
def main(ctx: click.Context, url: str | None) -> None:
    """Weak model sets: generation, estimators, spectra."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url


def _command(name: str, help_text: str):
    @click.argument("descriptor", type=click.Path(exists=True, dir_okay=False))
    @click.option("--n", "n", type=click.FloatRange(min=1), default=None, help="Box radius (replaces n_schedule).")
    @click.option("--mode", type=click.Choice(["TRUNCATED", "SIEVE"], case_sensitive=False), default=None)
    @click.option("--freq-bound", type=click.FloatRange(min=0), default=None)
    @click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
    @click.option("--wraparound/--no-wraparound", default=None)
    @click.option("--probes", default=None, help="Comma-separated off-lattice frequencies.")
    @click.option("--lags", default=None, help="Lags, e.g. '0:16' or '0,3,8'.")
    @click.pass_context
    def cmd(ctx, descriptor, n, mode, freq_bound, out, wraparound, probes, lags):
        _run(ctx, name, descriptor, n, mode, freq_bound, out, wraparound, probes, lags)

    cmd.__doc__ = help_text
    return main.command(name)(cmd)


for _name, _help in [
    ("validate", "Check a descriptor and print its summary."),
    ("generate", "Write the points of each box in the schedule."),
    ("density", "Empirical against theoretical density."),
    ("autocorr", "Empirical against theoretical autocorrelation."),
    ("diffract", "Theoretical diffraction spectrum with extinction classes."),
    ("fourier-bohr", "Empirical against theoretical Fourier-Bohr coefficients."),
    ("periods", "Period group, eigenvalues and discreteness radius."),
    ("genericity", "Density, autocorrelation and FB verdicts per box."),
    ("compare", "Estimators against spectrum, including the consistent phase check."),
]:
    _command(_name, _help)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


def run(argv: list[str] | None = None) -> int:
    """Entry point returning the exit code instead of raising SystemExit."""
    try:
        main.main(args=argv, prog_name="weakmodel", standalone_mode=False)
    except Failure as e:
        click.echo(str(e), err=True)
        return e.code
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except OSError as e:
        click.echo(str(e), err=True)
        return EXIT_USAGE
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
