"""HTTP front end: every endpoint takes a descriptor plus overrides."""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import pipeline
from ..descriptor import Descriptor, DescriptorError, loads, with_overrides
from ..verdicts import Verdict
from .models import (FieldError, GenerateResponse, PeriodsResponse, RunOptions, RunRequest, Sample,
                     SpectrumRow, SpectrumTable, ValidateResponse, VerdictRow, VerdictTable)

app = FastAPI(title="weakmodel", version="0.1.0")


class RunError(ValueError):
    """A run that cannot be carried out with the given options."""


@app.exception_handler(DescriptorError)
async def _descriptor_error(request: Request, exc: DescriptorError):
    err = FieldError(**exc.to_dict())
    return JSONResponse(status_code=422, content={"detail": [err.model_dump()]})


@app.exception_handler(RunError)
async def _run_error(request: Request, exc: RunError):
    err = FieldError(field="options", message=str(exc))
    return JSONResponse(status_code=400, content={"detail": [err.model_dump()]})


def _integral(v: float, field: str):
    if float(v).is_integer():
        return int(v)
    raise DescriptorError(field, f"expected an integer, got {v!r}")


def _descriptor(req: RunRequest) -> Descriptor:
    d = loads(req.descriptor)
    o: RunOptions = req.options
    arith = d.is_arithmetic
    over = {}
    if o.n is not None:
        over["n_schedule"] = [_integral(o.n, "options.n") if arith else o.n]
    if o.lags is not None:
        over["lags"] = [_integral(k, f"options.lags.{i}") if arith else k for i, k in enumerate(o.lags)]
    over.update(mode=o.mode, freq_bound=o.freq_bound, wraparound=o.wraparound, probes=o.probes)
    return with_overrides(d, **over)


def _row(v: Verdict) -> VerdictRow:
    return VerdictRow(n=v.n, kind=v.kind.value, label=v.label,
                      empirical_re=v.empirical.real, empirical_im=v.empirical.imag,
                      theoretical_re=v.theoretical.real, theoretical_im=v.theoretical.imag,
                      abs_error=v.abs_error, tolerance=v.tolerance, passed=v.passed)


def _run(fn, d: Descriptor):
    try:
        return fn(d)
    except DescriptorError:
        raise
    except ValueError as e:
        raise RunError(str(e)) from None


def _table(d: Descriptor, fn) -> VerdictTable:
    r = _run(fn, d)
    return VerdictTable(summary=pipeline.summary(d), rows=[_row(v) for v in r.verdicts],
                        tolerances=r.tolerances, passed=r.passed)


@app.post("/validate", response_model=ValidateResponse)
def validate(req: RunRequest):
    d = _descriptor(req)
    return ValidateResponse(ok=True, summary=pipeline.summary(d))


@app.post("/generate", response_model=GenerateResponse)
def generate(req: RunRequest):
    d = _descriptor(req)
    out = _run(pipeline.run_generate, d)
    return GenerateResponse(summary=pipeline.summary(d),
                            samples=[Sample(n=n, count=len(lines), lines=lines) for n, lines in out])


@app.post("/density", response_model=VerdictTable)
def density(req: RunRequest):
    return _table(_descriptor(req), pipeline.run_density)


@app.post("/autocorr", response_model=VerdictTable)
def autocorr(req: RunRequest):
    return _table(_descriptor(req), pipeline.run_autocorr)


@app.post("/fourier-bohr", response_model=VerdictTable)
def fourier_bohr(req: RunRequest):
    return _table(_descriptor(req), pipeline.run_fourier_bohr)


@app.post("/genericity", response_model=VerdictTable)
def genericity(req: RunRequest):
    return _table(_descriptor(req), pipeline.run_genericity)


@app.post("/compare", response_model=VerdictTable)
def compare(req: RunRequest):
    return _table(_descriptor(req), pipeline.run_compare)


@app.post("/diffract", response_model=SpectrumTable)
def diffract(req: RunRequest):
    d = _descriptor(req)
    spec = _run(pipeline.run_diffract, d)
    rows = []
    for e in spec.entries:
        chi, eta = e.char.chi, e.char.eta
        if isinstance(chi, Fraction):
            where = dict(chi_num=chi.numerator, chi_den=chi.denominator)
        else:
            where = dict(chi_real=float(chi))
        rows.append(SpectrumRow(**where, eta=list(eta) if isinstance(eta, tuple) else float(eta),
                                intensity=e.intensity, fb_re=e.fb.real, fb_im=e.fb.imag,
                                klass=e.klass.value))
    return SpectrumTable(summary=pipeline.summary(d), rows=rows, total_intensity=spec.total_intensity,
                         window_measure=spec.window_measure, tail_estimate=spec.tail_estimate,
                         notes=spec.notes)


@app.post("/periods", response_model=PeriodsResponse)
def periods(req: RunRequest):
    d = _descriptor(req)
    return PeriodsResponse(summary=pipeline.summary(d), periods=_run(pipeline.run_periods, d))
