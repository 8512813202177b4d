"""FastAPI application exposing the calculators and the verification engine.

Run standalone with ``uvicorn obschain.service.app:app``. The CLI drives the
same application in-process through an ASGI transport, so both entry points
exercise identical request validation and serialization.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, montecarlo, strategies
from ..channels import r_of_strength
from ..errors import DomainError, NumericError
from . import models

app = FastAPI(
    title="obschain",
    description="Estimation fidelities for chains of independent observers of a quantum state.",
    version=__version__,
)


@app.exception_handler(DomainError)
async def _domain_error(request: Request, exc: DomainError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericError)
async def _numeric_error(request: Request, exc: NumericError) -> JSONResponse:
    return JSONResponse(status_code=500, content={"detail": f"numeric failure: {exc}"})


def _header(req: object, seed: int | None = None) -> models.Header:
    return models.Header(params=req.model_dump(), seed=seed, version=__version__)


@app.get("/api/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/api/closed-form", response_model=models.ClosedFormResponse)
def closed_form(req: models.ClosedFormRequest) -> models.ClosedFormResponse:
    params = strategies.ProblemParams(
        d=req.d,
        n_copies=req.n_copies,
        observers=req.observers,
        encoding=strategies.Encoding(req.encoding),
    )
    rows = []
    for k in range(1, req.observers + 1):
        fid = strategies.greedy_fidelity(params, k)
        delta = (params.d * fid - 1.0) / (params.d - 1.0)
        rows.append(models.ClosedFormRow(k=k, delta=delta, fidelity=fid))
    return models.ClosedFormResponse(header=_header(req), rows=rows)


def _solve_schedule(system: str, d: int | None, n_copies: int | None, observers: int):
    if system == "qudit":
        return strategies.egalitarian_schedule_qudit(d, observers)
    return strategies.egalitarian_schedule_ncopy(n_copies, observers)


@app.post("/api/egalitarian", response_model=models.ScheduleResponse)
def egalitarian(req: models.EgalitarianRequest) -> models.ScheduleResponse:
    schedule = _solve_schedule(req.system, req.d, req.n_copies, req.observers)
    rows = [
        models.ScheduleRow(k=k + 1, epsilon=float(e), fidelity=float(f))
        for k, (e, f) in enumerate(zip(schedule.strengths, schedule.per_observer_fidelity))
    ]
    return models.ScheduleResponse(header=_header(req), rows=rows)


@app.post("/api/privileged", response_model=models.PrivilegedResponse)
def privileged(req: models.PrivilegedRequest) -> models.PrivilegedResponse:
    if req.system == "qudit":
        params = strategies.ProblemParams(
            d=req.d, n_copies=1, observers=req.observers, encoding=strategies.Encoding.SINGLE_COPY
        )
        dim = req.d
    else:
        params = strategies.ProblemParams(
            d=2,
            n_copies=req.n_copies,
            observers=req.observers,
            encoding=strategies.Encoding.SYMMETRIC_COPIES,
        )
        dim = 2
    if req.epsilon is None:
        eps, delta = strategies.privileged_optimize(params)
    else:
        eps = req.epsilon
        delta = strategies.privileged_delta(params, eps)
    row = models.PrivilegedRow(
        epsilon=eps, delta=delta, fidelity=strategies.fidelity_from_delta(delta, dim)
    )
    return models.PrivilegedResponse(header=_header(req), rows=[row])


def _simulate_strengths(req: models.SimulateRequest) -> np.ndarray:
    if req.epsilon is not None:
        return np.full(req.observers, req.epsilon)
    if req.strengths is not None:
        return np.asarray(req.strengths, dtype=float)
    if req.schedule == "stochastic":
        return strategies.stochastic_strengths(req.n_copies, req.observers)
    if req.system == "qudit":
        return strategies.egalitarian_schedule_qudit(req.d, req.observers).strengths
    return strategies.egalitarian_schedule_ncopy(req.n_copies, req.observers).strengths


@app.post("/api/simulate", response_model=models.SimulateResponse)
def simulate(req: models.SimulateRequest) -> models.SimulateResponse:
    eps = _simulate_strengths(req)
    config = montecarlo.SimConfig(
        system=req.system,
        observers=req.observers,
        strengths=eps,
        trials=req.trials,
        master_seed=req.seed,
        d=req.d,
        n_copies=req.n_copies,
        stochastic_realization=req.stochastic_realization,
    )
    if req.system == "qudit":
        result = montecarlo.simulate_qudit_chain(config)
        closed = strategies.chain_fidelities_qudit(req.d, eps)
    else:
        result = montecarlo.simulate_spin_chain(config)
        closed = strategies.chain_fidelities_ncopy(
            req.n_copies, eps, stochastic=req.stochastic_realization
        )
    rows = [
        models.SimulateRow(
            k=k + 1,
            epsilon=float(eps[k]),
            mean=float(result.per_observer_mean[k]),
            stderr=float(result.per_observer_stderr[k]),
            closed_form=float(closed[k]),
        )
        for k in range(req.observers)
    ]
    return models.SimulateResponse(header=_header(req, seed=req.seed), rows=rows)


@app.post("/api/verify", response_model=models.VerifyResponse)
def verify(req: models.VerifyRequest) -> models.VerifyResponse:
    if req.check == "haar-moments":
        report = montecarlo.verify_haar_moments(req.d, req.samples, req.seed)
        rows = [
            models.VerifyRow(
                name="second_moment_max_deviation",
                value=report.second.max_abs_deviation,
                target=0.0,
                sigma_ratio=report.second.max_sigma_ratio,
            ),
            models.VerifyRow(
                name="fourth_moment_max_deviation",
                value=report.fourth.max_abs_deviation,
                target=0.0,
                sigma_ratio=report.fourth.max_sigma_ratio,
            ),
        ]
    elif req.check == "channel-r":
        est = montecarlo.estimate_channel_r(req.d, req.epsilon, req.samples, req.seed)
        target = r_of_strength(req.epsilon, req.d)
        sigma = abs(est.r_hat - target) / est.stderr if est.stderr > 0.0 else 0.0
        rows = [
            models.VerifyRow(
                name="channel_shrink",
                value=est.r_hat,
                stderr=est.stderr,
                target=target,
                sigma_ratio=sigma,
            )
        ]
    else:
        report = montecarlo.verify_bloch_shrink(req.d, req.epsilon, req.samples, req.seed)
        target = req.epsilon / (req.d + 1.0)
        sigma = (
            abs(report.delta_hat - target) / report.delta_stderr
            if report.delta_stderr > 0.0
            else 0.0
        )
        worst = int(np.argmax(np.abs(report.orthogonal_mean)))
        rows = [
            models.VerifyRow(
                name="aligned_shrink",
                value=report.delta_hat,
                stderr=report.delta_stderr,
                target=target,
                sigma_ratio=sigma,
            ),
            models.VerifyRow(
                name="orthogonal_residual",
                value=float(report.orthogonal_mean[worst]),
                stderr=float(report.orthogonal_stderr[worst]),
                target=0.0,
                sigma_ratio=report.max_orthogonal_sigma(),
            ),
        ]
    return models.VerifyResponse(header=_header(req, seed=req.seed), rows=rows)


def parse_k_grid(spec: str) -> list[int]:
    """Parse an observer-count grid: ``log:a..b:n`` or comma-separated integers.

    The log form yields ``n`` log-spaced integers between ``a`` and ``b``
    inclusive, deduplicated and ascending.
    """
    text = spec.strip()
    if text.startswith("log:"):
        body = text[4:]
        try:
            bounds, count_s = body.rsplit(":", 1)
            lo_s, hi_s = bounds.split("..", 1)
            lo, hi, count = float(lo_s), float(hi_s), int(count_s)
        except ValueError as exc:
            raise DomainError(f"bad grid spec {spec!r}: expected log:a..b:n") from exc
        if lo < 1 or hi < lo or count < 1:
            raise DomainError(f"bad grid spec {spec!r}: need 1 <= a <= b and n >= 1")
        points = np.logspace(math.log10(lo), math.log10(hi), count)
        return sorted({int(round(p)) for p in points})
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise DomainError(f"bad grid spec {spec!r}: expected log:a..b:n or a comma list") from exc
    if not values:
        raise DomainError(f"bad grid spec {spec!r}: empty grid")
    if min(values) < 1:
        raise DomainError("grid observer counts must be >= 1")
    return sorted(set(values))


@app.post("/api/figure1", response_model=models.Figure1Response)
def figure1(req: models.Figure1Request) -> models.Figure1Response:
    if isinstance(req.k_grid, str):
        ks = parse_k_grid(req.k_grid)
    else:
        if not req.k_grid:
            raise DomainError("grid of observer counts must be nonempty")
        if min(req.k_grid) < 1:
            raise DomainError("grid observer counts must be >= 1")
        ks = sorted(set(int(k) for k in req.k_grid))
    rows = [models.Figure1Row(**row) for row in strategies.figure1_sweep(req.n_copies, ks)]
    return models.Figure1Response(header=_header(req), rows=rows)
