"""FastAPI application exposing the command layer over HTTP.

The CLI talks to this app in-process by default; `winoconv serve` runs it
under uvicorn for remote clients.  Domain validation failures (unknown
suite, bad algorithm name, bad point set) surface as HTTP 400.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..commands import cmd_accuracy, cmd_bench, cmd_complexity, cmd_gen
from ..reports import Report
from .schemas import (AccuracyRequest, BenchRequest, GenRequest, GenResponse,
                      HealthResponse, ReportResponse)


def _report_response(rep: Report) -> ReportResponse:
    return ReportResponse(columns=list(rep.columns), rows=[list(r) for r in rep.rows],
                          seed=rep.seed, csv=rep.to_csv(), text=rep.to_text())


def create_app() -> FastAPI:
    app = FastAPI(title="winoconv", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/accuracy", response_model=ReportResponse)
    def accuracy(req: AccuracyRequest) -> ReportResponse:
        try:
            rep = cmd_accuracy(suite=req.suite, algos=req.algos,
                               precision=req.precision, seed=req.seed,
                               scale=req.scale)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _report_response(rep)

    @app.get("/v1/complexity/{table}", response_model=ReportResponse)
    def complexity(table: str) -> ReportResponse:
        try:
            rep = cmd_complexity(table)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _report_response(rep)

    @app.post("/v1/bench", response_model=ReportResponse)
    def bench(req: BenchRequest) -> ReportResponse:
        try:
            rep = cmd_bench(suite=req.suite, algo=req.algo, batch=req.batch,
                            repeats=req.repeats, scale=req.scale, seed=req.seed)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _report_response(rep)

    @app.post("/v1/gen", response_model=GenResponse)
    def gen(req: GenRequest) -> GenResponse:
        try:
            res = cmd_gen(req.m, req.r, req.points)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return GenResponse(text=res.text, verified=res.verified,
                           max_magnitude=str(res.max_magnitude),
                           mu_1d=res.mu_1d, mu_2d=res.mu_2d)

    return app
