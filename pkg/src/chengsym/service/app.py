"""FastAPI application wrapping the analysis pipeline.

Run with ``chengsym serve`` or ``uvicorn chengsym.service.app:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from chengsym import __version__
from chengsym.errors import ChengError
from chengsym.expr import ExprSyntaxError
from chengsym.service import handlers, schemas

app = FastAPI(
    title="chengsym",
    description=(
        "Symmetry verification, similarity reduction, closed-form solving "
        "and residual reporting for the Cheng light-absorption system."
    ),
    version=__version__,
)


@app.exception_handler(ExprSyntaxError)
async def _syntax_error(_request: Request, exc: ExprSyntaxError):
    return JSONResponse(status_code=400, content={"error": "syntax", "detail": str(exc)})


@app.exception_handler(KeyError)
async def _key_error(_request: Request, exc: KeyError):
    return JSONResponse(status_code=404, content={"error": "unknown-identifier", "detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(_request: Request, exc: ValueError):
    return JSONResponse(status_code=422, content={"error": "invalid-request", "detail": str(exc)})


@app.exception_handler(ChengError)
async def _cheng_error(_request: Request, exc: ChengError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.get("/health", response_model=schemas.HealthReport)
def get_health() -> schemas.HealthReport:
    return handlers.health()


@app.post("/verify-symmetries", response_model=schemas.VerifySymmetriesReport)
def post_verify_symmetries(req: schemas.VerifySymmetriesRequest) -> schemas.VerifySymmetriesReport:
    return handlers.run_verify_symmetries(req)


@app.post("/reduce", response_model=schemas.ReduceReport)
def post_reduce(req: schemas.ReduceRequest) -> schemas.ReduceReport:
    return handlers.run_reduce(req)


@app.post("/solve", response_model=schemas.SolveReport)
def post_solve(req: schemas.SolveRequest) -> schemas.SolveReport:
    return handlers.run_solve(req)


@app.post("/report", response_model=schemas.ResidualReportModel)
def post_report(req: schemas.ReportRequest) -> schemas.ResidualReportModel:
    return handlers.run_report(req)
