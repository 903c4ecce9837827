"""FastAPI application wiring the handlers to routes.

Domain errors map onto HTTP statuses: bad parameter values 422, malformed
input data 400, blown size budgets 413. Serve with e.g.
uvicorn ehlink.service:app.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import InputDataError, ParameterError, ResourceLimitError
from . import handlers
from .schemas import (
    AllocateRequest,
    AllocateResponse,
    CapacityResponse,
    FeasibilityTrendRequest,
    FeasibilityTrendResponse,
    Fig5SweepRequest,
    Fig5SweepResponse,
    HealthResponse,
    SimulateRequest,
    SimulateResponse,
    TraceRequest,
    TraceResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="ehlink",
        version=__version__,
        description="Energy-harvesting AWGN link: schemes, feasibility, offline allocation",
    )

    @app.exception_handler(ParameterError)
    async def _parameter_error(request: Request, exc: ParameterError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(InputDataError)
    async def _input_data_error(request: Request, exc: InputDataError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ResourceLimitError)
    async def _resource_error(request: Request, exc: ResourceLimitError):
        return JSONResponse(status_code=413, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return handlers.handle_health()

    @app.get("/capacity", response_model=CapacityResponse)
    def get_capacity(p: float) -> CapacityResponse:
        return handlers.handle_capacity(p)

    @app.post("/allocate", response_model=AllocateResponse)
    def allocate(req: AllocateRequest) -> AllocateResponse:
        return handlers.handle_allocate(req)

    @app.post("/trace", response_model=TraceResponse)
    def trace(req: TraceRequest) -> TraceResponse:
        return handlers.handle_trace(req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        return handlers.handle_simulate(req)

    @app.post("/sweep/fig5", response_model=Fig5SweepResponse)
    def sweep_fig5(req: Fig5SweepRequest) -> Fig5SweepResponse:
        return handlers.handle_fig5(req)

    @app.post("/sweep/feasibility", response_model=FeasibilityTrendResponse)
    def sweep_feasibility(req: FeasibilityTrendRequest) -> FeasibilityTrendResponse:
        return handlers.handle_feasibility(req)

    return app


app = create_app()
