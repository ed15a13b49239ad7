"""HTTP adapter: one POST route per subcommand, plus /health.

Domain errors map onto distinct status codes so remote clients can
translate them back into the CLI's exit codes: configuration 400,
resource caps 422, missing cache entries 404, unusable cache 409.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    CacheError,
    CacheMissError,
    CapError,
    ConfigError,
    HybridwalkError,
)
from . import models as m
from .handlers import (
    AppState,
    handle_fixed_sweep,
    handle_hist,
    handle_pinit,
    handle_run,
    handle_sweep,
    handle_table,
    handle_validate,
)

_STATUS_BY_ERROR = (
    (ConfigError, 400),
    (CapError, 422),
    (CacheMissError, 404),
    (CacheError, 409),
    (HybridwalkError, 500),
)


def status_for_error(exc: HybridwalkError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 500


def create_app(
    cache_dir: str | None = None, max_workers: int | None = None
) -> FastAPI:
    state = AppState.create(cache_dir=cache_dir, max_workers=max_workers)
    app = FastAPI(title="hybridwalk", version=__version__)
    app.state.settings = state

    @app.exception_handler(HybridwalkError)
    async def _domain_error(request: Request, exc: HybridwalkError) -> JSONResponse:
        return JSONResponse(
            status_code=status_for_error(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=m.HealthResponse)
    def health() -> m.HealthResponse:
        return m.HealthResponse(status="ok", version=__version__)

    @app.post("/pinit", response_model=m.PinitResponse)
    def pinit(req: m.PinitRequest) -> m.PinitResponse:
        return handle_pinit(req, state)

    @app.post("/run", response_model=m.RunResponse)
    def run(req: m.RunRequest) -> m.RunResponse:
        return handle_run(req, state)

    @app.post("/sweep", response_model=m.SweepResponse)
    def sweep(req: m.SweepRequest) -> m.SweepResponse:
        return handle_sweep(req, state)

    @app.post("/fixed-sweep", response_model=m.FixedSweepResponse)
    def fixed_sweep(req: m.FixedSweepRequest) -> m.FixedSweepResponse:
        return handle_fixed_sweep(req, state)

    @app.post("/table", response_model=m.TableResponse)
    def table(req: m.TableRequest) -> m.TableResponse:
        return handle_table(req)

    @app.post("/hist", response_model=m.HistResponse)
    def hist(req: m.HistRequest) -> m.HistResponse:
        return handle_hist(req)

    @app.post("/validate", response_model=m.ValidateResponse)
    def validate(req: m.ValidateRequest) -> m.ValidateResponse:
        return handle_validate(req, state)

    return app
