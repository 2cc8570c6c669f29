"""FastAPI application exposing the simulation and prediction handlers."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ChainwaveError, PrecisionError
from .handlers import handle_predict, handle_preset_config, handle_presets, handle_simulate
from .schemas import (
    HealthOut,
    PredictRequest,
    PredictResponse,
    PresetInfo,
    SimulateRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="chainwave",
        version=__version__,
        description="Wave-packet dynamics on non-reciprocal 1D lattices",
    )

    @app.get("/api/v1/health", response_model=HealthOut)
    def health():
        return HealthOut(status="ok", version=__version__)

    @app.get("/api/v1/presets", response_model=list[PresetInfo])
    def presets():
        return handle_presets()

    @app.get("/api/v1/presets/{name}")
    def preset_config(name: str):
        try:
            return handle_preset_config(name).model_dump(mode="json")
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/v1/predict", response_model=PredictResponse)
    def predict(req: PredictRequest):
        try:
            return handle_predict(req)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ChainwaveError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/api/v1/simulate")
    def simulate(req: SimulateRequest):
        try:
            out = handle_simulate(req)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except PrecisionError as exc:
            raise HTTPException(
                status_code=422,
                detail={
                    "error": "precision_insufficient",
                    "message": str(exc),
                    "suggested_precision_bits": exc.suggested_bits,
                },
            )
        except ChainwaveError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"i/o failure: {exc}")
        if hasattr(out, "model_dump"):
            return out.model_dump(mode="json")
        return out

    return app


app = create_app()
