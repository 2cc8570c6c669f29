"""HTTP service layer: pydantic request/response schemas, handlers, app."""

from .app import create_app
from .handlers import handle_predict, handle_presets, handle_simulate
from .schemas import (
    PredictRequest,
    PredictResponse,
    PresetInfo,
    SimulateRequest,
    SimulateResponse,
)

__all__ = [
    "create_app",
    "handle_predict",
    "handle_presets",
    "handle_simulate",
    "PredictRequest",
    "PredictResponse",
    "PresetInfo",
    "SimulateRequest",
    "SimulateResponse",
]
