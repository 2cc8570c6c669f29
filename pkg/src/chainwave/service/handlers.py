"""Handler functions shared by the HTTP endpoints and the CLI."""

from __future__ import annotations

from ..presets import PRESETS, preset_config_dict
from ..scenario import ScenarioConfig, compute_predictions, run_scenario
from .schemas import (
    EventOut,
    PredictRequest,
    PredictResponse,
    PresetInfo,
    SimulateRequest,
    SimulateResponse,
)


def handle_presets() -> list[PresetInfo]:
    return [PresetInfo(name=k, description=v["description"]) for k, v in PRESETS.items()]


def handle_preset_config(name: str) -> ScenarioConfig:
    return ScenarioConfig.model_validate(preset_config_dict(name))


def handle_predict(req: PredictRequest) -> PredictResponse:
    cfg = req.resolve()
    return PredictResponse(analytics=compute_predictions(cfg))


def handle_simulate(req: SimulateRequest) -> SimulateResponse | dict:
    cfg = req.resolve()
    result = run_scenario(cfg, out_dir=req.output_dir, jobs=req.jobs)
    if "sweep" in result:
        return result
    return SimulateResponse(
        output_dir=result["output_dir"],
        files=result["files"],
        analytics=result["predictions"],
        events=[EventOut(**e) for e in result["events"]],
        runtime_seconds=result["runtime_seconds"],
    )
