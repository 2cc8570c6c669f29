"""Request/response models of the HTTP API.

Requests name either a preset or carry a full inline scenario config; dotted
``overrides`` apply on top of either.  The CLI builds the same objects and
calls the same handlers in-process.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..scenario import ScenarioConfig


class ScenarioRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = None
    config: Optional[ScenarioConfig] = None
    overrides: dict[str, Any] = Field(default_factory=dict)
    precision_bits: Optional[int] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.preset is None) == (self.config is None):
            raise ValueError("provide exactly one of 'preset' or 'config'")
        return self

    def resolve(self) -> ScenarioConfig:
        from ..presets import preset_config_dict

        if self.preset is not None:
            cfg = ScenarioConfig.model_validate(preset_config_dict(self.preset))
        else:
            cfg = self.config
        for dotted, value in self.overrides.items():
            cfg = cfg.with_override(dotted, value)
        if self.precision_bits is not None:
            cfg = cfg.with_override("evolution.precision_bits", self.precision_bits)
        if self.seed is not None:
            cfg = cfg.with_override("seed", self.seed)
        return cfg


class PredictRequest(ScenarioRequest):
    pass


class SimulateRequest(ScenarioRequest):
    output_dir: Optional[str] = None
    jobs: int = 1


class PredictResponse(BaseModel):
    analytics: dict[str, Any]


class EventOut(BaseModel):
    time: float
    site: int
    kind: str
    confidence: float


class SimulateResponse(BaseModel):
    output_dir: str
    files: dict[str, str]
    analytics: dict[str, Any]
    events: list[EventOut]
    runtime_seconds: float


class PresetInfo(BaseModel):
    name: str
    description: str


class HealthOut(BaseModel):
    status: str
    version: str
