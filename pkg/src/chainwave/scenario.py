"""Scenario configuration, orchestration, and file outputs.

A scenario is a TOML file with sections [model], [initial], [evolution],
[analysis], [output], optional [sweep], and a top-level ``seed``.  Unknown
keys are rejected so misspelled settings cannot silently change a run.
Identical config + seed produces byte-identical CSV/JSON outputs except the
``volatile`` block of the metadata (timestamp, runtime).

Outputs per run directory:

* ``trajectory.csv``  - rows (t, site, log10_abs2, re_phase,
  im_phase_or_blank, normalized_abs2); the log10 column is always the raw
  magnitude so growth rates survive normalization.
* ``metadata.json``   - full resolved config, seed, code version, volatile
  block.
* ``analytics.json``  - closed-form predictions applicable to the scenario.
* ``events.json``     - detected transition events.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import time

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from .errors import ChainwaveError, InvalidParameterError
from .evolution import (
    EvolutionConfig,
    SPECTRAL_TRANSFORM,
    Trajectory,
    edge_amplitude_log10,
    evolve,
    evolve_via_transform,
)
from .models import (
    HATANO_NELSON,
    NH_SSH,
    DisorderSpec,
    HnParams,
    ModelSpec,
    SshParams,
    build_hamiltonian,
)
from .states import GaussianPacket, StateVector, delta_state, gaussian_state
from . import analytics
from . import wavefront

SCHEMA_VERSION = 1


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Literal["hatano_nelson", "nh_ssh"]
    n: int
    a: float = 1.0
    boundary: Literal["obc", "pbc"] = "obc"
    t_l: Optional[float] = None
    t_r: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    gamma: Optional[float] = None
    disorder_w: float = 0.0

    def to_spec(self, seed: int) -> ModelSpec:
        disorder = DisorderSpec(self.disorder_w, seed) if self.disorder_w > 0 else None
        if self.variant == HATANO_NELSON:
            if self.t_l is None or self.t_r is None:
                raise InvalidParameterError("hatano_nelson needs t_l and t_r")
            return ModelSpec(
                HATANO_NELSON, self.n, self.a, self.boundary,
                hn=HnParams(self.t_l, self.t_r), disorder=disorder,
            )
        if self.t1 is None or self.t2 is None or self.gamma is None:
            raise InvalidParameterError("nh_ssh needs t1, t2 and gamma")
        return ModelSpec(
            NH_SSH, self.n, self.a, self.boundary,
            ssh=SshParams(self.t1, self.t2, self.gamma), disorder=disorder,
        )


class InitialSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["delta", "gaussian"]
    n0: float
    sigma: Optional[float] = None
    k0: float = 0.0
    # dimer chain only: restrict the packet to one sublattice; n0/sigma are
    # then in cell units
    sublattice: Optional[Literal["A", "B"]] = None

    def to_state(self, spec: ModelSpec, precision_bits: int) -> StateVector:
        if self.kind == "delta":
            return delta_state(int(self.n0), spec.dim, precision_bits)
        if self.sigma is None:
            raise InvalidParameterError("gaussian initial state needs sigma")
        packet = GaussianPacket(self.n0, self.sigma, self.k0, spec.a)
        if self.sublattice is None:
            return gaussian_state(packet, spec.dim, precision_bits)
        if spec.variant != NH_SSH:
            raise InvalidParameterError("sublattice applies to the dimer chain")
        cells = gaussian_state(packet, spec.n, precision_bits)
        offset = 0 if self.sublattice == "A" else 1
        if cells.backend == "numpy":
            vals = np.zeros(spec.dim, dtype=complex)
            vals[offset::2] = cells.values
            return StateVector(vals, cells.precision_bits)
        import gmpy2

        vals = [gmpy2.mpc(0)] * spec.dim
        for i, z in enumerate(cells.values):
            vals[2 * i + offset] = z
        return StateVector(vals, cells.precision_bits)

    def packet(self, spec: ModelSpec) -> Optional[GaussianPacket]:
        if self.kind != "gaussian":
            return None
        return GaussianPacket(self.n0, self.sigma, self.k0, spec.a)


class TimeGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float = 0.0
    stop: float
    step: float

    def expand(self) -> list[float]:
        if self.step <= 0 or self.stop < self.start:
            raise InvalidParameterError("need step > 0 and stop >= start")
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [self.start + i * self.step for i in range(n + 1)]


class EvolutionSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    backend: Literal["spectral_transform", "precision_stepper"] = "spectral_transform"
    precision_bits: int = 53
    tolerance: float = 1e-10
    max_step: float = 1.0
    times: Union[TimeGrid, list[float]]
    allow_low_precision: bool = False

    def expand_times(self) -> list[float]:
        if isinstance(self.times, TimeGrid):
            return self.times.expand()
        if len(self.times) == 0:
            raise InvalidParameterError("times list must be non-empty")
        return list(self.times)

    def to_config(self, keep_states: bool = False) -> EvolutionConfig:
        return EvolutionConfig(
            backend=self.backend,
            precision_bits=self.precision_bits,
            stepper_tolerance=self.tolerance,
            max_step=self.max_step,
            keep_states=keep_states,
            allow_low_precision=self.allow_low_precision,
        )


class AnalysisSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    edge_site: Optional[int] = None
    # when set, a fronts.csv with per-snapshot outermost sites above this
    # max-relative log10 threshold is written
    front_threshold_log10: Optional[float] = None
    min_jump_sites: int = 10
    detect_events: bool = True
    wall_distance: Optional[float] = None
    k_target: float = -math.pi / 2.0


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "out"
    formats: list[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])
    normalization: Literal["none", "max"] = "max"
    include_hermitian_frame: bool = False


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: str
    values: list[float]


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSection
    initial: InitialSection
    evolution: EvolutionSection
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    output: OutputSection = Field(default_factory=OutputSection)
    seed: int = 0
    sweep: Optional[SweepSection] = None

    @model_validator(mode="after")
    def _check(self):
        if self.initial.kind == "gaussian" and self.initial.sigma is None:
            raise ValueError("gaussian initial state needs sigma")
        return self

    def with_override(self, dotted: str, value) -> "ScenarioConfig":
        data = self.model_dump()
        node = data
        *path, leaf = dotted.split(".")
        for key in path:
            node = node[key]
        node[leaf] = value
        return ScenarioConfig.model_validate(data)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a TOML scenario file (strict: unknown keys fail)."""
    raw = Path(path).read_bytes()
    data = tomllib.loads(raw.decode("utf-8"))
    return ScenarioConfig.model_validate(data)


# ------------------------------------------------------------------ running

def compute_predictions(cfg: ScenarioConfig) -> dict:
    """All closed-form predictions applicable to the configured scenario."""
    spec = cfg.model.to_spec(cfg.seed)
    out: dict = {"schema_version": SCHEMA_VERSION}
    if spec.variant == HATANO_NELSON:
        v = analytics.velocities(spec)
        out["velocities"] = {"v_h": v.v_h, "v_nh": v.v_nh}
        x0 = cfg.initial.n0 * spec.a
        try:
            ts = analytics.edge_timestamps(spec, x0)
            out["edge_timestamps"] = ts
        except ChainwaveError:
            pass
        packet = cfg.initial.packet(spec)
        if packet is not None:
            cp = analytics.continuum_params(spec)
            out["continuum"] = {"mass": cp.mass, "drift": cp.drift, "e0": cp.e0}
            pk = analytics.peak_expansion(packet, spec, 3)
            out["peak_expansion"] = {"a": pk[0], "b": pk[1], "c": pk[2]}
            if packet.k0 != 0:
                d = cfg.analysis.wall_distance
                if d is None:
                    d = (spec.n - packet.n0) * spec.a  # distance to the far wall
                try:
                    ref = analytics.reflection_prediction(packet, spec, d)
                    out["reflection"] = {
                        "t_hit_continuum": ref.t_hit_continuum,
                        "t_hit_lattice": ref.t_hit_lattice,
                        "t_delta": ref.t_delta,
                        "t_transition_cubic": ref.t_transition_cubic,
                        "wall_distance": ref.wall_distance,
                    }
                except ChainwaveError:
                    pass
            if not spec.is_clean:
                try:
                    dis = analytics.disorder_prediction(spec, packet, cfg.analysis.k_target)
                    out["disorder"] = {
                        "v_s": dis.v_s,
                        "v_s_main_text": dis.v_s_main_text,
                        "t_s": dis.t_s,
                        "growth_rate": dis.growth_rate,
                        "t_transition": dis.t_transition if math.isfinite(dis.t_transition) else None,
                    }
                    out["localization_length_band_center"] = analytics.localization_length(spec, 0.0)
                except ChainwaveError:
                    pass
    else:
        vh = analytics.ssh_hermitian_velocity(spec)
        out["ssh"] = {"v_h": vh, "edge_period": analytics.ssh_edge_period(spec)}
    return out


def _detect_events(cfg: ScenarioConfig, spec: ModelSpec, traj: Trajectory) -> list[wavefront.FrontEvent]:
    if not cfg.analysis.detect_events:
        return []
    if spec.variant == HATANO_NELSON:
        ceiling = abs(analytics.velocities(spec).v_nh) / spec.a
    else:
        ceiling = analytics.ssh_hermitian_velocity(spec) / spec.a * 2.0
    trace = wavefront.peak_trace(traj)
    return wavefront.detect_transition(trace, cfg.analysis.min_jump_sites, ceiling)


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path | None = None, jobs: int = 1) -> dict:
    """Execute a scenario (or its sweep) and write output files.

    Returns a summary dict with file paths, predictions, and events.
    """
    if cfg.sweep is not None:
        return _run_sweep(cfg, out_dir, jobs)
    return _run_single(cfg, out_dir)


def _run_sweep(cfg: ScenarioConfig, out_dir, jobs: int) -> dict:
    base = Path(out_dir if out_dir is not None else cfg.output.directory)
    members = []
    for value in cfg.sweep.values:
        sub = cfg.with_override(cfg.sweep.parameter, value)
        sub = sub.model_copy(update={"sweep": None})
        members.append((sub, base / f"{cfg.sweep.parameter.replace('.', '_')}_{value:g}"))
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_single, sub, path) for sub, path in members]
            results = [f.result() for f in futures]
    else:
        results = [_run_single(sub, path) for sub, path in members]
    return {
        "sweep": cfg.sweep.parameter,
        "values": list(cfg.sweep.values),
        "members": results,
    }


def _run_single(cfg: ScenarioConfig, out_dir) -> dict:
    t_wall = time.perf_counter()
    spec = cfg.model.to_spec(cfg.seed)
    bits = cfg.evolution.precision_bits
    psi0 = cfg.initial.to_state(spec, bits)
    times = cfg.evolution.expand_times()
    evo = cfg.evolution.to_config()
    if not evo.allow_low_precision:
        from .evolution import check_precision

        check_precision(spec, psi0, float(times[-1]), evo)
    if evo.backend == SPECTRAL_TRANSFORM and spec.is_clean and spec.boundary == "obc":
        traj = evolve_via_transform(spec, psi0, times, evo)
    else:
        h = build_hamiltonian(spec, bits)
        traj = evolve(h, psi0, times, evo)
    events = _detect_events(cfg, spec, traj)
    predictions = compute_predictions(cfg)

    base = Path(out_dir if out_dir is not None else cfg.output.directory)
    base.mkdir(parents=True, exist_ok=True)
    files = {}
    if "csv" in cfg.output.formats:
        files["trajectory"] = str(_write_trajectory_csv(base / "trajectory.csv", traj, cfg))
        if cfg.output.include_hermitian_frame and spec.variant == HATANO_NELSON:
            files["trajectory_hermitian"] = str(
                _write_hermitian_csv(base / "trajectory_hermitian.csv", traj, spec)
            )
        if cfg.analysis.edge_site is not None:
            files["edge_series"] = str(
                _write_edge_csv(base / "edge_series.csv", traj, cfg.analysis.edge_site)
            )
        if cfg.analysis.front_threshold_log10 is not None:
            files["fronts"] = str(
                _write_fronts_csv(
                    base / "fronts.csv", traj, cfg.analysis.front_threshold_log10
                )
            )
    if "json" in cfg.output.formats:
        files["analytics"] = str(_write_json(base / "analytics.json", predictions))
        files["events"] = str(
            _write_json(
                base / "events.json",
                {
                    "schema_version": SCHEMA_VERSION,
                    "events": [
                        {"time": e.time, "site": e.site, "kind": e.kind, "confidence": e.confidence}
                        for e in events
                    ],
                },
            )
        )
    runtime = time.perf_counter() - t_wall
    meta = {
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "config": cfg.model_dump(mode="json"),
        "seed": cfg.seed,
        "volatile": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "runtime_seconds": runtime,
        },
    }
    files["metadata"] = str(_write_json(base / "metadata.json", meta))
    return {
        "output_dir": str(base),
        "files": files,
        "predictions": predictions,
        "events": [
            {"time": e.time, "site": e.site, "kind": e.kind, "confidence": e.confidence}
            for e in events
        ],
        "runtime_seconds": runtime,
    }


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_trajectory_csv(path: Path, traj: Trajectory, cfg: ScenarioConfig) -> Path:
    norm = cfg.output.normalization
    mx = traj.snapshot_max_log10()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site", "log10_abs2", "re_phase", "im_phase_or_blank", "normalized_abs2"])
        for i, t in enumerate(traj.times):
            row_logs = traj.log10_abs2[i]
            row_phases = traj.phases[i]
            shift = mx[i] if norm == "max" else 0.0
            for j in range(traj.n_sites):
                l10 = row_logs[j]
                ph = row_phases[j]
                if np.isfinite(l10):
                    re_p, im_p = _fmt(ph.real), _fmt(ph.imag)
                else:
                    re_p, im_p = "", ""
                with np.errstate(over="ignore"):
                    norm_val = 10.0 ** (l10 - shift) if np.isfinite(l10) else 0.0
                w.writerow([_fmt(t), j + 1, _fmt(l10) if np.isfinite(l10) else "-inf", re_p, im_p, _fmt(norm_val)])
    return path


def _write_hermitian_csv(path: Path, traj: Trajectory, spec: ModelSpec) -> Path:
    """Transformed view: log10 |S^-1 psi|^2 per site (the Hermitian frame)."""
    from .transform import make_transform

    s = make_transform(spec, 53)
    shift = 2.0 * s.log_diag / np.log(10.0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site", "log10_abs2_hermitian_frame"])
        for i, t in enumerate(traj.times):
            row = traj.log10_abs2[i] - shift
            for j in range(traj.n_sites):
                val = row[j]
                w.writerow([_fmt(t), j + 1, _fmt(val) if np.isfinite(val) else "-inf"])
    return path


def _write_fronts_csv(path: Path, traj: Trajectory, threshold: float) -> Path:
    from . import wavefront as _wf

    front = _wf.front_position(traj, threshold)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site_left", "site_right"])
        for row in front:
            w.writerow([_fmt(row[0]), int(row[1]), int(row[2])])
    return path


def _write_edge_csv(path: Path, traj: Trajectory, site: int) -> Path:
    raw = edge_amplitude_log10(traj, site, "none")
    rel_max = edge_amplitude_log10(traj, site, "max")
    rel_l2 = edge_amplitude_log10(traj, site, "l2")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "log10_abs2", "log10_rel_max", "log10_rel_l2"])
        for i, t in enumerate(traj.times):
            w.writerow([
                _fmt(t),
                _fmt(raw[i]) if np.isfinite(raw[i]) else "-inf",
                _fmt(rel_max[i]) if np.isfinite(rel_max[i]) else "-inf",
                _fmt(rel_l2[i]) if np.isfinite(rel_l2[i]) else "-inf",
            ])
    return path


def _write_json(path: Path, payload: dict) -> Path:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
