"""Command-line client.

The CLI is a thin wrapper over the service handlers: locally it builds the
same request objects the HTTP API accepts and calls the handlers in-process;
with ``--server URL`` the identical request is posted to a running service.

Exit codes: 0 success, 1 invalid configuration, 2 numeric failure (precision
insufficient; the message carries a suggested ``precision_bits``), 3 I/O
failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from .errors import ChainwaveError, PrecisionError
from .scenario import ScenarioConfig, load_config

EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


def _load_or_fail(config_path: str | None, preset: str | None) -> dict:
    """Build the request payload pieces (either a config or a preset name)."""
    if (config_path is None) == (preset is None):
        click.echo("error: provide exactly one of CONFIG path or --preset", err=True)
        sys.exit(EXIT_CONFIG)
    if preset is not None:
        return {"preset": preset}
    try:
        cfg = load_config(config_path)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except (ValidationError, ValueError) as exc:
        click.echo(f"invalid config {config_path}:\n{exc}", err=True)
        sys.exit(EXIT_CONFIG)
    return {"config": cfg}


def _apply_common(payload: dict, precision_bits, output_dir, seed) -> dict:
    if precision_bits is not None:
        payload["precision_bits"] = precision_bits
    if seed is not None:
        payload["seed"] = seed
    if output_dir is not None:
        payload["output_dir"] = str(output_dir)
    return payload


def _post(server: str, endpoint: str, payload: dict):
    import httpx

    body = dict(payload)
    if "config" in body and isinstance(body["config"], ScenarioConfig):
        body["config"] = body["config"].model_dump(mode="json")
    resp = httpx.post(f"{server.rstrip('/')}{endpoint}", json=body, timeout=None)
    if resp.status_code == 422:
        detail = resp.json().get("detail")
        if isinstance(detail, dict) and detail.get("error") == "precision_insufficient":
            click.echo(json.dumps(detail, indent=2), err=True)
            sys.exit(EXIT_NUMERIC)
        click.echo(f"invalid request: {detail}", err=True)
        sys.exit(EXIT_CONFIG)
    resp.raise_for_status()
    return resp.json()


@click.group()
def main():
    """Wave-packet dynamics on non-reciprocal 1D lattices."""


@main.command()
@click.argument("config", required=False, type=click.Path(dir_okay=False))
@click.option("--preset", help="run a named preset instead of a config file")
@click.option("--precision-bits", type=int, default=None, help="override mantissa width")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@click.option("--jobs", type=int, default=1, help="parallel workers for sweeps")
@click.option("--seed", type=int, default=None, help="override the scenario seed")
@click.option("--strict/--no-strict", default=True,
              help="reject unknown config keys (strict is the default and "
              "recommended; --no-strict is accepted for forward compatibility "
              "but parsing is always strict)")
@click.option("--server", default=None, help="POST to a running service instead")
def simulate(config, preset, precision_bits, output_dir, jobs, seed, strict, server):
    """Evolve a scenario and write trajectory/analytics/event files."""
    payload = _load_or_fail(config, preset)
    payload = _apply_common(payload, precision_bits, output_dir, seed)
    payload["jobs"] = jobs
    if server:
        out = _post(server, "/api/v1/simulate", payload)
        click.echo(json.dumps(out, indent=2))
        return
    from .service.handlers import handle_simulate
    from .service.schemas import SimulateRequest

    try:
        result = handle_simulate(SimulateRequest(**payload))
    except PrecisionError as exc:
        click.echo(
            f"numeric failure: {exc}\nsuggested precision_bits: {exc.suggested_bits}",
            err=True,
        )
        sys.exit(EXIT_NUMERIC)
    except (ValidationError, ValueError) as exc:
        click.echo(f"invalid configuration: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ChainwaveError as exc:
        click.echo(f"invalid configuration: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"i/o failure: {exc}", err=True)
        sys.exit(EXIT_IO)
    out = result if isinstance(result, dict) else result.model_dump(mode="json")
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.argument("config", required=False, type=click.Path(dir_okay=False))
@click.option("--preset", help="predict for a named preset")
@click.option("--precision-bits", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--server", default=None)
def predict(config, preset, precision_bits, seed, server):
    """Closed-form predictions only (no evolution)."""
    payload = _load_or_fail(config, preset)
    payload = _apply_common(payload, precision_bits, None, seed)
    if server:
        out = _post(server, "/api/v1/predict", payload)
        click.echo(json.dumps(out, indent=2))
        return
    from .service.handlers import handle_predict
    from .service.schemas import PredictRequest

    try:
        result = handle_predict(PredictRequest(**payload))
    except (ValidationError, ValueError, ChainwaveError) as exc:
        click.echo(f"invalid configuration: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(json.dumps(result.analytics, indent=2))


@main.command()
@click.option("--server", default=None)
def presets(server):
    """List available presets."""
    if server:
        import httpx

        rows = httpx.get(f"{server.rstrip('/')}/api/v1/presets", timeout=30).json()
        for row in rows:
            click.echo(f"{row['name']:24s} {row['description']}")
        return
    from .service.handlers import handle_presets

    for info in handle_presets():
        click.echo(f"{info.name:24s} {info.description}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
