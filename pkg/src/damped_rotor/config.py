"""JSON run configuration. Command-line flags override file values, which
override built-in defaults."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import BodyParams, ParameterError, State
from .integrator import IntegratorConfig

OUT_ENV = "DAMPED_ROTOR_OUT"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: BodyParams
    omega0: list[float]
    omega10: list[float]
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    outputs: str | None = None
    seed: int = 0

    @property
    def state(self) -> State:
        return State(self.omega0, self.omega10)


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def _vector(value, name: str, n: int) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(f"{name}: expected a list of {n} numbers, got {value!r}")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name}: expected numbers, got {v!r}")
        out.append(float(v))
    return out


def parse_params(data: dict | None, A=None, I=None, k=None) -> BodyParams:
    data = dict(data or {})
    unknown = set(data) - {"A", "I", "k"}
    if unknown:
        raise ConfigError(f"params: unknown field(s) {', '.join(sorted(unknown))}")
    moments = A if A is not None else data.get("A")
    if moments is None:
        raise ConfigError("params.A: missing (give three principal moments)")
    moments = _vector(list(moments), "params.A", 3)
    inertia = I if I is not None else data.get("I", 1.0)
    coupling = k if k is not None else data.get("k", 1.0)
    try:
        return BodyParams.from_moments(moments, inertia, coupling)
    except ParameterError as exc:
        raise ConfigError(f"params: {exc}") from None


def parse_integrator(data: dict | None, **overrides) -> IntegratorConfig:
    try:
        cfg = IntegratorConfig.from_dict(data)
        return cfg.updated(**overrides)
    except (ParameterError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def parse_run_config(data: dict, *, A=None, I=None, k=None, omega0=None, omega10=None,
                     t_end=None, out=None, seed=None) -> RunConfig:
    known = {"params", "omega0", "omega10", "integrator", "outputs", "seed"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    params = parse_params(data.get("params"), A, I, k)
    w0 = omega0 if omega0 is not None else data.get("omega0")
    w10 = omega10 if omega10 is not None else data.get("omega10")
    if w0 is None:
        raise ConfigError("omega0: missing")
    if w10 is None:
        raise ConfigError("omega10: missing")
    integ = parse_integrator(data.get("integrator"), t_end=t_end)
    seed_value = seed if seed is not None else data.get("seed", 0)
    if isinstance(seed_value, bool) or not isinstance(seed_value, int) or seed_value < 0:
        raise ConfigError(f"seed: expected a non-negative integer, got {seed_value!r}")
    outputs = out if out is not None else data.get("outputs")
    return RunConfig(
        params=params,
        omega0=_vector(list(w0), "omega0", 3),
        omega10=_vector(list(w10), "omega10", 3),
        integrator=integ,
        outputs=outputs,
        seed=seed_value,
    )


def output_dir(explicit: str | None) -> Path:
    path = Path(explicit or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path
