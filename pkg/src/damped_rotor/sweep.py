"""Seeded batches of trajectories from a box of initial conditions.

Draws come from numpy's Philox counter-based generator, so a given seed
yields the same initial states on every platform. All draws are made up
front; workers only integrate, and rows are written in draw order.
"""
from __future__ import annotations

import collections
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import analyze
from .config import ConfigError, _vector, parse_integrator, parse_params
from .dynamics import BodyParams, State
from .integrator import IntegratorConfig, integrate

SWEEP_COLUMNS = (
    "index", "seed", "p0", "q0", "r0", "p10", "q10", "r10",
    "stop_reason", "attained_axis", "t_star", "fitted_rate", "fit_goodness",
    "predicted_rate", "pbar", "qbar", "rbar", "case", "margin1", "margin2",
    "attain_satisfied", "error",
)


@dataclass(frozen=True)
class SweepConfig:
    params: BodyParams
    count: int
    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    seed: int = 0
    integrator: IntegratorConfig = IntegratorConfig()
    outputs: str | None = None


def parse_sweep_config(data: dict, *, A=None, I=None, k=None, t_end=None, seed=None,
                       out=None, count=None) -> SweepConfig:
    known = {"params", "count", "box", "center", "seed", "integrator", "outputs"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown sweep field(s): {', '.join(sorted(unknown))}")
    params = parse_params(data.get("params"), A, I, k)
    n = count if count is not None else data.get("count")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"count: expected an integer >= 1, got {n!r}")
    box = data.get("box", [-1.0, 1.0])
    if isinstance(box, dict):
        lo = _vector(box.get("lo"), "box.lo", 6)
        hi = _vector(box.get("hi"), "box.hi", 6)
    else:
        lo_hi = _vector(box, "box", 2)
        lo, hi = [lo_hi[0]] * 6, [lo_hi[1]] * 6
    lo, hi = np.array(lo), np.array(hi)
    if np.any(hi < lo):
        raise ConfigError("box: every upper bound must be >= its lower bound")
    center = np.array(_vector(data.get("center", [0.0] * 6), "center", 6))
    s = seed if seed is not None else data.get("seed", 0)
    if isinstance(s, bool) or not isinstance(s, int) or s < 0:
        raise ConfigError(f"seed: expected a non-negative integer, got {s!r}")
    return SweepConfig(
        params=params, count=n, lo=lo, hi=hi, center=center, seed=s,
        integrator=parse_integrator(data.get("integrator"), t_end=t_end),
        outputs=out if out is not None else data.get("outputs"),
    )


def draw_initial_states(cfg: SweepConfig) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    return cfg.center + rng.uniform(cfg.lo, cfg.hi, size=(cfg.count, 6))


def run_one(params_tuple, y0, integ_dict) -> dict:
    """Integrate and analyse one draw; failures land in ``error``."""
    row = {"p0": y0[0], "q0": y0[1], "r0": y0[2], "p10": y0[3], "q10": y0[4], "r10": y0[5]}
    try:
        params = BodyParams(*params_tuple)
        rec = integrate(params, State.from_vector(y0), IntegratorConfig(**integ_dict))
        rep = analyze(rec)
    except Exception as exc:  # recorded, never fatal to the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    margins = rep.attainability.condition_values
    row.update(
        stop_reason=rep.stop_reason.value,
        attained_axis=None if rep.attained_axis is None else rep.attained_axis.value,
        t_star=rep.t_star,
        fitted_rate=rep.fitted_rate,
        fit_goodness=rep.fit_goodness,
        predicted_rate=rep.predicted_rate,
        pbar=rep.omega_bar[0], qbar=rep.omega_bar[1], rbar=rep.omega_bar[2],
        case=rep.attainability.case.value,
        margin1=margins[0] if len(margins) > 0 else None,
        margin2=margins[1] if len(margins) > 1 else None,
        attain_satisfied=rep.attainability.satisfied,
    )
    if rep.notes:
        row["error"] = "; ".join(rep.notes)
    return row


def _run_star(args):
    return run_one(*args)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    ys = draw_initial_states(cfg)
    tasks = [(cfg.params.as_tuple(), y.tolist(), cfg.integrator.to_dict()) for y in ys]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_star, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_run_star(t) for t in tasks]
    for i, row in enumerate(rows):
        row["index"] = i
        row["seed"] = cfg.seed
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    text = str(v)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def summary_line(rows: list[dict]) -> str:
    axes = collections.Counter(r.get("attained_axis") or "none" for r in rows)
    converged = sum(r.get("stop_reason") == "Converged" for r in rows)
    parts = [f"count={len(rows)}", f"converged={converged}"]
    parts += [f"{name}={axes[name]}" for name in sorted(axes)]
    return "# " + " ".join(parts)


def sweep_csv(rows: list[dict]) -> str:
    """Rows in draw order followed by one ``#`` aggregate line."""
    buf = io.StringIO()
    buf.write(",".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_cell(row.get(c)) for c in SWEEP_COLUMNS) + "\n")
    buf.write(summary_line(rows) + "\n")
    return buf.getvalue()
