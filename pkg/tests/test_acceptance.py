"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
gathered into the pytest terminal summary. Run directly for just the lines:

    python tests/test_acceptance.py
"""
import json
import math
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from damped_rotor import (
    AxisLabel,
    BodyParams,
    Equilibrium,
    IntegratorConfig,
    State,
    StopReason,
    Verdict,
    analyze,
    classify,
    cli,
    integrate,
    rk4_reference,
)
from damped_rotor.presets import PRESETS, preset
from damped_rotor.spectral import expected_verdict, imaginary_axis_check, representative_equilibria
from damped_rotor.sweep import parse_sweep_config, run_sweep

RESULTS: list[str] = []

P337 = BodyParams(3, 3, 7, 1, 1)
P237 = BodyParams(2, 3, 7, 1, 1)
Z1 = State([1.5, 3, 0], [-1, -2, 0])
Z2 = State([1.5, 3, 0], [-1, -2.01, 0])


def verdict(number: int, title: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


_SWEEP_CACHE = {}


def global_sweep():
    if "rows" not in _SWEEP_CACHE:
        cfg = parse_sweep_config({"params": P237.to_dict(), "count": 100, "box": [-3, 3],
                                  "seed": 0, "integrator": {"t_end": 1000}})
        _SWEEP_CACHE["rows"] = run_sweep(cfg)
    return _SWEEP_CACHE["rows"]


def criterion_1():
    with tempfile.TemporaryDirectory() as tmp:
        start = time.perf_counter()
        rc = cli.main(["reproduce", "--out", tmp])
        elapsed = time.perf_counter() - start
        reports = {n: json.loads((Path(tmp) / n / "report.json").read_text()) for n in PRESETS}
    axes = {n: r["attained_axis"] for n, r in reports.items()}
    att = reports["fig-attain"]["attainability"]
    ok = (rc == 0 and axes == {"fig-stable": "Plane12", "fig-unstable": "Axis3", "fig-attain": "Axis3"}
          and att["satisfied"] is False and att["condition_values"] == [-6.0] and elapsed < 10.0)
    return verdict(1, "figure reproduction", ok,
                   f"axes {axes}, fig-attain margin {att['condition_values']}, {elapsed:.2f} s (< 10 s)")


def criterion_2():
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10, t_end=200.0, conv_window=1e6)
    drift = rise = 0.0
    spans = []
    for name in PRESETS:
        rec = integrate(*preset(name), cfg)
        drift = max(drift, rec.ksq_max_rel_drift)
        rise = max(rise, rec.energy_increase())
        spans.append(rec.t[-1])
    ok = drift <= 1e-8 and rise <= 1e-10 and min(spans) == 200.0
    return verdict(2, "conservation on [0, 200]", ok,
                   f"max K^2 drift {drift:.2e} (<= 1e-8), max V rise {rise:.2e} V0 (<= 1e-10)")


def criterion_3():
    jc = P337.moments + P337.I
    w1 = analyze(integrate(P337, Z1)).omega_bar
    w2 = analyze(integrate(P337, Z2)).omega_bar
    m1 = float(np.sum(jc**2 * w1**2))
    m2 = (P337.A3 + P337.I) ** 2 * w2[2] ** 2
    e1, e2 = abs(m1 - 61.25) / 61.25, abs(m2 - 61.1101) / 61.1101
    ok = e1 <= 1e-6 and e2 <= 1e-6
    return verdict(3, "limit identities", ok,
                   f"z1 {m1:.10f} (rel err {e1:.1e}), z2 {m2:.10f} (rel err {e2:.1e}); tol 1e-6")


def criterion_4():
    start = time.perf_counter()
    rows = {}
    for eq in representative_equilibria(P237, 1.0):
        spectrum, cls = classify(P237, eq)
        rows[eq.axis_label] = (cls.verdict, spectrum.n_unstable, spectrum.n_stable, spectrum.zero_multiplicity)
    elapsed = time.perf_counter() - start
    ok = (rows[AxisLabel.AXIS3] == (Verdict.NORMALLY_STABLE, 0, 5, 1)
          and rows[AxisLabel.AXIS2][:2] == (Verdict.NORMALLY_HYPERBOLIC, 1)
          and rows[AxisLabel.AXIS1][:2] == (Verdict.NORMALLY_HYPERBOLIC, 2)
          and elapsed < 1.0)
    short = ", ".join(f"{k.value}={v[0].value}({v[1]} unstable)" for k, v in rows.items())
    return verdict(4, "classification table A=(2,3,7)", ok, f"{short}; {elapsed * 1e3:.1f} ms (< 1 s)")


def criterion_5():
    rng = np.random.Generator(np.random.Philox(2024))
    n, failures = 1000, 0
    start = time.perf_counter()
    for _ in range(n):
        A = np.sort(np.exp(rng.uniform(math.log(0.1), math.log(10.0), 3)))
        I, k = rng.uniform(0.1, 10.0, 2)
        params = BodyParams(*A, I, k)
        w = np.zeros(3)
        w[int(rng.integers(3))] = float(rng.uniform(0.1, 3.0))
        eq = Equilibrium.at(params, w)
        spectrum, cls = classify(params, eq)
        good = (spectrum.zero_multiplicity == cls.eigenspace_dim and cls.semisimple_zero
                and imaginary_axis_check(spectrum)
                and (cls.verdict, cls.n_unstable) == expected_verdict(params, eq.lambda_star))
        failures += not good
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 30.0
    return verdict(5, "structural properties", ok, f"{failures}/{n} failures, {elapsed:.2f} s (< 30 s)")


def criterion_6():
    rows = global_sweep()
    conv = sum(r.get("stop_reason") == "Converged" and bool(r.get("attained_axis")) for r in rows)
    axes = sorted({r.get("attained_axis") for r in rows}, key=str)
    ok = conv == 100 and len(rows) == 100
    return verdict(6, "global convergence sweep", ok,
                   f"{conv}/100 Converged with unambiguous axis (axes seen: {axes})")


def criterion_7():
    rep = analyze(integrate(P337, Z2))
    rel = abs(rep.fitted_rate - rep.predicted_rate) / rep.predicted_rate
    ok = rel <= 0.2 and rep.fit_goodness >= 0.99
    return verdict(7, "rate consistency z2", ok,
                   f"fitted {rep.fitted_rate:.6f} vs predicted {rep.predicted_rate:.6f} "
                   f"(rel {rel:.1e} <= 0.2), goodness {rep.fit_goodness:.6f} (>= 0.99)")


def criterion_8():
    rec = integrate(P337, Z1, IntegratorConfig(t_end=10.0, conv_window=1e6))
    ref = rk4_reference(P337, Z1, 10.0, 1e-6)
    err = float(np.max(np.abs(rec.y[-1] - ref.vector)))
    ok = rec.t[-1] == 10.0 and err <= 1e-8
    return verdict(8, "Dormand-Prince vs RK4 h=1e-6 at t=10", ok, f"max component error {err:.2e} (<= 1e-8)")


def criterion_9():
    rows = global_sweep()
    sat = [r for r in rows if r.get("case") == "b" and r.get("attain_satisfied")]
    bad = [r for r in sat if r.get("attained_axis") != "Axis3"
           or max(abs(r["pbar"]), abs(r["qbar"])) > 1e-6]
    worst = max((max(abs(r["pbar"]), abs(r["qbar"])) for r in sat), default=0.0)
    ok = not bad and len(sat) > 0
    return verdict(9, "attainability soundness (case b)", ok,
                   f"{len(sat)} satisfied draws, {len(bad)} violations, max |pbar|,|qbar| {worst:.1e} (<= 1e-6)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    import contextlib
    import io
    import sys

    results = []
    for c in CRITERIA:
        with contextlib.redirect_stdout(io.StringIO()):
            results.append(c())
        print(RESULTS[-1])
    sys.exit(0 if all(results) else 1)
