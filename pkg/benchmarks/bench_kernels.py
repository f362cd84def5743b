"""Wall-clock comparison of the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from damped_rotor import _backend
from damped_rotor.integrator import IntegratorConfig, integrate, rk4_reference
from damped_rotor.presets import PRESETS, preset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rk4-steps", type=int, default=100_000)
    args = ap.parse_args()

    backends = _backend.available()
    print(f"backends: {', '.join(backends)}")
    cfg = IntegratorConfig(t_end=200.0)
    cases = [(f"integrate {name}", name) for name in PRESETS]
    rows = []
    for label, name in cases:
        params, s0 = preset(name)
        timing = {}
        finals = {}
        for b in backends:
            dt, rec = best_of(lambda: integrate(params, s0, cfg, backend=b), args.repeat)
            timing[b], finals[b] = dt, rec.y[-1]
        rows.append((label, timing, finals))

    params, s0 = preset("fig-stable")
    h = 10.0 / args.rk4_steps
    timing, finals = {}, {}
    for b in backends:
        dt, st = best_of(lambda: rk4_reference(params, s0, 10.0, h, backend=b), args.repeat)
        timing[b], finals[b] = dt, st.vector
    rows.append((f"rk4 {args.rk4_steps} steps", timing, finals))

    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup  max|diff|")
    for label, timing, finals in rows:
        line = f"{label:28s}" + "".join(f"{timing[b]:12.4f}" for b in backends)
        if len(backends) == 2:
            a, b = backends
            diff = float(np.max(np.abs(finals[a] - finals[b])))
            line += f"{timing['python'] / timing['cython']:12.1f}  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
