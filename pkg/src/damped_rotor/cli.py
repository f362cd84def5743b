"""Command-line front end.

Value precedence, highest first: command-line flags, the JSON config file,
a preset, built-in defaults. The output directory falls back to
``$DAMPED_ROTOR_OUT`` and then to the current directory.

Exit codes: 0 converged or success, 2 horizon reached, 1 error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import presets
from .analysis import analyze
from .config import ConfigError, load_json, output_dir, parse_params, parse_run_config
from .eigen import EigenvalueConvergenceError
from .integrator import StopReason, integrate, write_csv
from .spectral import classification_record, classify, representative_equilibria
from .sweep import parse_sweep_config, run_sweep, summary_line, sweep_csv

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HORIZON = 2

CLASSIFY_COLUMNS = ("axis", "lambda_star", "verdict", "n_unstable", "n_stable",
                    "zero_multiplicity", "eigenspace_dim", "null_dim", "semisimple_zero",
                    "tangent_matches_null", "imaginary_axis_ok")

GNUPLOT_TEMPLATE = """\
set datafile separator ','
set key autotitle columnhead
set xlabel 't'
set multiplot layout 2,1
plot for [c=2:4] '{csv}' using 1:c with lines
plot for [c=5:7] '{csv}' using 1:c with lines
unset multiplot
"""


def _shared(parser: argparse.ArgumentParser, state: bool = True) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--A", nargs=3, type=float, metavar=("A1", "A2", "A3"))
    parser.add_argument("--I", type=float, help="damper moment of inertia")
    parser.add_argument("--k", type=float, help="viscous coupling constant")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    if state:
        parser.add_argument("--omega0", nargs=3, type=float, metavar=("X", "Y", "Z"))
        parser.add_argument("--omega10", nargs=3, type=float, metavar=("X", "Y", "Z"))
        parser.add_argument("--t-end", type=float, dest="t_end")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="damped-rotor",
                                     description="Rigid body with a spherical damper.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one trajectory")
    _shared(sim)
    sim.add_argument("--preset", choices=sorted(presets.PRESETS))
    sim.add_argument("--gnuplot", action="store_true", help="also write plot.gp")

    cls = sub.add_parser("classify", help="spectral classification of the equilibria")
    _shared(cls, state=False)
    cls.add_argument("--alpha", type=float, default=1.0, help="equilibrium amplitude")
    cls.add_argument("--json", action="store_true", help="print JSON objects instead of a table")

    sw = sub.add_parser("sweep", help="seeded batch of random initial conditions")
    _shared(sw, state=False)
    sw.add_argument("--t-end", type=float, dest="t_end")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--count", type=int)
    sw.add_argument("--jobs", type=int, default=1)

    rep = sub.add_parser("reproduce", help="run the three figure presets")
    rep.add_argument("--out", metavar="DIR")
    rep.add_argument("--t-end", type=float, dest="t_end")
    rep.add_argument("--gnuplot", action="store_true")
    return parser


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _simulate_to(cfg, out: Path, gnuplot: bool) -> tuple[StopReason, dict]:
    record = integrate(cfg.params, cfg.state, cfg.integrator)
    report = analyze(record).to_dict()
    report["integrator"] = cfg.integrator.to_dict()
    report["backend"] = record.backend
    report["n_accepted"] = record.n_accepted
    report["n_rejected"] = record.n_rejected
    with open(out / "trajectory.csv", "w", newline="\n") as fh:
        write_csv(record, fh)
    _dump_json(report, out / "report.json")
    if gnuplot:
        (out / "plot.gp").write_text(GNUPLOT_TEMPLATE.format(csv="trajectory.csv"))
    return record.stop_reason, report


def _exit_for(reason: StopReason) -> int:
    return {StopReason.CONVERGED: EXIT_OK, StopReason.HORIZON_REACHED: EXIT_HORIZON}.get(
        reason, EXIT_ERROR)


def _preset_data(name: str) -> dict:
    entry = presets.PRESETS[name]
    return {"params": entry["params"], "omega0": entry["omega0"], "omega10": entry["omega10"]}


def cmd_simulate(args) -> int:
    data = _preset_data(args.preset) if args.preset else {}
    if args.config:
        data.update(load_json(args.config))
    cfg = parse_run_config(data, A=args.A, I=args.I, k=args.k, omega0=args.omega0,
                           omega10=args.omega10, t_end=args.t_end, out=args.out)
    out = output_dir(cfg.outputs)
    reason, report = _simulate_to(cfg, out, args.gnuplot)
    print(f"{reason.value}: attained {report['attained_axis']}, t* = {report['t_star']}, "
          f"omega_bar = {report['omega_bar']}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'report.json'}")
    return _exit_for(reason)


def _format_table(records: list[dict]) -> str:
    head = ("axis", "lambda*", "verdict", "unstable", "zero mult", "semisimple", "tangent=null")
    lines = [head]
    for r in records:
        lam = "-" if r["lambda_star"] is None else f"{r['lambda_star']:g}"
        lines.append((r["axis"], lam, r["verdict"], str(r["n_unstable"]),
                      str(r["zero_multiplicity"]), str(r["semisimple_zero"]).lower(),
                      str(r["tangent_matches_null"]).lower()))
    widths = [max(len(row[i]) for row in lines) for i in range(len(head))]
    out = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in lines]
    for r in records:
        eigs = ", ".join(f"{r[f'eig{i}_re']:+.6g}{r[f'eig{i}_im']:+.6g}i" for i in range(6))
        out.append(f"{r['axis']}: {eigs}")
    return "\n".join(out)


def _classify_csv(records: list[dict]) -> str:
    eig_cols = [f"eig{i}_{part}" for i in range(6) for part in ("re", "im")]
    cols = ["A1", "A2", "A3", "I", "k", "omega_star"] + list(CLASSIFY_COLUMNS) + eig_cols
    lines = [",".join(cols)]
    for r in records:
        cells = []
        for c in cols:
            v = r[c]
            if c == "omega_star":
                cells.append(" ".join("%.17g" % x for x in v))
            elif v is None:
                cells.append("")
            elif isinstance(v, bool):
                cells.append(str(v).lower())
            elif isinstance(v, float):
                cells.append("%.17g" % v)
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_classify(args) -> int:
    data = load_json(args.config) if args.config else {}
    params = parse_params(data.get("params"), args.A, args.I, args.k)
    records = []
    for eq in representative_equilibria(params, args.alpha):
        try:
            spectrum, cls = classify(params, eq)
        except EigenvalueConvergenceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            with np.printoptions(precision=17, linewidth=200):
                print(np.asarray(exc.matrix), file=sys.stderr)
            return EXIT_ERROR
        records.append(classification_record(params, eq, spectrum, cls))
    out = output_dir(args.out if args.out is not None else data.get("outputs"))
    (out / "classification.csv").write_text(_classify_csv(records))
    if args.json:
        for r in records:
            print(json.dumps(r))
    else:
        print(_format_table(records))
    return EXIT_OK


def cmd_sweep(args) -> int:
    data = load_json(args.config) if args.config else {}
    cfg = parse_sweep_config(data, A=args.A, I=args.I, k=args.k, t_end=args.t_end,
                             seed=args.seed, out=args.out, count=args.count)
    if args.jobs < 1:
        raise ConfigError(f"jobs: expected an integer >= 1, got {args.jobs}")
    rows = run_sweep(cfg, jobs=args.jobs)
    out = output_dir(cfg.outputs)
    (out / "sweep.csv").write_text(sweep_csv(rows))
    print(summary_line(rows)[2:])
    print(f"wrote {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    base = output_dir(args.out)
    status = EXIT_OK
    start = time.perf_counter()
    for name, entry in presets.PRESETS.items():
        cfg = parse_run_config(_preset_data(name), t_end=args.t_end)
        target = base / name
        target.mkdir(parents=True, exist_ok=True)
        reason, report = _simulate_to(cfg, target, args.gnuplot)
        ok = reason is StopReason.CONVERGED and report["attained_axis"] == entry["expect_axis"]
        att = report["attainability"]
        print(f"{name:13s} {reason.value:14s} attained={report['attained_axis']!s:8s} "
              f"expected={entry['expect_axis']:8s} margins={att['condition_values']} "
              f"{'ok' if ok else 'MISMATCH'}")
        if not ok:
            status = _exit_for(reason) if reason is not StopReason.CONVERGED else EXIT_ERROR
    print(f"total {time.perf_counter() - start:.2f} s, outputs under {base}")
    return status


COMMANDS = {"simulate": cmd_simulate, "classify": cmd_classify, "sweep": cmd_sweep,
            "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
