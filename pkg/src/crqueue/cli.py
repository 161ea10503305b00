"""Command-line entry point: ``crqueue {analytic,ctmc,simulate,sweep,validate}``.

Exit status is 0 on success, 1 when ``validate`` fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import ctmc, desim
from .experiments import (Scenario, ScenarioError, build_point, cross_validate, parse_scenario,
                          run_scenario, sim_config, write_csv)

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT = 0, 1, 2


def _apply_overrides(text: str, pairs) -> str:
    """Drop file entries for keys given with ``--set`` and append the overrides.

    Line numbers of the remaining file entries are preserved for error messages.
    """
    keys = {p.partition("=")[0].strip() for p in pairs}
    out = []
    for line in text.splitlines():
        body, hash_, comment = line.partition("#")
        parts = [x for x in body.split(";") if x.partition("=")[0].strip() not in keys]
        out.append(";".join(parts) + hash_ + comment)
    return "\n".join(out + list(pairs))


def _load(args) -> Scenario:
    text = ""
    if getattr(args, "scenario", None):
        text = Path(args.scenario).read_text(encoding="utf-8")
    s = parse_scenario(_apply_overrides(text, args.set or []))
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "events", None) is not None:
        changes["events"] = args.events
    if getattr(args, "reps", None) is not None:
        changes["reps"] = args.reps
    return s.with_(**changes) if changes else s


def _emit(rows, out) -> None:
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)


def _single_engine(engine):
    def run(args) -> int:
        s = _load(args)
        s = s.with_(engines=(engine,))
        rows = run_scenario(s, jobs=args.jobs)
        _emit(rows, args.out)
        if engine == "ctmc" and args.dump:
            _, pt_vals = s.points()[0]
            _, dist = ctmc.solve_auto(build_point(s, pt_vals).params)
            ctmc.dump_csv(dist, args.dump)
        if engine == "sim" and args.trace:
            _, pt_vals = s.points()[0]
            res = desim.run_sim(sim_config(s, build_point(s, pt_vals), 0, trace=True))
            path = Path(args.out).with_suffix(".trace.csv") if args.out else Path("trace.csv")
            with open(path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["time", "kind", "packet_id", "n1", "n2", "server_class", "waiting1"])
                for rec in res.trace:
                    w.writerow([f"{rec[0]:.12g}", *rec[1:]])
            print(f"trace written to {path}", file=sys.stderr)
        return EXIT_OK
    return run


def _sweep(args) -> int:
    _emit(run_scenario(_load(args), jobs=args.jobs), args.out)
    return EXIT_OK


def _validate(args) -> int:
    s = _load(args)
    rows = run_scenario(s, jobs=args.jobs)
    rep = cross_validate(s, exact_tol=args.tol, min_coverage=args.min_coverage, rows=rows)
    if args.out:
        _emit(rows, args.out)
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crqueue", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=False):
        if scenario_required:
            p.add_argument("scenario", help="scenario file")
        else:
            p.add_argument("scenario", nargs="?", help="scenario file (optional)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="extra scenario line, e.g. --set lambda1=5")
        p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--events", type=int, help="events per simulation run")
        p.add_argument("--reps", type=int, help="simulation replications per point")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for simulation")

    p = sub.add_parser("analytic", help="closed-form metrics")
    common(p)
    p.set_defaults(func=_single_engine("analytic"))
    p = sub.add_parser("ctmc", help="truncated Markov chain oracle")
    common(p)
    p.add_argument("--dump", help="write the stationary law as (i, j, prob) CSV")
    p.set_defaults(func=_single_engine("ctmc"))
    p = sub.add_parser("simulate", help="discrete-event simulation")
    common(p)
    p.add_argument("--trace", action="store_true", help="dump the event trace of the first point")
    p.set_defaults(func=_single_engine("sim"))
    p = sub.add_parser("sweep", help="run every engine of a scenario over its sweep")
    common(p, scenario_required=True)
    p.set_defaults(func=_sweep)
    p = sub.add_parser("validate", help="cross-validate the engines of a scenario")
    common(p, scenario_required=True)
    p.add_argument("--tol", type=float, default=1e-8, help="analytic vs ctmc tolerance")
    p.add_argument("--min-coverage", type=float, default=0.9,
                   help="required fraction of sim CIs covering the exact value")
    p.set_defaults(func=_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: invalid scenario\n{exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
