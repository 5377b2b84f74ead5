"""Command line entry point: ``qubo3sat {gen,convert,solve,retrieve,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .cnf import CnfError, generate_random_3sat, parse_dimacs, write_dimacs
from .reduction import (
    build_ising,
    build_qubo,
    export_ising,
    export_qubo,
    gadget_convert,
    parse_max2sat,
    write_max2sat,
)
from .retrieval import retrieve
from .solvers import PRESETS, SolverParams, solve


class CliError(Exception):
    """Input or result problem; reported on stderr with exit code 1."""


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _read_cnf(path: str):
    try:
        return parse_dimacs(Path(path).read_text(), strict=True)
    except (OSError, CnfError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def cmd_gen(args) -> int:
    f = generate_random_3sat(args.n, args.m, args.seed)
    _emit(write_dimacs(f), args.output)
    return 0


def cmd_convert(args) -> int:
    g = gadget_convert(_read_cnf(args.file))
    if args.to == "max2sat":
        text = write_max2sat(g)
    elif args.to == "qubo":
        text = export_qubo(build_qubo(g))
    else:
        text = export_ising(build_ising(g))
    _emit(text, args.output)
    return 0


def _solver_params(args) -> SolverParams:
    data = {}
    if args.preset:
        data["preset"] = args.preset
    if args.params:
        data.update(json.loads(Path(args.params).read_text()))
    if args.method:
        data["method"] = args.method
    elif "preset" not in data and "method" not in data:
        data["method"] = "ga_ls"
    if args.budget is not None:
        data["iteration_budget"] = args.budget
    data["seed"] = args.seed
    return SolverParams.from_dict(data)


def cmd_solve(args) -> int:
    g = gadget_convert(_read_cnf(args.file))
    params = _solver_params(args)
    model = build_ising(g) if params.method == "bsb" else build_qubo(g)
    report = solve(model, params)
    if args.format == "table":
        r = report
        lines = [
            f"method             {r.method}",
            f"seed               {r.seed}",
            f"objective          {r.objective:g}",
            f"max2sat_violated   {r.max2sat_violated}",
            f"original_violated  {r.original_violated}",
            f"original_satisfied {r.retrieval.oracle[1]}",
            f"retrieval_exact    {r.retrieval.retrieved.exact if r.retrieval.retrieved else None}",
            f"consistent         {r.retrieval.consistent}",
            f"iterations_used    {r.iterations_used}",
        ]
        if not args.no_timing:
            lines.append(f"wall_time_ms       {r.wall_time_ms:.1f}")
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(report.to_json(timing=not args.no_timing) + "\n", args.output)
    return 0


def _read_assignment(text: str, n: int) -> np.ndarray:
    """Accept a 0/1 string, ``n`` whitespace-separated bits, or signed literals."""
    tokens = [t for t in text.split() if t != "v"]
    if len(tokens) == 1 and len(tokens[0]) == n and set(tokens[0]) <= {"0", "1"}:
        return np.array([int(ch) for ch in tokens[0]], dtype=np.uint8)
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise CliError(f"bad assignment token: {exc}") from None
    if len(values) == n and all(v in (0, 1) for v in values):
        return np.array(values, dtype=np.uint8)
    literals = [v for v in values if v != 0]
    if sorted(abs(v) for v in literals) != list(range(1, n + 1)):
        raise CliError(f"assignment must give each of the {n} variables exactly once")
    bits = np.zeros(n, dtype=np.uint8)
    for v in literals:
        bits[abs(v) - 1] = v > 0
    return bits


def cmd_retrieve(args) -> int:
    try:
        g = parse_max2sat(Path(args.m2s).read_text())
    except (OSError, CnfError) as exc:
        raise CliError(f"{args.m2s}: {exc}") from exc
    x = _read_assignment(Path(args.assignment).read_text(), g.num_vars)
    report = retrieve(g, x)
    _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", args.output)
    return 0 if report.retrieved is not None else 1


def _print_summary(summary) -> None:
    print(f"{'set':<16}{'solver':<14}{'min':>7}{'q1':>7}{'median':>8}{'q3':>7}{'max':>7}")
    for s, per in summary.items():
        for solver, st in per.items():
            print(f"{s:<16}{solver:<14}{st.min:>7g}{st.q1:>7g}{st.median:>8g}{st.q3:>7g}{st.max:>7g}")


def cmd_bench(args) -> int:
    spec = bench.ExperimentSpec.load(args.spec)
    if args.workers is not None:
        spec.workers = args.workers
    if spec.generator is not None:
        result = bench.density_sweep(spec)
        rows = result.rows
        if args.csv:
            sys.stdout.write(bench.rows_to_csv(result.aggregate, bench.SWEEP_COLUMNS))
    else:
        rows = bench.run_experiment(spec)
        if args.csv:
            sys.stdout.write(bench.rows_to_csv(rows))
    if not rows:
        return 0
    summary = bench.summarize(rows)
    if args.json:
        sys.stdout.write(bench.summary_to_json(summary))
    elif not args.csv:
        _print_summary(summary)
    if spec.reference_csv:
        comparison = bench.compare_with_reference(rows, bench.read_reference_csv(
            Path(spec.reference_csv).read_text()))
        for inst in comparison.missing_in_reference:
            print(f"warning: {inst} has no reference result", file=sys.stderr)
        for inst in comparison.missing_in_results:
            print(f"warning: reference instance {inst} was not run", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubo3sat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a uniform random 3-SAT instance")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert", help="gadget-convert a 3-SAT instance")
    p.add_argument("file")
    p.add_argument("--to", choices=("max2sat", "qubo", "ising"), required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("solve", help="solve a 3-SAT instance through its gadget model")
    p.add_argument("file")
    p.add_argument("--method", choices=("sa", "tabu", "ga_ls", "bsb"))
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--params", help="JSON file with solver parameters")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("retrieve", help="recover original clause counts from an assignment")
    p.add_argument("--m2s", required=True, help="converted formula from 'convert --to max2sat'")
    p.add_argument("--assignment", required=True, help="file with N' bits or signed literals")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("bench", help="run an experiment spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--workers", type=int)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="print the summary JSON")
    out.add_argument("--csv", action="store_true", help="print result rows as CSV")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, CnfError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
