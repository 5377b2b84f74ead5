"""Benchmark runner: instance sets, density sweeps, trials and summary tables.

Results CSV header (exact)::

    instance,n_vars,n_clauses,density,solver,trial,seed,max2sat_violated,original_violated,objective,iterations,wall_ms

Instance ids are ``<set>/<name>``; the summary groups by the ``<set>`` part.
The summary JSON is ``{set: {solver: {min, max, q1, q3, median}}}`` over the
per-instance best (minimum over trials) of ``original_violated``.
Reference results from an external solver are read from ``instance,violated``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import zlib
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cnf import CnfError, CnfFormula, generate_random_3sat, parse_dimacs
from .reduction import NotStrict3Sat, build_ising, build_qubo, gadget_convert
from .solvers import SolverParams, solve

log = logging.getLogger(__name__)

RESULT_COLUMNS = (
    "instance", "n_vars", "n_clauses", "density", "solver", "trial", "seed",
    "max2sat_violated", "original_violated", "objective", "iterations", "wall_ms",
)
REFERENCE_COLUMNS = ("instance", "violated")


class ParseFailure(CnfError):
    pass


class EmptyInput(ValueError):
    pass


class EmptyGroup(ValueError):
    pass


def percentile_linear(values: Sequence[float], p: float) -> float:
    """Percentile with linear interpolation between closest ranks."""
    if len(values) == 0:
        raise EmptyInput("percentile of an empty sequence")
    if not 0 <= p <= 100:
        raise ValueError(f"percent must lie in [0, 100], got {p}")
    v = sorted(float(x) for x in values)
    r = p / 100 * (len(v) - 1)
    lo, hi = math.floor(r), math.ceil(r)
    return v[lo] + (r - lo) * (v[hi] - v[lo])


@dataclass(frozen=True)
class SummaryStats:
    min: float
    max: float
    q1: float
    q3: float
    median: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "SummaryStats":
        if len(values) == 0:
            raise EmptyGroup("no values to summarize")
        return cls(
            min=float(min(values)),
            max=float(max(values)),
            q1=percentile_linear(values, 25),
            q3=percentile_linear(values, 75),
            median=percentile_linear(values, 50),
        )


@dataclass(frozen=True)
class GeneratorSpec:
    """Random 3-SAT source. Give either ``densities`` or ``clause_counts``."""
    n: int
    densities: tuple[float, ...] = ()
    clause_counts: tuple[int, ...] = ()
    instances_per_point: int = 10
    seed: int = 0

    def __post_init__(self):
        grid = self.clause_counts or self.densities
        if self.densities and self.clause_counts:
            raise ValueError("give densities or clause_counts, not both")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("density grid must be strictly increasing")
        if self.instances_per_point < 1:
            raise ValueError("instances_per_point must be >= 1")

    def points(self) -> list[tuple[float, int]]:
        """``(density, clause_count)`` per grid point."""
        if self.clause_counts:
            return [(m / self.n, int(m)) for m in self.clause_counts]
        return [(float(rho), int(round(rho * self.n))) for rho in self.densities]


@dataclass
class ExperimentSpec:
    solvers: list[tuple[str, SolverParams]]
    sets: dict[str, str] = field(default_factory=dict)
    generator: Optional[GeneratorSpec] = None
    trials_per_instance: int = 3
    sample: Optional[tuple[int, int]] = None
    workers: int = 1
    results_csv: Optional[str] = None
    summary_json: Optional[str] = None
    reference_csv: Optional[str] = None

    def __post_init__(self):
        if self.trials_per_instance < 1:
            raise ValueError("trials_per_instance must be >= 1")
        labels = [label for label, _ in self.solvers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"solver labels must be unique: {labels}")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Optional[Path] = None) -> "ExperimentSpec":
        data = dict(data)
        base = Path(base_dir) if base_dir else Path.cwd()

        def resolve(p):
            return None if p is None else str((base / p) if not Path(p).is_absolute() else p)

        solvers = []
        for entry in data.pop("solvers"):
            entry = dict(entry)
            label = entry.pop("label", None)
            params = SolverParams.from_dict(entry)
            solvers.append((label or params.method, params))
        gen = data.pop("generator", None)
        if gen is not None:
            gen = GeneratorSpec(
                n=gen["n"],
                densities=tuple(gen.get("densities", ())),
                clause_counts=tuple(gen.get("clause_counts", ())),
                instances_per_point=gen.get("instances_per_point", 10),
                seed=gen.get("seed", 0),
            )
        sets = {name: resolve(path) for name, path in data.pop("sets", {}).items()}
        sample = data.pop("sample", None)
        if sample is not None:
            sample = (int(sample["count"]), int(sample["seed"])) if isinstance(sample, dict) else tuple(sample)
        for key in ("results_csv", "summary_json", "reference_csv"):
            if key in data:
                data[key] = resolve(data[key])
        return cls(solvers=solvers, sets=sets, generator=gen, sample=sample, **data)

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)


@dataclass(frozen=True)
class Instance:
    id: str
    formula: CnfFormula

    @property
    def set_name(self) -> str:
        return set_of(self.id)


def set_of(instance_id: str) -> str:
    return instance_id.split("/", 1)[0] if "/" in instance_id else "all"


def load_set(name: str, directory) -> list[Instance]:
    out = []
    for path in sorted(Path(directory).glob("*.cnf")):
        try:
            formula = parse_dimacs(path.read_text(), strict=True)
        except CnfError as exc:
            raise ParseFailure(f"{path}: {exc}") from exc
        out.append(Instance(f"{name}/{path.stem}", formula))
    return out


def sample_instances(instances: Sequence[Instance], count: int, seed: int) -> list[Instance]:
    """``count`` instances drawn without replacement, kept in their original order."""
    if count >= len(instances):
        return list(instances)
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = sorted(rng.choice(len(instances), size=count, replace=False))
    return [instances[i] for i in picks]


def trial_seed(base_seed: int, instance_id: str, trial: int) -> int:
    """Seed for one trial, stable under resampling and reordering of instances."""
    ss = np.random.SeedSequence([base_seed, zlib.crc32(instance_id.encode()), trial])
    hi, lo = ss.generate_state(2)
    return int((int(hi) << 32 | int(lo)) & (2**63 - 1))


def _run_instance(job) -> list[dict]:
    instance, solvers, trials = job
    f = instance.formula
    if not f.is_strict_3sat:
        raise NotStrict3Sat(f"{instance.id} is not strict 3-SAT")
    g = gadget_convert(f)
    qubo = ising = None
    rows = []
    for label, params in solvers:
        if params.method == "bsb":
            ising = ising or build_ising(g)
            model = ising
        else:
            qubo = qubo or build_qubo(g)
            model = qubo
        for trial in range(trials):
            seed = trial_seed(params.seed, instance.id, trial)
            report = solve(model, params.with_(seed=seed))
            rows.append({
                "instance": instance.id,
                "n_vars": f.num_vars,
                "n_clauses": f.num_clauses,
                "density": round(f.density, 6),
                "solver": label,
                "trial": trial,
                "seed": seed,
                "max2sat_violated": report.max2sat_violated,
                "original_violated": report.original_violated,
                "objective": _num(report.objective),
                "iterations": report.iterations_used,
                "wall_ms": round(report.wall_time_ms, 3),
            })
    return rows


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() else v


def run_instances(instances: Sequence[Instance], solvers, trials: int, workers: int = 1) -> list[dict]:
    jobs = [(inst, list(solvers), trials) for inst in instances]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_instance, jobs))
    else:
        chunks = []
        for job in jobs:
            chunks.append(_run_instance(job))
            log.info("finished %s", job[0].id)
    return sort_rows(row for chunk in chunks for row in chunk)


def sort_rows(rows: Iterable[dict]) -> list[dict]:
    return sorted(rows, key=lambda r: (r["instance"], r["solver"], int(r["trial"])))


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """Solve every instance of every set with every solver, ``trials`` times each."""
    instances: list[Instance] = []
    for name, directory in spec.sets.items():
        found = load_set(name, directory)
        if spec.sample is not None:
            found = sample_instances(found, *spec.sample)
        instances.extend(found)
    rows = run_instances(instances, spec.solvers, spec.trials_per_instance, spec.workers)
    _write_outputs(spec, rows)
    return rows


def generated_instances(gen: GeneratorSpec) -> list[tuple[float, list[Instance]]]:
    out = []
    for k, (rho, m) in enumerate(gen.points()):
        batch = []
        for i in range(gen.instances_per_point):
            seed = int(np.random.SeedSequence([gen.seed, gen.n, m, i]).generate_state(1)[0])
            batch.append(Instance(f"n{gen.n}-m{m}/{i:03d}", generate_random_3sat(gen.n, m, seed)))
        out.append((rho, batch))
    return out


@dataclass
class SweepResult:
    rows: list[dict]
    aggregate: list[dict]


SWEEP_COLUMNS = ("n_vars", "density", "n_clauses", "solver", "instances", "mean", "median")


def density_sweep(spec: ExperimentSpec) -> SweepResult:
    """One aggregate row per (grid point, solver): mean and median of per-instance bests."""
    if spec.generator is None:
        raise ValueError("density_sweep needs a generator-sourced spec")
    gen = spec.generator
    rows: list[dict] = []
    aggregate = []
    for rho, batch in generated_instances(gen):
        point_rows = run_instances(batch, spec.solvers, spec.trials_per_instance, spec.workers)
        rows.extend(point_rows)
        bests = per_instance_best(point_rows)
        for label, _ in spec.solvers:
            values = [v for (inst, solver), v in bests.items() if solver == label]
            aggregate.append({
                "n_vars": gen.n,
                "density": round(rho, 6),
                "n_clauses": batch[0].formula.num_clauses,
                "solver": label,
                "instances": len(values),
                "mean": float(np.mean(values)),
                "median": percentile_linear(values, 50),
            })
    rows = sort_rows(rows)
    _write_outputs(spec, rows)
    return SweepResult(rows, aggregate)


def per_instance_best(rows: Iterable[dict]) -> dict[tuple[str, str], int]:
    """``(instance, solver) -> min original_violated`` over trials."""
    best: dict[tuple[str, str], int] = {}
    for r in rows:
        key = (r["instance"], r["solver"])
        v = int(r["original_violated"])
        best[key] = min(v, best.get(key, v))
    return best


def summarize(rows: Iterable[dict]) -> dict[str, dict[str, SummaryStats]]:
    grouped: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    for (inst, solver), v in sorted(per_instance_best(rows).items()):
        grouped[set_of(inst)][solver].append(v)
    return {s: {solver: SummaryStats.of(vals) for solver, vals in sorted(per.items())}
            for s, per in sorted(grouped.items())}


def summary_to_json(summary: dict[str, dict[str, SummaryStats]]) -> str:
    data = {s: {solver: asdict(stats) for solver, stats in per.items()} for s, per in summary.items()}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def select_best_solver(per_solver: dict[str, SummaryStats]) -> str:
    """Smallest median wins; ties go to the smallest minimum, then the label."""
    return min(per_solver, key=lambda s: (per_solver[s].median, per_solver[s].min, s))


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str] = RESULT_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def read_results_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
        raise ValueError(f"unexpected results header: {reader.fieldnames}")
    return list(reader)


def read_reference_csv(text: str) -> dict[str, int]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != REFERENCE_COLUMNS:
        raise ValueError(f"reference CSV must have header {','.join(REFERENCE_COLUMNS)}")
    out = {}
    for row in reader:
        if row["instance"] in out:
            raise ValueError(f"duplicate reference instance {row['instance']!r}")
        out[row["instance"]] = int(row["violated"])
    return out


@dataclass
class Comparison:
    rows: list[dict]
    missing_in_reference: list[str]
    missing_in_results: list[str]


def compare_with_reference(rows: Iterable[dict], reference: dict[str, int]) -> Comparison:
    """Align per-instance bests with reference counts by instance id.

    Every instance from either side appears in ``rows``; ids present on only
    one side are also listed in the ``missing_*`` fields.
    """
    bests = per_instance_best(rows)
    solvers = sorted({s for _, s in bests})
    instances = sorted({i for i, _ in bests})
    table = []
    for inst in sorted(set(instances) | set(reference)):
        row = {"instance": inst, "reference": reference.get(inst)}
        for s in solvers:
            row[s] = bests.get((inst, s))
        table.append(row)
    return Comparison(
        rows=table,
        missing_in_reference=[i for i in instances if i not in reference],
        missing_in_results=sorted(set(reference) - set(instances)),
    )


def _write_outputs(spec: ExperimentSpec, rows: list[dict]) -> None:
    if spec.results_csv:
        Path(spec.results_csv).write_text(rows_to_csv(rows))
    if spec.summary_json and rows:
        Path(spec.summary_json).write_text(summary_to_json(summarize(rows)))
