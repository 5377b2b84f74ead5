import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from qubo3sat.bench import (
    RESULT_COLUMNS,
    EmptyGroup,
    EmptyInput,
    ExperimentSpec,
    GeneratorSpec,
    ParseFailure,
    SummaryStats,
    compare_with_reference,
    density_sweep,
    generated_instances,
    load_set,
    per_instance_best,
    percentile_linear,
    read_reference_csv,
    read_results_csv,
    rows_to_csv,
    run_experiment,
    sample_instances,
    select_best_solver,
    summarize,
    summary_to_json,
    trial_seed,
)
from qubo3sat.cnf import CnfFormula, generate_random_3sat, write_dimacs
from qubo3sat.reduction import NotStrict3Sat
from qubo3sat.solvers import SolverParams

DATA = Path(__file__).resolve().parents[1] / "data"
FAST = ("ga_ls", SolverParams(method="ga_ls", iteration_budget=20_000))


def row(instance, solver, trial, violated):
    return {"instance": instance, "solver": solver, "trial": trial, "original_violated": violated}


class TestPercentile:
    def test_examples(self):
        assert percentile_linear([1, 2, 3, 4], 25) == 1.75
        assert percentile_linear([5], 37) == 5
        assert percentile_linear([1, 2, 3], 50) == 2

    def test_unsorted_input(self):
        assert percentile_linear([4, 1, 3, 2], 75) == 3.25

    def test_errors(self):
        with pytest.raises(EmptyInput):
            percentile_linear([], 50)
        with pytest.raises(ValueError):
            percentile_linear([1], 101)

    @given(st.lists(st.integers(-100, 100), min_size=1, max_size=30), st.floats(0, 100))
    def test_within_range_and_monotone(self, values, p):
        v = percentile_linear(values, p)
        assert min(values) <= v <= max(values)
        assert percentile_linear(values, 0) == min(values)
        assert percentile_linear(values, 100) == max(values)


class TestSummary:
    def test_examples(self):
        assert SummaryStats.of([0, 0, 1, 1]) == SummaryStats(0, 1, 0, 1, 0.5)
        assert SummaryStats.of([1, 1, 1, 1]) == SummaryStats(1, 1, 1, 1, 1)
        assert SummaryStats.of([0]) == SummaryStats(0, 0, 0, 0, 0)

    def test_empty_group(self):
        with pytest.raises(EmptyGroup):
            SummaryStats.of([])

    def test_best_over_trials(self):
        rows = [row("s/a", "x", 0, 3), row("s/a", "x", 1, 1), row("s/b", "x", 0, 2)]
        assert per_instance_best(rows) == {("s/a", "x"): 1, ("s/b", "x"): 2}
        stats = summarize(rows)["s"]["x"]
        assert (stats.min, stats.max, stats.median) == (1, 2, 1.5)

    @given(st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from(["p", "q"]),
                              st.integers(0, 2), st.integers(0, 9)), min_size=1, max_size=25),
           st.randoms())
    def test_permutation_invariant(self, entries, rnd):
        rows = [row(f"set/{i}", s, t, v) for i, s, t, v in entries]
        shuffled = rows[:]
        rnd.shuffle(shuffled)
        assert summarize(rows) == summarize(shuffled)

    @given(st.lists(st.integers(0, 9), min_size=2, max_size=6))
    def test_more_trials_never_worse(self, values):
        rows = [row("s/a", "x", t, v) for t, v in enumerate(values)]
        bests = [per_instance_best(rows[:k])[("s/a", "x")] for k in range(1, len(rows) + 1)]
        assert all(b <= a for a, b in zip(bests, bests[1:]))

    def test_summary_json_shape(self):
        data = json.loads(summary_to_json(summarize([row("s/a", "x", 0, 2)])))
        assert data == {"s": {"x": {"min": 2.0, "max": 2.0, "q1": 2.0, "q3": 2.0, "median": 2.0}}}

    def test_select_best_solver(self):
        per = {"a": SummaryStats(0, 3, 1, 2, 1), "b": SummaryStats(0, 2, 0, 1, 1), "c": SummaryStats(1, 1, 1, 1, 1)}
        assert select_best_solver(per) == "a"
        per["b"] = SummaryStats(0, 2, 0, 1, 0.5)
        assert select_best_solver(per) == "b"


class TestSpec:
    def test_from_dict(self, tmp_path):
        spec = ExperimentSpec.from_dict({
            "sets": {"x": "cnfs"},
            "solvers": [{"label": "fast", "method": "sa", "iteration_budget": 10}, {"preset": "paper-bsb"}],
            "sample": {"count": 2, "seed": 9},
            "results_csv": "out.csv",
        }, base_dir=tmp_path)
        assert [label for label, _ in spec.solvers] == ["fast", "bsb"]
        assert spec.sets["x"] == str(tmp_path / "cnfs")
        assert spec.sample == (2, 9) and spec.trials_per_instance == 3

    def test_invalid(self):
        with pytest.raises(ValueError):
            ExperimentSpec(solvers=[FAST], trials_per_instance=0)
        with pytest.raises(ValueError):
            ExperimentSpec(solvers=[FAST, FAST])
        with pytest.raises(ValueError):
            GeneratorSpec(n=30, densities=(1.0, 0.5))

    def test_generator_points(self):
        assert GeneratorSpec(n=30, densities=(0.5, 1.0)).points() == [(0.5, 15), (1.0, 30)]
        pts = GeneratorSpec(n=70, clause_counts=(260, 310)).points()
        assert [m for _, m in pts] == [260, 310]


class TestInstances:
    def test_load_errors(self, tmp_path):
        (tmp_path / "bad.cnf").write_text("p cnf 3 1\n1 2 0\n")
        with pytest.raises(ParseFailure, match="bad.cnf"):
            load_set("x", tmp_path)

    def test_sample_size(self, tmp_path):
        for i in range(30):
            (tmp_path / f"i{i:02d}.cnf").write_text(write_dimacs(generate_random_3sat(5, 3, i)))
        found = load_set("x", tmp_path)
        picked = sample_instances(found, 12, seed=1)
        assert len(picked) == 12 and len({p.id for p in picked}) == 12
        assert [p.id for p in picked] == sorted(p.id for p in picked)
        assert picked == sample_instances(found, 12, seed=1)

    def test_trial_seed_stable(self):
        assert trial_seed(0, "a/b", 1) == trial_seed(0, "a/b", 1)
        assert len({trial_seed(0, "a/b", t) for t in range(3)}) == 3

    def test_generated_reproducible(self):
        a = generated_instances(GeneratorSpec(n=10, densities=(1.0,), instances_per_point=3))
        b = generated_instances(GeneratorSpec(n=10, densities=(1.0,), instances_per_point=3))
        assert a == b and len(a[0][1]) == 3


class TestRun:
    def test_trivial_instance(self, tmp_path):
        (tmp_path / "easy.cnf").write_text("p cnf 3 2\n1 2 3 0\n1 -2 3 0\n")
        spec = ExperimentSpec(solvers=[FAST], sets={"easy": str(tmp_path)},
                              results_csv=str(tmp_path / "r.csv"), summary_json=str(tmp_path / "s.json"))
        rows = run_experiment(spec)
        assert len(rows) == 3
        assert json.loads((tmp_path / "s.json").read_text())["easy"]["ga_ls"]["max"] == 0
        back = read_results_csv((tmp_path / "r.csv").read_text())
        assert [r["trial"] for r in back] == ["0", "1", "2"]

    def test_deterministic_and_parallel(self, tmp_path):
        for i in range(3):
            (tmp_path / f"i{i}.cnf").write_text(write_dimacs(generate_random_3sat(12, 50, i)))
        spec = ExperimentSpec(solvers=[FAST], sets={"s": str(tmp_path)}, trials_per_instance=2)
        strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
        serial = strip(run_experiment(spec))
        spec.workers = 2
        assert strip(run_experiment(spec)) == serial

    def test_not_strict(self, tmp_path):
        from qubo3sat.bench import run_instances, Instance
        f = CnfFormula.from_lists(3, [[1, 2]])
        with pytest.raises(NotStrict3Sat):
            run_instances([Instance("x/a", f)], [FAST], 1)

    def test_pret_summary(self):
        spec = ExperimentSpec(solvers=[("ga_ls", SolverParams(iteration_budget=200_000))],
                              sets={"pret": str(DATA / "pret")})
        stats = summarize(run_experiment(spec))["pret"]["ga_ls"]
        assert stats.min == stats.max == 1

    def test_sweep(self):
        spec = ExperimentSpec(solvers=[FAST, ("bsb", SolverParams(method="bsb", iteration_budget=300))],
                              generator=GeneratorSpec(n=30, densities=(0.5, 1.0), instances_per_point=3),
                              trials_per_instance=2)
        result = density_sweep(spec)
        assert len(result.aggregate) == 2 * 2
        assert len(result.rows) == 2 * 3 * 2 * 2
        ga = [a for a in result.aggregate if a["solver"] == "ga_ls"]
        assert all(a["median"] == 0 for a in ga)

    def test_empty_grid(self):
        spec = ExperimentSpec(solvers=[FAST], generator=GeneratorSpec(n=30))
        assert density_sweep(spec).aggregate == []


class TestCsv:
    def test_header(self):
        assert rows_to_csv([]).strip() == (
            "instance,n_vars,n_clauses,density,solver,trial,seed,max2sat_violated,"
            "original_violated,objective,iterations,wall_ms")
        assert len(RESULT_COLUMNS) == 12

    def test_bad_results_header(self):
        with pytest.raises(ValueError):
            read_results_csv("a,b\n1,2\n")

    def test_reference(self):
        ref = read_reference_csv("instance,violated\npret/a,1\npret/c,0\n")
        rows = [row("pret/a", "ga_ls", 0, 1), row("pret/b", "ga_ls", 0, 2)]
        cmp = compare_with_reference(rows, ref)
        assert [r["instance"] for r in cmp.rows] == ["pret/a", "pret/b", "pret/c"]
        assert cmp.missing_in_reference == ["pret/b"]
        assert cmp.missing_in_results == ["pret/c"]
        assert cmp.rows[0] == {"instance": "pret/a", "reference": 1, "ga_ls": 1}

    def test_reference_errors(self):
        with pytest.raises(ValueError):
            read_reference_csv("id,violated\na,1\n")
        with pytest.raises(ValueError):
            read_reference_csv("instance,violated\na,1\na,2\n")
