"""Checks on the bundled stand-in benchmark instances."""
from pathlib import Path

import pytest

from oracles import gf2_consistent
from qubo3sat.cnf import CnfFormula, evaluate_cnf, read_dimacs

DATA = Path(__file__).resolve().parents[1] / "data"
PRET = sorted((DATA / "pret").glob("*.cnf"))
UF = sorted((DATA / "uf50-218").glob("*.cnf"))


def test_uf_set_shape():
    assert len(UF) == 100
    for path in UF:
        f = read_dimacs(path)
        assert (f.num_vars, f.num_clauses) == (50, 218)


@pytest.mark.parametrize("path", PRET, ids=lambda p: p.stem)
class TestPret:
    def test_shape(self, path):
        f = read_dimacs(path)
        assert (f.num_vars, f.num_clauses) == (60, 160)
        assert f.is_strict_3sat

    def test_unsatisfiable(self, path):
        assert not gf2_consistent(read_dimacs(path))

    def test_optimum_is_one(self, path):
        # dropping one vertex's constraint makes the parity system solvable,
        # so some assignment violates only one clause of that vertex
        f = read_dimacs(path)
        rest = CnfFormula(f.num_vars, f.clauses[4:])
        assert gf2_consistent(rest)


def test_optimum_one_witness():
    from qubo3sat.reduction import build_qubo, gadget_convert
    from qubo3sat.solvers import SolverParams, solve

    f = read_dimacs(PRET[0])
    r = solve(build_qubo(gadget_convert(f)), SolverParams(iteration_budget=300_000, seed=1))
    bits = r.best_bits[: f.num_vars]
    assert evaluate_cnf(f, bits)[1] == 1
