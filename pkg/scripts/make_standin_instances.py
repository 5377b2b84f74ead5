"""Generate the stand-in benchmark instances shipped under data/.

The SATLIB archives are not redistributed here. This script rebuilds
look-alike sets with the same construction rules:

* ``data/uf50-218/``: uniform random 3-SAT, N=50, M=218, kept only when a
  complete DPLL search proves them satisfiable (how the uf sets were made).
* ``data/pret/``: parity (Tseitin) formulas on connected random cubic graphs
  with 40 vertices and odd total charge: 60 variables, 160 clauses,
  unsatisfiable, and exactly one clause short of satisfiable.

Usage: python scripts/make_standin_instances.py [--count 100]
"""
import argparse
import itertools
from pathlib import Path

import networkx as nx
import numpy as np

from qubo3sat.cnf import CnfFormula, evaluate_cnf, generate_random_3sat, write_dimacs

ROOT = Path(__file__).resolve().parents[1] / "data"


def dpll(clauses, assignment=None):
    """Return a satisfying assignment dict or None. Plain DPLL with unit propagation."""
    assignment = dict(assignment or {})
    clauses = [list(c) for c in clauses]
    while True:
        simplified = []
        unit = None
        for clause in clauses:
            if any(assignment.get(abs(l)) == (l > 0) for l in clause):
                continue
            rest = [l for l in clause if abs(l) not in assignment]
            if not rest:
                return None
            if len(rest) == 1 and unit is None:
                unit = rest[0]
            simplified.append(rest)
        clauses = simplified
        if not clauses:
            return assignment
        if unit is None:
            break
        assignment[abs(unit)] = unit > 0
    counts = {}
    for clause in clauses:
        for l in clause:
            counts[l] = counts.get(l, 0) + 1 / len(clause)
    lit = max(counts, key=lambda l: (counts[l] + counts.get(-l, 0), l))
    for value in (lit > 0, lit <= 0):
        result = dpll(clauses, {**assignment, abs(lit): value})
        if result is not None:
            return result
    return None


def uf_instances(count, seed):
    found = 0
    attempt = 0
    while found < count:
        f = generate_random_3sat(50, 218, seed * 1_000_003 + attempt)
        attempt += 1
        model = dpll(f.to_lists())
        if model is None:
            continue
        bits = [int(model.get(v, False)) for v in range(1, 51)]
        assert evaluate_cnf(f, bits)[1] == 0
        found += 1
        yield found, f, attempt


def parity_clauses(edge_vars, charge):
    """Clauses forbidding every assignment of ``edge_vars`` with the wrong parity."""
    out = []
    for values in itertools.product((0, 1), repeat=len(edge_vars)):
        if sum(values) % 2 != charge:
            out.append([-v if bit else v for v, bit in zip(edge_vars, values)])
    return out


def pret_instance(seed):
    rng = np.random.default_rng(seed)
    while True:
        graph = nx.random_regular_graph(3, 40, seed=int(rng.integers(2**31)))
        if nx.is_connected(graph):
            break
    edges = {tuple(sorted(e)): i + 1 for i, e in enumerate(sorted(graph.edges()))}
    charges = rng.integers(0, 2, 40)
    if charges.sum() % 2 == 0:
        charges[int(rng.integers(40))] ^= 1
    clauses = []
    for v in range(40):
        incident = sorted(edges[tuple(sorted((v, u)))] for u in graph.neighbors(v))
        clauses.extend(parity_clauses(incident, int(charges[v])))
    return CnfFormula.from_lists(len(edges), clauses)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    uf_dir = ROOT / "uf50-218"
    uf_dir.mkdir(parents=True, exist_ok=True)
    for k, f, attempt in uf_instances(args.count, args.seed):
        note = f"stand-in uniform random 3-SAT, generator seed {args.seed * 1_000_003 + attempt - 1}, DPLL-verified SAT"
        (uf_dir / f"uf50-{k:04d}.cnf").write_text(write_dimacs(f, comments=[note]))

    pret_dir = ROOT / "pret"
    pret_dir.mkdir(parents=True, exist_ok=True)
    for k in range(4):
        f = pret_instance(args.seed + k)
        note = f"stand-in parity formula on a random cubic graph, seed {args.seed + k}, UNSAT with optimum 1"
        (pret_dir / f"pret60-{k + 1}.cnf").write_text(write_dimacs(f, comments=[note]))


if __name__ == "__main__":
    main()
