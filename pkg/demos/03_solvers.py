"""
Four heuristics on one uf50-218 instance
========================================

Simulated annealing, tabu search and the genetic algorithm with local search
work on the QUBO; ballistic simulated bifurcation works on the Ising model.
Budgets are flip equivalents for the first three and integration steps for
bSB.
"""

from pathlib import Path

from qubo3sat import build_ising, build_qubo, gadget_convert, read_dimacs
from qubo3sat.solvers import SolverParams, get_preset, solve

here = Path(__file__).resolve().parent
f = read_dimacs(here.parent / "data" / "uf50-218" / "uf50-0003.cnf")
g = gadget_convert(f)
qubo, ising = build_qubo(g), build_ising(g)
print(f"N={f.num_vars} M={f.num_clauses} -> N'={g.num_vars}, {g.num_clauses} clauses")
print(f"lower bound on q: {6 * f.num_clauses} (all original clauses satisfied)")

runs = [
    ("sa", SolverParams(method="sa", iteration_budget=1_000_000, seed=1)),
    ("tabu", SolverParams(method="tabu", iteration_budget=100_000, seed=1)),
    ("ga_ls", SolverParams(method="ga_ls", iteration_budget=1_000_000, seed=1)),
    ("bsb", get_preset("default-bsb").with_(seed=1)),
    ("bsb (paper-bsb)", get_preset("paper-bsb").with_(seed=1)),
]
print()
print(f"{'solver':<16}{'q':>6}{'V(x)':>7}{'orig. violated':>16}{'work':>10}{'ms':>9}")
for label, params in runs:
    r = solve(ising if params.method == "bsb" else qubo, params)
    print(f"{label:<16}{r.objective:>6g}{r.max2sat_violated:>7}{r.original_violated:>16}"
          f"{r.iterations_used:>10}{r.wall_time_ms:>9.0f}")

# %%
# The trace records each improvement of the best objective, as
# (work used, objective) pairs; it never increases.
r = solve(qubo, SolverParams(method="ga_ls", iteration_budget=1_000_000, seed=2))
print()
print("ga_ls trace:", r.trace)
