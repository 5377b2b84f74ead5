"""
Easy, hard and over-constrained random 3-SAT
============================================

Sweep the clause density rho = M/N of random instances and record the best
number of violated original clauses. Below the satisfiability threshold near
4.26 the digital solver finds satisfying assignments; above it the optimum
grows with rho. bSB with the ``paper-bsb`` preset already misses
clauses at moderate densities.

This is a reduced version of ``demos/specs/sweep_n30.json``, which runs the
full grid through ``qubo3sat bench``.
"""

from qubo3sat.bench import ExperimentSpec, GeneratorSpec, density_sweep, rows_to_csv, SWEEP_COLUMNS
from qubo3sat.solvers import SolverParams, get_preset

spec = ExperimentSpec(
    solvers=[
        ("ga_ls", SolverParams(method="ga_ls", iteration_budget=200_000)),
        ("bsb", get_preset("paper-bsb")),
    ],
    generator=GeneratorSpec(n=20, densities=(1.0, 2.0, 3.0, 4.0, 5.0, 6.0), instances_per_point=5, seed=1),
    trials_per_instance=2,
)
result = density_sweep(spec)
print(rows_to_csv(result.aggregate, SWEEP_COLUMNS))

# %%
# A crude text plot of the ga_ls medians.
for row in result.aggregate:
    if row["solver"] == "ga_ls":
        print(f"rho={row['density']:<4} {'#' * int(2 * row['median'])} {row['median']}")
