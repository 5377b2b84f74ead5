"""
From a 3-SAT clause to a QUBO
=============================

One 3-SAT clause becomes ten Max 2-SAT clauses plus an ancillary variable.
The Max 2-SAT formula then becomes a QUBO whose value is twice the number of
violated clauses, and an Ising model whose energy is that number itself.
"""

import itertools

import numpy as np

from qubo3sat import (
    CnfFormula,
    build_ising,
    build_qubo,
    export_qubo,
    gadget_convert,
    ising_energy,
    qubo_objective,
    spins_from_bits,
)

# A single clause with one negated literal: (not x1) or x2 or x3.
f = CnfFormula.from_lists(3, [[-1, 2, 3]])
g = gadget_convert(f)
print("converted clauses:", [c.to_ints() for c in g.clauses])
print("variables:", g.num_vars, " ancillary:", g.groups[0].ancillary_var)

# For each assignment of x1..x3, the best choice of the ancillary satisfies
# 7 of the 10 clauses when the original clause holds, and 6 otherwise.
for x in itertools.product((0, 1), repeat=3):
    per_d = [10 - g.violated(list(x) + [d]) for d in (0, 1)]
    mark = "sat  " if f.clauses[0].is_satisfied(x) else "unsat"
    print(x, mark, "satisfied with d=0/d=1:", per_d)

# %%
# The QUBO matrix is sparse and symmetric with even integer entries.
q = build_qubo(g)
print()
print(export_qubo(q))

# Exhaustive check of q(x) = 2 V(x) and H(s) = V(x) over all 16 assignments.
H = build_ising(g)
for bits in itertools.product((0, 1), repeat=g.num_vars):
    v = g.violated(bits)
    assert qubo_objective(q, bits) == 2 * v
    assert ising_energy(H, spins_from_bits(bits)) == v
print("q = 2V and H = V on all", 2 ** g.num_vars, "assignments")

# %%
# The lowest reachable value is 2 * 3 per original clause: every gadget
# leaves at least three clauses violated.
values = [int(qubo_objective(q, b)) for b in itertools.product((0, 1), repeat=g.num_vars)]
levels, counts = np.unique(values, return_counts=True)
print("min q =", min(values), " assignments per value:", dict(zip(levels.tolist(), counts.tolist())))
