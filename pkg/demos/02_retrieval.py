"""
Counting original clauses from a Max 2-SAT solution
===================================================

The satisfied-clause totals of a gadget formula, split by the value of the
ancillary variables, determine how many original clauses were violated.
With all ancillaries at 0 the answer is unique; with ancillaries at 1 it may
be ambiguous unless the number of all-false groups is also known.
"""

import numpy as np

from qubo3sat import (
    GadgetObservation,
    direct_counts,
    gadget_convert,
    generate_random_3sat,
    optimal_ancillaries,
    retrieve,
    retrieve_counts_d0,
    retrieve_counts_d1,
    retrieve_counts_mixed,
)

# 6V + 7S = total with V + S = M has exactly one solution.
print("d=0, total 34, M=5 ->", retrieve_counts_d0(34, 5).candidates)

# 4V + 6 S12 + 7 S13 = total can have several.
amb = retrieve_counts_d1(18, 3)
print("d=1, total 18, M=3 ->", amb.candidates, "exact:", amb.exact)
for d in amb.derivations:
    print("   ", d)
print("   knowing one all-false group ->", retrieve_counts_d1(18, 3, case1_count=1).candidates)

# %%
# On a random instance, set the original bits at random and each ancillary
# to its best value, then compare the theorem-based counts with a direct count.
f = generate_random_3sat(12, 40, seed=3)
g = gadget_convert(f)
rng = np.random.default_rng(0)
x = np.append(rng.integers(0, 2, f.num_vars), np.zeros(f.num_clauses, dtype=np.uint8))
x = optimal_ancillaries(g, x)
violated, satisfied, obs = direct_counts(g, x)
print()
print("observation:", obs)
print("direct count: violated", violated, "satisfied", satisfied)
print("retrieved:  ", retrieve_counts_mixed(obs).candidates)

# %%
# If the ancillaries are not at their best values the theorems no longer
# apply. With every ancillary at 0, a clause whose three literals are all
# true scores 6, exactly like a violated clause. The report keeps both
# numbers and flags the disagreement.
x_bad = np.append(x[: f.num_vars], np.zeros(f.num_clauses, dtype=np.uint8))
r = retrieve(g, x_bad)
print()
print("all ancillaries 0: oracle", r.oracle, "retrieved",
      r.retrieved.candidates if r.retrieved else r.error, "consistent:", r.consistent)
print("mixed example:", retrieve_counts_mixed(GadgetObservation(7, 7, 1, 1, 0)).candidates)
