"""Recover original 3-SAT clause counts from a solved gadget Max 2-SAT instance.

Each gadget group contributes a satisfied-clause count that depends on how
many of its three literals are true and on its ancillary bit:

==========================  =====  =====
literals true               d = 0  d = 1
==========================  =====  =====
none (case 1)                 6      4
exactly one (case 2)          7      6
exactly two (case 3)          7      7
all three (case 3)            6      7
==========================  =====  =====

Groups with ``d = 0`` give ``6 V0 + 7 S0 = total0`` with ``V0 + S0 = |I0|``,
which has a unique solution. Groups with ``d = 1`` give
``4 V1 + 6 S12 + 7 S13 = total1``, which is under-determined unless the
number of case-1 groups is known.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .cnf import LengthMismatch, Literal
from .reduction import Max2SatFormula, gadget_clauses


class Infeasible(ValueError):
    """No non-negative integer solution exists for the observed totals."""


@dataclass(frozen=True)
class GadgetObservation:
    satisfied_total_d0: int
    satisfied_total_d1: int
    groups_d0: int
    groups_d1: int
    case1_count_d1: Optional[int] = None

    @property
    def num_groups(self) -> int:
        return self.groups_d0 + self.groups_d1

    def without_case1(self) -> "GadgetObservation":
        return GadgetObservation(self.satisfied_total_d0, self.satisfied_total_d1,
                                 self.groups_d0, self.groups_d1, None)

    def to_dict(self) -> dict:
        return {
            "satisfied_total_d0": self.satisfied_total_d0,
            "satisfied_total_d1": self.satisfied_total_d1,
            "groups_d0": self.groups_d0,
            "groups_d1": self.groups_d1,
            "case1_count_d1": self.case1_count_d1,
        }


@dataclass(frozen=True)
class RetrievalResult:
    """Candidate ``(violated, satisfied)`` pairs for the original formula.

    ``derivations`` keeps the per-candidate breakdown (for the ``d = 1`` part:
    ``s12`` and ``s13``, the satisfied clauses in case 2 and case 3).
    """
    candidates: tuple[tuple[int, int], ...]
    exact: bool
    derivations: tuple[dict, ...] = field(default=(), compare=False)

    @property
    def violated(self) -> int:
        if not self.exact:
            raise ValueError(f"ambiguous retrieval: {len(self.candidates)} candidates")
        return self.candidates[0][0]

    @property
    def satisfied(self) -> int:
        if not self.exact:
            raise ValueError(f"ambiguous retrieval: {len(self.candidates)} candidates")
        return self.candidates[0][1]

    def to_dict(self) -> dict:
        return {"candidates": [list(c) for c in self.candidates], "exact": self.exact}


_TEMPLATE = gadget_clauses([Literal(1), Literal(2), Literal(3)], 4)


def classify_gadget_group(literal_values: Sequence[int], ancillary: int) -> tuple[int, int]:
    """Return ``(case, satisfied_in_group)`` for literal truth values and ``d``."""
    values = [int(bool(v)) for v in literal_values]
    true_count = sum(values)
    case = 1 if true_count == 0 else 2 if true_count == 1 else 3
    bits = values + [int(bool(ancillary))]
    return case, sum(1 for c in _TEMPLATE if c.is_satisfied(bits))


def retrieve_counts_d0(total: int, m: int) -> RetrievalResult:
    # [6 7; 1 1] [V; S] = [total; m]  =>  S = total - 6m
    satisfied = total - 6 * m
    violated = m - satisfied
    if m < 0 or satisfied < 0 or violated < 0:
        raise Infeasible(f"6V + 7S = {total}, V + S = {m} has no non-negative solution")
    return RetrievalResult(((violated, satisfied),), True,
                           ({"violated": violated, "satisfied": satisfied},))


def retrieve_counts_d1(total: int, m: int, case1_count: Optional[int] = None) -> RetrievalResult:
    if not 4 * m <= total <= 7 * m:
        raise Infeasible(f"total {total} outside [4M, 7M] for M = {m}")
    if case1_count is not None:
        v = case1_count
        # [6 7; 1 1] [S12; S13] = [total - 4V; m - V]
        s13 = (total - 4 * v) - 6 * (m - v)
        s12 = (m - v) - s13
        if v < 0 or v > m or s12 < 0 or s13 < 0:
            raise Infeasible(f"no solution with {v} case-1 groups, total {total}, M = {m}")
        return RetrievalResult(((v, s12 + s13),), True,
                               ({"violated": v, "s12": s12, "s13": s13},))
    candidates: list[tuple[int, int]] = []
    derivations = []
    for v in range(m + 1):
        for s12 in range(m - v + 1):
            s13 = m - v - s12
            if 4 * v + 6 * s12 + 7 * s13 == total:
                derivations.append({"violated": v, "s12": s12, "s13": s13})
                if (v, s12 + s13) not in candidates:
                    candidates.append((v, s12 + s13))
    if not candidates:
        raise Infeasible(f"4V + 6S12 + 7S13 = {total} has no solution with sum {m}")
    candidates.sort(reverse=True)
    return RetrievalResult(tuple(candidates), len(candidates) == 1, tuple(derivations))


def retrieve_counts_mixed(obs: GadgetObservation) -> RetrievalResult:
    part0 = retrieve_counts_d0(obs.satisfied_total_d0, obs.groups_d0)
    part1 = retrieve_counts_d1(obs.satisfied_total_d1, obs.groups_d1, obs.case1_count_d1)
    candidates = []
    derivations = []
    for (v0, s0), (v1, s1) in product(part0.candidates, part1.candidates):
        pair = (v0 + v1, s0 + s1)
        if pair not in candidates:
            candidates.append(pair)
            derivations.append({"violated_d0": v0, "satisfied_d0": s0,
                                "violated_d1": v1, "satisfied_d1": s1})
    return RetrievalResult(tuple(candidates), part0.exact and part1.exact, tuple(derivations))


def group_literals(g: Max2SatFormula, group) -> tuple[Literal, Literal, Literal]:
    return tuple(g.clauses[group.clause_indices[i]].literals[0] for i in range(3))


def direct_counts(g: Max2SatFormula, x) -> tuple[int, int, GadgetObservation]:
    """Count original violated/satisfied clauses directly and tally the observation."""
    if len(x) != g.num_vars:
        raise LengthMismatch(f"{len(x)} bits for {g.num_vars} variables")
    x = np.asarray(x)
    violated = 0
    totals = [0, 0]
    sizes = [0, 0]
    case1_d1 = 0
    for group in g.groups:
        lits = group_literals(g, group)
        values = [lit.is_true(x[lit.variable - 1]) for lit in lits]
        d = int(x[group.ancillary_var - 1])
        sat_in_group = sum(1 for i in group.clause_indices if g.clauses[i].is_satisfied(x))
        totals[d] += sat_in_group
        sizes[d] += 1
        if not any(values):
            violated += 1
            case1_d1 += d
    m = len(g.groups)
    obs = GadgetObservation(totals[0], totals[1], sizes[0], sizes[1], case1_d1)
    return violated, m - violated, obs


def optimal_ancillaries(g: Max2SatFormula, x) -> np.ndarray:
    """Copy of ``x`` with each ancillary set to its group-optimal value (ties -> 0)."""
    x = np.array(x, dtype=np.uint8)
    for group in g.groups:
        values = [lit.is_true(x[lit.variable - 1]) for lit in group_literals(g, group)]
        _, sat0 = classify_gadget_group(values, 0)
        _, sat1 = classify_gadget_group(values, 1)
        x[group.ancillary_var - 1] = 1 if sat1 > sat0 else 0
    return x


@dataclass(frozen=True)
class RetrievalReport:
    """Theorem-based retrieval alongside the direct count it should agree with."""
    oracle: tuple[int, int]
    observation: GadgetObservation
    retrieved: Optional[RetrievalResult]
    retrieved_without_case1: Optional[RetrievalResult]
    error: Optional[str] = None

    @property
    def consistent(self) -> bool:
        return self.retrieved is not None and self.oracle in self.retrieved.candidates

    def to_dict(self) -> dict:
        return {
            "oracle": {"violated": self.oracle[0], "satisfied": self.oracle[1]},
            "observation": self.observation.to_dict(),
            "retrieved": self.retrieved.to_dict() if self.retrieved else None,
            "retrieved_without_case1": (self.retrieved_without_case1.to_dict()
                                        if self.retrieved_without_case1 else None),
            "consistent": self.consistent,
            "error": self.error,
        }


def retrieve(g: Max2SatFormula, x) -> RetrievalReport:
    violated, satisfied, obs = direct_counts(g, x)
    try:
        with_case1 = retrieve_counts_mixed(obs)
        without = retrieve_counts_mixed(obs.without_case1())
        error = None
    except Infeasible as exc:
        with_case1 = without = None
        error = str(exc)
    return RetrievalReport((violated, satisfied), obs, with_case1, without, error)
