"""CNF formulas: DIMACS I/O, uniform random 3-SAT generation and evaluation.

Random instances are drawn from numpy's ``PCG64`` bit generator seeded with
the caller's 64-bit seed. Each clause is built by drawing variables with
``Generator.integers(1, n + 1)`` and rejecting duplicates until three distinct
variables are collected, then one ``Generator.random()`` draw per literal
decides negation (``< 0.5`` means negated). The draw order is fixed, so a
given ``(n, m, seed)`` always yields the same file.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class CnfError(ValueError):
    """Base class for malformed or inconsistent CNF input."""


class MalformedHeader(CnfError):
    pass


class VariableOutOfRange(CnfError):
    pass


class ClauseTooLong(CnfError):
    pass


class DuplicateVariableInClause(CnfError):
    pass


class ClauseCountMismatch(CnfError):
    pass


class TooFewVariables(CnfError):
    pass


class LengthMismatch(ValueError):
    """An assignment does not match the variable count of its formula."""


@dataclass(frozen=True)
class Literal:
    variable: int
    sign: int = 1

    def __post_init__(self):
        if self.variable < 1:
            raise VariableOutOfRange(f"variable index must be >= 1, got {self.variable}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def from_int(cls, value: int) -> "Literal":
        if value == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(value), 1 if value > 0 else -1)

    def to_int(self) -> int:
        return self.sign * self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, -self.sign)

    def is_true(self, bit: int) -> bool:
        return bool(bit) == (self.sign > 0)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        if not 1 <= len(self.literals) <= 3:
            raise ClauseTooLong(f"clauses hold 1 to 3 literals, got {len(self.literals)}")
        variables = [lit.variable for lit in self.literals]
        if len(set(variables)) != len(variables):
            raise DuplicateVariableInClause(f"repeated variable in clause {self.to_ints()}")

    @classmethod
    def from_ints(cls, values: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(v) for v in values))

    def to_ints(self) -> list[int]:
        return [lit.to_int() for lit in self.literals]

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    def is_satisfied(self, bits: Sequence[int]) -> bool:
        """``bits`` is 0-indexed: variable ``v`` reads ``bits[v - 1]``."""
        return any(lit.is_true(bits[lit.variable - 1]) for lit in self.literals)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.num_vars < 1:
            raise MalformedHeader(f"num_vars must be >= 1, got {self.num_vars}")
        for clause in self.clauses:
            for lit in clause:
                if lit.variable > self.num_vars:
                    raise VariableOutOfRange(
                        f"literal {lit.to_int()} exceeds num_vars={self.num_vars}"
                    )

    @classmethod
    def from_lists(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        return cls(num_vars, tuple(Clause.from_ints(c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def density(self) -> float:
        return self.num_clauses / self.num_vars

    @property
    def is_strict_3sat(self) -> bool:
        return all(len(c) == 3 for c in self.clauses)

    def to_lists(self) -> list[list[int]]:
        return [c.to_ints() for c in self.clauses]


def parse_dimacs(text: str | Iterable[str], strict: bool = True) -> CnfFormula:
    """Parse DIMACS CNF.

    With ``strict=True`` every clause must have exactly three literals. Pass
    ``strict=False`` for general CNF with 1 to 3 literals per clause.
    """
    if not isinstance(text, str):
        text = "".join(text)
    header = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            # SATLIB uf files end with a "%" trailer line.
            break
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: duplicate problem line")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: expected 'p cnf N M', got {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise MalformedHeader(f"line {lineno}: non-integer header {line!r}") from None
            if header[0] < 1 or header[1] < 0:
                raise MalformedHeader(f"line {lineno}: invalid sizes {line!r}")
            continue
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause before problem line")
        for token in line.split():
            try:
                value = int(token)
            except ValueError:
                raise CnfError(f"line {lineno}: bad token {token!r}") from None
            if value == 0:
                clauses.append(_make_clause(pending, header[0], strict, lineno))
                pending = []
            else:
                pending.append(value)
    if header is None:
        raise MalformedHeader("missing 'p cnf' problem line")
    if pending:
        raise CnfError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ClauseCountMismatch(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def _make_clause(values: list[int], num_vars: int, strict: bool, lineno: int) -> Clause:
    for v in values:
        if abs(v) > num_vars:
            raise VariableOutOfRange(f"line {lineno}: literal {v} exceeds N={num_vars}")
    if strict and len(values) != 3:
        raise ClauseTooLong(f"line {lineno}: strict 3-SAT needs 3 literals, got {len(values)}")
    if len(values) > 3:
        raise ClauseTooLong(f"line {lineno}: {len(values)} literals")
    if not values:
        raise CnfError(f"line {lineno}: empty clause")
    return Clause.from_ints(values)


def read_dimacs(path, strict: bool = True) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read(), strict=strict)


def write_dimacs(f: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.num_vars} {f.num_clauses}")
    lines.extend(" ".join(map(str, c.to_ints())) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def generate_random_3sat(n: int, m: int, seed: int) -> CnfFormula:
    if n < 3:
        raise TooFewVariables(f"need at least 3 variables, got {n}")
    if m < 0:
        raise ValueError(f"clause count must be >= 0, got {m}")
    rng = np.random.Generator(np.random.PCG64(seed))
    clauses = []
    for _ in range(m):
        chosen: list[int] = []
        while len(chosen) < 3:
            v = int(rng.integers(1, n + 1))
            if v not in chosen:
                chosen.append(v)
        clauses.append(Clause(tuple(Literal(v, -1 if rng.random() < 0.5 else 1) for v in chosen)))
    return CnfFormula(n, tuple(clauses))


def evaluate_cnf(f: CnfFormula, bits: Sequence[int]) -> tuple[int, int]:
    """Return ``(satisfied, violated)`` clause counts under ``bits``."""
    if len(bits) != f.num_vars:
        raise LengthMismatch(f"assignment has {len(bits)} bits, formula has {f.num_vars} variables")
    satisfied = sum(1 for c in f.clauses if c.is_satisfied(bits))
    return satisfied, f.num_clauses - satisfied
