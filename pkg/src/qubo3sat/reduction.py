"""3-SAT -> Max 2-SAT via the (7,10)-gadget, and Max 2-SAT -> QUBO / Ising.

Conventions
-----------
Bits are 0/1 arrays indexed from 0, so variable ``j`` (1-based, as in DIMACS)
lives at position ``j - 1``. Spins follow ``s_j = +1`` iff ``x_j = 1``.

QUBO objective::

    q(x) = 1/2 x^T Q x + b^T x + c         (Q symmetric, zero diagonal)

built so that ``q(x) = 2 V(x)`` where ``V`` counts violated Max 2-SAT clauses.

Ising energy::

    H(s) = (1/2 s^T J s + h^T s) / 4 + offset

``J`` and ``h`` carry the 4x-scaled coefficients (a two-literal clause with
signs ``v1, v2`` adds ``v1*v2`` to ``J`` and ``-v`` to ``h``), while ``offset``
is the unscaled constant, so that ``H(spins(x)) = V(x)``.

Text exports (1-based indices, one term per line, ``\\n`` endings)::

    qubo <n>              ising <n>
    <i> <j> <Q_ij>        <i> <j> <J_ij>       only i < j, nonzero entries
    b <i> <b_i>           h <i> <h_i>          nonzero entries
    c <c>                 offset <offset>      always present

Integral values print as integers, others with Python's ``repr``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .cnf import (
    Clause,
    CnfError,
    CnfFormula,
    LengthMismatch,
    Literal,
    parse_dimacs,
    write_dimacs,
)

GADGET_SIZE = 10
GADGET_TAG = "qubo3sat-gadget"


class NotStrict3Sat(CnfError):
    pass


@dataclass(frozen=True)
class GadgetGroup:
    original_clause_index: int
    clause_indices: tuple[int, ...]
    ancillary_var: int


@dataclass(frozen=True)
class Max2SatFormula:
    num_original_vars: int
    num_vars: int
    clauses: tuple[Clause, ...]
    groups: tuple[GadgetGroup, ...] = ()
    original: Optional[CnfFormula] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) > 2:
                raise ValueError(f"Max 2-SAT clause with {len(clause)} literals")
            for lit in clause:
                if lit.variable > self.num_vars:
                    raise ValueError(f"literal {lit.to_int()} exceeds num_vars={self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def violated(self, bits: Sequence[int]) -> int:
        if len(bits) != self.num_vars:
            raise LengthMismatch(f"{len(bits)} bits for {self.num_vars} variables")
        return sum(1 for c in self.clauses if not c.is_satisfied(bits))


def gadget_clauses(literals: Sequence[Literal], ancillary: int) -> list[Clause]:
    """The ten clauses replacing ``(l1 v l2 v l3)``, in a fixed order."""
    l1, l2, l3 = literals
    d = Literal(ancillary, 1)
    return [
        Clause((l1,)), Clause((l2,)), Clause((l3,)), Clause((d,)),
        Clause((-l1, -l2)), Clause((-l1, -l3)), Clause((-l2, -l3)),
        Clause((l1, -d)), Clause((l2, -d)), Clause((l3, -d)),
    ]


def gadget_convert(f: CnfFormula) -> Max2SatFormula:
    if not f.is_strict_3sat:
        raise NotStrict3Sat("gadget conversion needs exactly 3 literals per clause")
    n = f.num_vars
    clauses: list[Clause] = []
    groups = []
    for k, clause in enumerate(f.clauses):
        start = len(clauses)
        ancillary = n + k + 1
        clauses.extend(gadget_clauses(clause.literals, ancillary))
        groups.append(GadgetGroup(k, tuple(range(start, start + GADGET_SIZE)), ancillary))
    return Max2SatFormula(n, n + f.num_clauses, tuple(clauses), tuple(groups), original=f)


def write_max2sat(g: Max2SatFormula) -> str:
    """DIMACS text of the converted formula, tagged so groups can be rebuilt."""
    m = len(g.groups)
    cnf = CnfFormula(g.num_vars, g.clauses)
    return write_dimacs(cnf, comments=[f"{GADGET_TAG} {g.num_original_vars} {m}"])


def parse_max2sat(text: str) -> Max2SatFormula:
    """Inverse of :func:`write_max2sat`; checks every block against the gadget template."""
    tag = None
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 4 and parts[0] == "c" and parts[1] == GADGET_TAG:
            tag = (int(parts[2]), int(parts[3]))
            break
    if tag is None:
        raise CnfError(f"missing 'c {GADGET_TAG} N M' provenance line")
    n, m = tag
    cnf = parse_dimacs(text, strict=False)
    if cnf.num_vars != n + m or cnf.num_clauses != GADGET_SIZE * m:
        raise CnfError("sizes do not match the gadget provenance line")
    groups = []
    originals = []
    for k in range(m):
        block = cnf.clauses[GADGET_SIZE * k: GADGET_SIZE * (k + 1)]
        lits = tuple(block[i].literals[0] for i in range(3))
        if list(block) != gadget_clauses(lits, n + k + 1):
            raise CnfError(f"clause block {k} is not a gadget")
        originals.append(Clause(lits))
        groups.append(GadgetGroup(k, tuple(range(GADGET_SIZE * k, GADGET_SIZE * (k + 1))), n + k + 1))
    return Max2SatFormula(n, n + m, cnf.clauses, tuple(groups), original=CnfFormula(n, tuple(originals)))


@dataclass(frozen=True, eq=False)
class QuboModel:
    n: int
    Q: sp.csr_array
    b: np.ndarray
    c: float = 0.0
    source: Optional[Max2SatFormula] = field(default=None, repr=False)

    @classmethod
    def from_dense(cls, Q, b, c=0.0, source=None) -> "QuboModel":
        Q = np.asarray(Q, dtype=float)
        if not np.allclose(Q, Q.T) or np.any(np.diag(Q) != 0):
            raise ValueError("Q must be symmetric with zero diagonal")
        return cls(len(b), sp.csr_array(Q), np.asarray(b, dtype=float), float(c), source)

    @classmethod
    def zeros(cls, n: int, c: float = 0.0) -> "QuboModel":
        return cls(n, sp.csr_array((n, n)), np.zeros(n), float(c))


@dataclass(frozen=True, eq=False)
class IsingModel:
    n: int
    J: sp.csr_array
    h: np.ndarray
    offset: float = 0.0
    source: Optional[Max2SatFormula] = field(default=None, repr=False)

    @classmethod
    def from_dense(cls, J, h, offset=0.0, source=None) -> "IsingModel":
        J = np.asarray(J, dtype=float)
        if not np.allclose(J, J.T) or np.any(np.diag(J) != 0):
            raise ValueError("J must be symmetric with zero diagonal")
        return cls(len(h), sp.csr_array(J), np.asarray(h, dtype=float), float(offset), source)


def _symmetric(n, rows, cols, vals) -> sp.csr_array:
    r = np.array(rows + cols, dtype=np.int64)
    c = np.array(cols + rows, dtype=np.int64)
    v = np.array(vals + vals, dtype=float)
    mat = sp.coo_array((v, (r, c)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    return mat


def build_qubo(g: Max2SatFormula) -> QuboModel:
    n = g.num_vars
    rows, cols, vals = [], [], []
    b = np.zeros(n)
    c = 0.0
    for clause in g.clauses:
        if len(clause) == 2:
            (j1, v1), (j2, v2) = ((lit.variable - 1, lit.sign) for lit in clause)
            rows.append(j1)
            cols.append(j2)
            vals.append(2.0 * v1 * v2)
            b[j1] -= v1 * (1 + v2)
            b[j2] -= v2 * (1 + v1)
            c += (1 + v1) * (1 + v2) / 2
        else:
            (lit,) = clause.literals
            b[lit.variable - 1] -= 2 * lit.sign
            c += 1 + lit.sign
    return QuboModel(n, _symmetric(n, rows, cols, vals), b, c, source=g)


def build_ising(g: Max2SatFormula) -> IsingModel:
    n = g.num_vars
    rows, cols, vals = [], [], []
    h = np.zeros(n)
    offset = 0.0
    for clause in g.clauses:
        if len(clause) == 2:
            (j1, v1), (j2, v2) = ((lit.variable - 1, lit.sign) for lit in clause)
            rows.append(j1)
            cols.append(j2)
            vals.append(float(v1 * v2))
            h[j1] -= v1
            h[j2] -= v2
            offset += 0.25
        else:
            (lit,) = clause.literals
            h[lit.variable - 1] -= 2 * lit.sign
            offset += 0.5
    return IsingModel(n, _symmetric(n, rows, cols, vals), h, offset, source=g)


def qubo_to_ising(m: QuboModel) -> IsingModel:
    """Ising model with ``q(x) = 2 H(spins(x))`` for any QUBO model."""
    ones = np.ones(m.n)
    J = (m.Q / 2).tocsr()
    h = m.Q @ ones / 2 + m.b
    offset = (ones @ (m.Q @ ones) / 8 + m.b.sum() / 2 + m.c) / 2
    return IsingModel(m.n, J, h, float(offset), source=m.source)


def _check_len(vec, n):
    if len(vec) != n:
        raise LengthMismatch(f"vector of length {len(vec)} for a model of size {n}")


def qubo_objective(m: QuboModel, x) -> float:
    x = np.asarray(x, dtype=float)
    _check_len(x, m.n)
    return float(0.5 * x @ (m.Q @ x) + m.b @ x + m.c)


def ising_energy(m: IsingModel, s) -> float:
    s = np.asarray(s, dtype=float)
    _check_len(s, m.n)
    return float((0.5 * s @ (m.J @ s) + m.h @ s) / 4 + m.offset)


def spins_from_bits(x) -> np.ndarray:
    return 2 * np.asarray(x, dtype=np.int8) - 1


def bits_from_spins(s) -> np.ndarray:
    s = np.asarray(s)
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    return ((s + 1) // 2).astype(np.uint8)


def _fmt(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _export(header, n, mat, vec, vec_tag, const_tag, const) -> str:
    lines = [f"{header} {n}"]
    upper = sp.triu(mat, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    for k in order:
        lines.append(f"{upper.row[k] + 1} {upper.col[k] + 1} {_fmt(upper.data[k])}")
    for i in np.flatnonzero(vec):
        lines.append(f"{vec_tag} {i + 1} {_fmt(vec[i])}")
    lines.append(f"{const_tag} {_fmt(const)}")
    return "\n".join(lines) + "\n"


def export_qubo(m: QuboModel) -> str:
    return _export("qubo", m.n, m.Q, m.b, "b", "c", m.c)


def export_ising(m: IsingModel) -> str:
    return _export("ising", m.n, m.J, m.h, "h", "offset", m.offset)


def _parse_export(text: str, header: str, vec_tag: str, const_tag: str):
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != header or len(lines[0]) != 2:
        raise ValueError(f"expected '{header} <n>' header")
    n = int(lines[0][1])
    rows, cols, vals = [], [], []
    vec = np.zeros(n)
    const = None
    for parts in lines[1:]:
        if parts[0] == vec_tag:
            vec[int(parts[1]) - 1] = float(parts[2])
        elif parts[0] == const_tag:
            const = float(parts[1])
        else:
            i, j = int(parts[0]), int(parts[1])
            if not i < j:
                raise ValueError(f"coupling line needs i < j: {' '.join(parts)}")
            rows.append(i - 1)
            cols.append(j - 1)
            vals.append(float(parts[2]))
    if const is None:
        raise ValueError(f"missing '{const_tag}' line")
    return n, _symmetric(n, rows, cols, vals), vec, const


def parse_qubo(text: str) -> QuboModel:
    n, Q, b, c = _parse_export(text, "qubo", "b", "c")
    return QuboModel(n, Q, b, c)


def parse_ising(text: str) -> IsingModel:
    n, J, h, offset = _parse_export(text, "ising", "h", "offset")
    return IsingModel(n, J, h, offset)
