from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..reduction import (
    IsingModel,
    QuboModel,
    bits_from_spins,
    build_qubo,
    ising_energy,
    qubo_objective,
    qubo_to_ising,
)
from ..retrieval import RetrievalReport, retrieve
from . import _kernels
from .params import BadPopulation, BudgetZero, SolverParams


class IndexOutOfRange(IndexError):
    pass


@dataclass
class SolveReport:
    method: str
    seed: int
    best_bits: np.ndarray
    objective: float
    max2sat_violated: Optional[int]
    retrieval: Optional[RetrievalReport]
    iterations_used: int
    wall_time_ms: float
    trace: list = field(default_factory=list)

    @property
    def original_counts(self) -> Optional[tuple[int, int]]:
        """``(violated, satisfied)`` of the original 3-SAT formula, counted directly."""
        return self.retrieval.oracle if self.retrieval else None

    @property
    def original_violated(self) -> Optional[int]:
        return self.retrieval.oracle[0] if self.retrieval else None

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "method": self.method,
            "seed": self.seed,
            "objective": _num(self.objective),
            "max2sat_violated": self.max2sat_violated,
            "original_violated": self.original_violated,
            "original_satisfied": self.retrieval.oracle[1] if self.retrieval else None,
            "retrieval": self.retrieval.to_dict() if self.retrieval else None,
            "iterations_used": self.iterations_used,
            "best_bits": "".join(str(int(v)) for v in self.best_bits),
            "trace": [[int(i), _num(q)] for i, q in self.trace],
        }
        if timing:
            out["wall_time_ms"] = round(self.wall_time_ms, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _num(v: float):
    v = float(v)
    return int(v) if v.is_integer() else v


def flip_delta(m: QuboModel, x, variable: int) -> float:
    """``q(x with bit `variable` flipped) - q(x)``; ``variable`` is 1-based."""
    if not 1 <= variable <= m.n:
        raise IndexOutOfRange(f"variable {variable} outside 1..{m.n}")
    i = variable - 1
    x = np.asarray(x, dtype=float)
    row = slice(m.Q.indptr[i], m.Q.indptr[i + 1])
    field_i = m.b[i] + m.Q.data[row] @ x[m.Q.indices[row]]
    return float((1 - 2 * x[i]) * field_i)


def lower_bound(m: Union[QuboModel, IsingModel]) -> float:
    """A proven floor on the objective, or ``-inf`` when none is known.

    Each gadget group leaves at least 3 of its 10 clauses violated, so a
    gadget-built QUBO never goes below ``2 * 3 * M``; reaching it certifies
    that the original formula is satisfied.
    """
    g = m.source
    if g is not None and g.groups and len(g.groups) * 10 == g.num_clauses:
        return 6.0 * len(g.groups)
    return -math.inf


def _csr(m: QuboModel):
    Q = m.Q
    return (Q.indptr.astype(np.int64), Q.indices.astype(np.int64),
            Q.data.astype(np.float64), m.b.astype(np.float64), float(m.c))


def _kernel_seed(seed: int) -> int:
    return int(np.random.SeedSequence(seed).generate_state(1)[0])


def _deadline(p: SolverParams) -> float:
    if p.time_budget_ms is None:
        return math.inf
    return time.perf_counter() + p.time_budget_ms / 1000.0


def _target(m, p: SolverParams) -> float:
    return lower_bound(m) if p.target is None else float(p.target)


def _initial_bits(n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return (rng.random(n) < 0.5).astype(np.uint8)


def make_report(m, p: SolverParams, bits, used, start, trace) -> SolveReport:
    bits = np.asarray(bits, dtype=np.uint8)
    g = m.source
    if isinstance(m, QuboModel):
        objective = qubo_objective(m, bits)
    elif g is not None:
        objective = qubo_objective(build_qubo(g), bits)
    else:
        objective = 2.0 * ising_energy(m, 2.0 * bits - 1.0)
    violated = g.violated(bits) if g is not None else None
    retrieval = retrieve(g, bits) if g is not None and g.groups else None
    return SolveReport(
        method=p.method,
        seed=p.seed,
        best_bits=bits,
        objective=objective,
        max2sat_violated=violated,
        retrieval=retrieval,
        iterations_used=int(used),
        wall_time_ms=(time.perf_counter() - start) * 1000.0,
        trace=[(int(i), float(q)) for i, q in trace],
    )


def _trivial(m, p, start) -> SolveReport:
    return make_report(m, p, np.zeros(0, np.uint8), 0, start, [])


def solve_simulated_annealing(m: QuboModel, p: SolverParams) -> SolveReport:
    """Single-flip Metropolis annealing with geometric cooling.

    One iteration is one proposed flip of a uniformly random variable. The
    temperature is multiplied by ``cooling_ratio`` after every ``n``
    proposals; when the ratio is unset it is chosen so the schedule runs from
    ``t_initial`` to ``t_final`` over the whole budget.
    """
    start = time.perf_counter()
    if m.n == 0:
        return _trivial(m, p, start)
    sweeps = max(1, math.ceil(p.iteration_budget / m.n))
    ratio = p.cooling_ratio
    if ratio is None:
        ratio = (p.t_final / p.t_initial) ** (1.0 / max(1, sweeps - 1))
    x = _initial_bits(m.n, p.seed)
    best, _, used, ti, tq = _kernels.sa_run(
        *_csr(m), x, p.iteration_budget, p.t_initial, ratio, m.n,
        _kernel_seed(p.seed), _target(m, p), _deadline(p))
    return make_report(m, p, best, used, start, zip(ti, tq))


def default_tenure(n: int) -> int:
    return max(1, n // 2)


def solve_tabu(m: QuboModel, p: SolverParams) -> SolveReport:
    """Steepest admissible 1-flip tabu search; one iteration is one move."""
    start = time.perf_counter()
    if m.n == 0:
        return _trivial(m, p, start)
    tenure = default_tenure(m.n) if p.tabu_tenure is None else p.tabu_tenure
    x = _initial_bits(m.n, p.seed)
    best, _, used, ti, tq = _kernels.tabu_run(
        *_csr(m), x, p.iteration_budget, tenure, p.aspiration, _target(m, p), _deadline(p))
    return make_report(m, p, best, used, start, zip(ti, tq))


def solve_ga_local_search(m: QuboModel, p: SolverParams) -> SolveReport:
    """Genetic algorithm whose offspring are all improved to 1-flip local optima.

    Binary tournament selection, uniform crossover, per-bit mutation (default
    rate ``1/n``) and elitism. Each offspring first takes a tabu walk of
    ``ls_tabu_moves`` moves (default ``8 n``; 0 disables it), restarts from
    the best point of that walk and finishes with steepest 1-flip descent.
    Offspring identical to one already in the next generation are discarded.
    The budget is checked after every offspring, so a run may overshoot it by
    one local search; the initial population is always built in full.
    """
    start = time.perf_counter()
    if p.population < 2:
        raise BadPopulation(f"population must be >= 2, got {p.population}")
    if p.elitism >= p.population:
        raise BadPopulation("elitism must be smaller than the population")
    if m.n == 0:
        return _trivial(m, p, start)
    rate = 1.0 / m.n if p.mutation_rate is None else p.mutation_rate
    tenure = default_tenure(m.n) if p.tabu_tenure is None else p.tabu_tenure
    moves = 8 * m.n if p.ls_tabu_moves is None else p.ls_tabu_moves
    best, _, used, _, ti, tq = _kernels.ga_run(
        *_csr(m), m.n, p.population, p.crossover_rate, rate, p.elitism, moves, tenure,
        p.iteration_budget, _kernel_seed(p.seed), _target(m, p), _deadline(p))
    return make_report(m, p, best, used, start, zip(ti, tq))


def bsb_c0(J) -> float:
    """``0.5 / (sqrt(n) * rms)`` with the rms over off-diagonal couplings."""
    n = J.shape[0]
    if n < 2 or J.nnz == 0:
        return 0.5
    rms = math.sqrt(float((J.data ** 2).sum()) / (n * (n - 1)))
    return 0.5 / (math.sqrt(n) * rms)


def solve_bsb(m: IsingModel, p: SolverParams) -> SolveReport:
    """Ballistic simulated bifurcation.

    The integrator maximizes ``1/2 s^T J' s + h'^T s`` with ``J' = -J`` and
    ``h' = -h``, which minimizes the model energy. Positions start at zero,
    momenta uniformly in ``[-0.1, 0.1]``; ``a(t)`` ramps linearly from 0 to
    ``a0`` across ``iteration_budget`` steps. The spins ``sign(x)`` are
    sampled every ``max(1, steps // 100)`` steps and at the end; the
    lowest-energy sample is reported.
    """
    start = time.perf_counter()
    if isinstance(m, QuboModel):
        m = qubo_to_ising(m)
    n = m.n
    if n == 0:
        return _trivial(m, p, start)
    steps = p.iteration_budget
    Jp = (-m.J).tocsr()
    hp = -m.h
    c0 = bsb_c0(Jp) if p.c0 is None else p.c0
    rng = np.random.Generator(np.random.PCG64(p.seed))
    x = np.zeros(n)
    y = rng.uniform(-0.1, 0.1, n)
    every = max(1, steps // 100)
    best_s, best_e = None, math.inf
    trace = []
    deadline = _deadline(p)
    used = 0
    for k in range(steps):
        a = p.a0 * k / steps
        y += (-(p.a0 - a) * x + c0 * (Jp @ x + hp)) * p.dt
        x += p.a0 * y * p.dt
        wall = np.abs(x) > 1
        x[wall] = np.sign(x[wall])
        y[wall] = 0.0
        used = k + 1
        if used % every == 0 or used == steps:
            s = np.where(x >= 0, 1, -1)
            e = ising_energy(m, s)
            if e < best_e:
                best_e, best_s = e, s
                trace.append((used, 2.0 * e))
            if time.perf_counter() > deadline:
                break
    return make_report(m, p, bits_from_spins(best_s), used, start, trace)


SOLVERS = {
    "sa": solve_simulated_annealing,
    "tabu": solve_tabu,
    "ga_ls": solve_ga_local_search,
    "bsb": solve_bsb,
}


def solve(model, p: SolverParams) -> SolveReport:
    """Dispatch on ``p.method``; bit-based methods need a QuboModel."""
    if p.iteration_budget <= 0:
        raise BudgetZero("iteration_budget must be positive")
    if p.method != "bsb" and isinstance(model, IsingModel):
        raise TypeError(f"{p.method} works on QuboModel, got IsingModel")
    return SOLVERS[p.method](model, p)
