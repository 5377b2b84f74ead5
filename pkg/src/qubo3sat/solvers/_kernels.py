"""Compiled inner loops over a CSR-stored QUBO.

Every kernel keeps the local field ``g_i = b_i + sum_j Q_ij x_j`` so that the
flip delta ``(1 - 2 x_i) g_i`` is O(1) and a flip costs O(row length).
Random numbers come from numba's per-thread generator, seeded on entry.
"""
import time

import numpy as np
from numba import njit, objmode

EPS = 1e-9


@njit(cache=True)
def _now():
    with objmode(t="float64"):
        t = time.perf_counter()
    return t


@njit(cache=True)
def local_field(indptr, indices, data, b, x):
    n = x.size
    g = b.copy()
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        g[i] += acc
    return g


@njit(cache=True)
def objective_from_field(b, c, x, g):
    q = c
    for i in range(x.size):
        if x[i]:
            q += 0.5 * (b[i] + g[i])
    return q


@njit(cache=True)
def apply_flip(indptr, indices, data, x, g, i):
    step = 1.0 - 2.0 * x[i]
    x[i] = 1 - x[i]
    for k in range(indptr[i], indptr[i + 1]):
        g[indices[k]] += data[k] * step


@njit(cache=True)
def sa_run(indptr, indices, data, b, c, x, budget, t0, ratio, sweep, seed, target, deadline):
    np.random.seed(seed)
    n = x.size
    g = local_field(indptr, indices, data, b, x)
    q = objective_from_field(b, c, x, g)
    best_q = q
    best_x = x.copy()
    trace_it = [0]
    trace_q = [q]
    temp = t0
    used = 0
    while used < budget and best_q > target + EPS:
        for _ in range(sweep):
            if used >= budget:
                break
            i = np.random.randint(n)
            delta = (1.0 - 2.0 * x[i]) * g[i]
            used += 1
            if delta <= 0.0 or np.random.random() < np.exp(-delta / temp):
                apply_flip(indptr, indices, data, x, g, i)
                q += delta
                if q < best_q - EPS:
                    best_q = q
                    best_x[:] = x
                    trace_it.append(used)
                    trace_q.append(q)
                    if best_q <= target + EPS:
                        break
        temp *= ratio
        if _now() > deadline:
            break
    return best_x, best_q, used, np.array(trace_it), np.array(trace_q)


@njit(cache=True)
def tabu_run(indptr, indices, data, b, c, x, budget, tenure, aspiration, target, deadline):
    n = x.size
    g = local_field(indptr, indices, data, b, x)
    q = objective_from_field(b, c, x, g)
    best_q = q
    best_x = x.copy()
    trace_it = [0]
    trace_q = [q]
    tabu_until = np.zeros(n, np.int64)
    used = 0
    while used < budget and best_q > target + EPS:
        move = -1
        move_delta = np.inf
        for i in range(n):
            delta = (1.0 - 2.0 * x[i]) * g[i]
            if tabu_until[i] > used and not (aspiration and q + delta < best_q - EPS):
                continue
            if delta < move_delta - EPS:
                move_delta = delta
                move = i
        used += 1
        if move < 0:
            continue
        apply_flip(indptr, indices, data, x, g, move)
        q += move_delta
        tabu_until[move] = used + tenure
        if q < best_q - EPS:
            best_q = q
            best_x[:] = x
            trace_it.append(used)
            trace_q.append(q)
        if used % 256 == 0 and _now() > deadline:
            break
    return best_x, best_q, used, np.array(trace_it), np.array(trace_q)


@njit(cache=True)
def descend(indptr, indices, data, b, c, x):
    """Steepest 1-flip descent to a local optimum; lowest index wins ties.

    Returns ``(objective, flips)``.
    """
    n = x.size
    g = local_field(indptr, indices, data, b, x)
    q = objective_from_field(b, c, x, g)
    flips = 0
    while True:
        move = -1
        move_delta = -EPS
        for i in range(n):
            delta = (1.0 - 2.0 * x[i]) * g[i]
            if delta < move_delta:
                move_delta = delta
                move = i
        if move < 0:
            return q, flips
        apply_flip(indptr, indices, data, x, g, move)
        q += move_delta
        flips += 1


@njit(cache=True)
def tabu_improve(indptr, indices, data, b, c, x, moves, tenure, target):
    """Tabu walk of ``moves`` steps; ``x`` is left at the best point seen.

    Returns ``(objective, moves_used)``.
    """
    n = x.size
    g = local_field(indptr, indices, data, b, x)
    q = objective_from_field(b, c, x, g)
    best_q = q
    best_x = x.copy()
    tabu_until = np.zeros(n, np.int64)
    used = 0
    while used < moves and best_q > target + EPS:
        move = -1
        move_delta = np.inf
        for i in range(n):
            delta = (1.0 - 2.0 * x[i]) * g[i]
            if tabu_until[i] > used and not q + delta < best_q - EPS:
                continue
            if delta < move_delta - EPS:
                move_delta = delta
                move = i
        used += 1
        if move < 0:
            continue
        apply_flip(indptr, indices, data, x, g, move)
        q += move_delta
        tabu_until[move] = used + tenure
        if q < best_q - EPS:
            best_q = q
            best_x[:] = x
    x[:] = best_x
    return best_q, used


@njit(cache=True)
def improve(indptr, indices, data, b, c, x, moves, tenure, target):
    """Optional tabu walk, then steepest descent. Returns ``(objective, work)``."""
    work = x.size + 1
    if moves > 0:
        _, used = tabu_improve(indptr, indices, data, b, c, x, moves, tenure, target)
        work += used + x.size
    q, flips = descend(indptr, indices, data, b, c, x)
    return q, work + flips


@njit(cache=True)
def _tournament(fit):
    a = np.random.randint(fit.size)
    b = np.random.randint(fit.size)
    if fit[b] < fit[a] or (fit[b] == fit[a] and b < a):
        return b
    return a


@njit(cache=True)
def ga_run(indptr, indices, data, b, c, n, pop_size, cx_rate, mut_rate, elitism,
           ls_moves, tenure, budget, seed, target, deadline):
    """Generational GA; each offspring is improved to a 1-flip local optimum.

    Work is charged as ``n + 1`` per field rebuild plus one per flip or
    tabu move.
    """
    np.random.seed(seed)
    pop = np.empty((pop_size, n), np.uint8)
    fit = np.empty(pop_size)
    used = 0
    for p in range(pop_size):
        for i in range(n):
            pop[p, i] = 1 if np.random.random() < 0.5 else 0
        q, work = improve(indptr, indices, data, b, c, pop[p], ls_moves, tenure, target)
        fit[p] = q
        used += work
    best = np.argmin(fit)
    best_q = fit[best]
    best_x = pop[best].copy()
    trace_it = [used]
    trace_q = [best_q]
    generation = 0
    child = np.empty(n, np.uint8)
    while used < budget and best_q > target + EPS:
        order = np.argsort(fit, kind="mergesort")
        new_pop = np.empty_like(pop)
        new_fit = np.empty_like(fit)
        for e in range(elitism):
            new_pop[e] = pop[order[e]]
            new_fit[e] = fit[order[e]]
        slot = elitism
        while slot < pop_size:
            p1 = _tournament(fit)
            if np.random.random() < cx_rate:
                p2 = _tournament(fit)
                for i in range(n):
                    child[i] = pop[p1, i] if np.random.random() < 0.5 else pop[p2, i]
            else:
                child[:] = pop[p1]
            for i in range(n):
                if np.random.random() < mut_rate:
                    child[i] = 1 - child[i]
            q, work = improve(indptr, indices, data, b, c, child, ls_moves, tenure, target)
            used += work
            duplicate = False
            for s in range(slot):
                if new_fit[s] == q:
                    same = True
                    for i in range(n):
                        if new_pop[s, i] != child[i]:
                            same = False
                            break
                    if same:
                        duplicate = True
                        break
            if not duplicate:
                new_pop[slot] = child
                new_fit[slot] = q
                slot += 1
                if q < best_q - EPS:
                    best_q = q
                    best_x[:] = child
                    trace_it.append(used)
                    trace_q.append(q)
            if used >= budget or best_q <= target + EPS:
                break
        for s in range(slot, pop_size):
            new_pop[s] = pop[order[s]]
            new_fit[s] = fit[order[s]]
        pop = new_pop
        fit = new_fit
        generation += 1
        if _now() > deadline:
            break
    return best_x, best_q, used, generation, np.array(trace_it), np.array(trace_q)
