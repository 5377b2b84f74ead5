"""Heuristic minimizers for QUBO models (sa, tabu, ga_ls) and Ising models (bsb)."""
from .core import (
    IndexOutOfRange,
    SolveReport,
    bsb_c0,
    default_tenure,
    flip_delta,
    lower_bound,
    solve,
    solve_bsb,
    solve_ga_local_search,
    solve_simulated_annealing,
    solve_tabu,
)
from .params import PRESETS, BadPopulation, BudgetZero, SolverParams, get_preset

__all__ = [
    "BadPopulation", "BudgetZero", "IndexOutOfRange", "PRESETS", "SolveReport",
    "SolverParams", "bsb_c0", "default_tenure", "flip_delta", "get_preset", "lower_bound", "solve", "solve_bsb",
    "solve_ga_local_search", "solve_simulated_annealing", "solve_tabu",
]
