"""3-SAT to Max 2-SAT / QUBO / Ising reductions, heuristic solvers and clause-count retrieval."""
from .cnf import (
    Clause,
    CnfFormula,
    Literal,
    evaluate_cnf,
    generate_random_3sat,
    parse_dimacs,
    read_dimacs,
    write_dimacs,
)
from .reduction import (
    IsingModel,
    Max2SatFormula,
    QuboModel,
    bits_from_spins,
    build_ising,
    build_qubo,
    export_ising,
    export_qubo,
    gadget_convert,
    ising_energy,
    qubo_objective,
    spins_from_bits,
)
from .retrieval import (
    GadgetObservation,
    RetrievalResult,
    classify_gadget_group,
    direct_counts,
    optimal_ancillaries,
    retrieve,
    retrieve_counts_d0,
    retrieve_counts_d1,
    retrieve_counts_mixed,
)
from .solvers import SolverParams, SolveReport, flip_delta, get_preset, solve

__version__ = "0.1.0"
