from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

METHODS = ("sa", "tabu", "ga_ls", "bsb")


class BudgetZero(ValueError):
    pass


class BadPopulation(ValueError):
    pass


@dataclass(frozen=True)
class SolverParams:
    """Settings for one solver run.

    ``iteration_budget`` is counted in single-bit flip equivalents for
    ``sa``/``tabu``/``ga_ls`` (see each solver) and in integration steps for
    ``bsb``. ``time_budget_ms`` adds a wall-clock cap, which makes results
    depend on machine speed; leave it unset for reproducible runs.
    """
    method: str = "ga_ls"
    seed: int = 0
    iteration_budget: int = 100_000
    time_budget_ms: Optional[float] = None
    # sa
    t_initial: float = 4.0
    t_final: float = 0.2
    cooling_ratio: Optional[float] = None
    # tabu
    tabu_tenure: Optional[int] = None
    aspiration: bool = True
    # ga_ls
    population: int = 16
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None
    elitism: int = 2
    ls_tabu_moves: Optional[int] = None
    # bsb
    dt: float = 1.0
    a0: float = 1.0
    c0: Optional[float] = None
    # shared: stop as soon as the best objective reaches this value
    target: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.iteration_budget <= 0:
            raise BudgetZero("iteration_budget must be positive")
        if self.time_budget_ms is not None and self.time_budget_ms <= 0:
            raise BudgetZero("time_budget_ms must be positive")
        for name in ("crossover_rate", "mutation_rate"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.cooling_ratio is not None and not 0.0 < self.cooling_ratio <= 1.0:
            raise ValueError("cooling_ratio must lie in (0, 1]")
        if self.t_initial <= 0 or self.t_final <= 0:
            raise ValueError("temperatures must be positive")
        if self.ls_tabu_moves is not None and self.ls_tabu_moves < 0:
            raise ValueError("ls_tabu_moves must be >= 0")
        if self.elitism < 0:
            raise ValueError("elitism must be >= 0")
        if self.dt <= 0 or self.a0 <= 0:
            raise ValueError("dt and a0 must be positive")

    def with_(self, **changes) -> "SolverParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverParams":
        data = dict(data)
        base = {}
        if "preset" in data:
            base = get_preset(data.pop("preset")).to_dict()
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown solver parameters: {sorted(unknown)}")
        base.update(data)
        return cls(**base)

    @classmethod
    def from_json(cls, text: str) -> "SolverParams":
        return cls.from_dict(json.loads(text))


PRESETS: dict[str, SolverParams] = {
    "default-sa": SolverParams(method="sa", iteration_budget=1_000_000),
    "default-tabu": SolverParams(method="tabu", iteration_budget=100_000),
    "default-ga_ls": SolverParams(method="ga_ls", iteration_budget=1_000_000),
    "default-bsb": SolverParams(method="bsb", iteration_budget=5000, dt=1.0),
    # 5000 iterations spanning a total evolution time of 20
    "paper-bsb": SolverParams(method="bsb", iteration_budget=5000, dt=20 / 5000),
    # 5000 iterations with a literal step size of 20
    "paper-bsb-dt20": SolverParams(method="bsb", iteration_budget=5000, dt=20.0),
}


def get_preset(name: str) -> SolverParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
