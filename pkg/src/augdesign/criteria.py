"""Design-selection criteria: D, D1, their efficiencies, Bayesian averages,
and the alpha-compromise between estimation and day-effect testing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .glm import InvalidPredictorError, ModelSpec, ParamPoint
from .information import (
    Design,
    InfoMatrix,
    MINUS_INF,
    augmented_info_entries,
    inv_quadratic_form,
    log_det,
)

NewRuns = Union[Design, np.ndarray, None]


class MissingCacheError(RuntimeError):
    """An efficiency was requested before the locally-optimal cache was built."""


@dataclass(frozen=True)
class Scenario:
    """One atom s = (g, z, beta, gamma) of the discrete prior."""

    spec: ModelSpec
    params: ParamPoint
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ValueError("scenario weight must be positive")
        if self.params.gamma is None:
            raise ValueError("a scenario requires a day-effect value")


@dataclass
class OptimalValues:
    """Cached criterion values at a scenario's locally optimal designs."""

    phi_d_at_d_opt: float
    phi_d1_at_d1_opt: float
    phi_d1_at_d_opt: float
    d_opt_design: Optional[Design] = None
    d1_opt_design: Optional[Design] = None


class ScenarioEnsemble:
    """Weighted finite scenario set sharing one fixed initial design.

    Precomputes each scenario's initial-day information block so that
    evaluating a candidate set of m new runs only adds m rank-1 terms.
    """

    def __init__(self, scenarios: list[Scenario], initial_design: Design, m: int):
        if not scenarios:
            raise ValueError("ensemble needs at least one scenario")
        if any(r.day != 0 for r in initial_design.runs):
            raise ValueError("initial design must be all day-0 runs")
        total = sum(s.weight for s in scenarios)
        self.scenarios = [
            Scenario(s.spec, s.params, s.weight / total) for s in scenarios
        ]
        self.initial_design = initial_design
        self.m = m
        self.cache: dict[int, OptimalValues] = {}
        coords = initial_design.coords
        days = np.zeros(len(initial_design))
        self._base = []
        for s in self.scenarios:
            self._base.append(
                augmented_info_entries(s.spec, s.params, coords, days)
            )

    def index_of(self, scenario: Scenario) -> int:
        for i, s in enumerate(self.scenarios):
            if s.spec is scenario.spec and s.params == scenario.params:
                return i
        raise KeyError("scenario does not belong to this ensemble")

    def augmented_entries(self, idx: int, new_coords: np.ndarray) -> np.ndarray:
        s = self.scenarios[idx]
        if new_coords.size == 0:
            return self._base[idx]
        days = np.ones(len(new_coords))
        add = augmented_info_entries(s.spec, s.params, new_coords, days)
        return self._base[idx] + add

    def set_optimal(self, idx: int, d_opt: Design, d1_opt: Design) -> None:
        """Populate the cache from explicit locally optimal designs."""
        s = self.scenarios[idx]
        vd = phi_D(s, d_opt, self)
        vd1 = phi_D1(s, d1_opt, self)
        vd1_at_d = phi_D1(s, d_opt, self)
        if vd <= 0 or vd1 <= 0 or vd1_at_d <= 0:
            raise ValueError("cached optimal values must be positive")
        self.cache[idx] = OptimalValues(vd, vd1, vd1_at_d, d_opt, d1_opt)

    def require_cache(self, idx: int) -> OptimalValues:
        if idx not in self.cache:
            raise MissingCacheError(
                f"no cached optimum for scenario {idx}; build the cache first"
            )
        return self.cache[idx]

    def to_dict(self) -> dict:
        return {
            "scenarios": [
                {
                    "model": s.spec.to_dict(),
                    "beta": list(s.params.beta),
                    "gamma": s.params.gamma,
                    "weight": s.weight,
                }
                for s in self.scenarios
            ],
            "m": self.m,
        }

    @staticmethod
    def from_dict(d: dict, initial_design: Design) -> "ScenarioEnsemble":
        scenarios = [
            Scenario(
                spec=ModelSpec.from_dict(item["model"]),
                params=ParamPoint(tuple(item["beta"]), item["gamma"]),
                weight=item["weight"],
            )
            for item in d["scenarios"]
        ]
        return ScenarioEnsemble(scenarios, initial_design, d["m"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _new_coords(new_runs: NewRuns) -> np.ndarray:
    if new_runs is None:
        return np.empty((0, 4))
    if isinstance(new_runs, Design):
        if any(r.day != 1 for r in new_runs.runs):
            raise ValueError("new runs must all carry day=1")
        return new_runs.coords
    arr = np.asarray(new_runs, dtype=float)
    return arr.reshape(-1, 4)


def phi_D(scenario: Scenario, new_runs: NewRuns, ensemble: ScenarioEnsemble) -> float:
    """|I((X1, X2), s)|^(1/(p+1)) with the day-effect column; 0 if infeasible."""
    idx = ensemble.index_of(scenario)
    coords = _new_coords(new_runs)
    try:
        entries = ensemble.augmented_entries(idx, coords)
    except InvalidPredictorError:
        return 0.0
    ld = log_det(InfoMatrix(entries))
    if ld == MINUS_INF:
        return 0.0
    return float(np.exp(ld / entries.shape[0]))


def phi_D1(scenario: Scenario, new_runs: NewRuns, ensemble: ScenarioEnsemble) -> float:
    """Inverse of the day-effect coordinate of I^{-1}; 0 if singular/infeasible."""
    idx = ensemble.index_of(scenario)
    coords = _new_coords(new_runs)
    try:
        entries = ensemble.augmented_entries(idx, coords)
    except InvalidPredictorError:
        return 0.0
    return inv_quadratic_form(InfoMatrix(entries), entries.shape[0] - 1)


def eff_D(scenario: Scenario, new_runs: NewRuns, ensemble: ScenarioEnsemble) -> float:
    idx = ensemble.index_of(scenario)
    opt = ensemble.require_cache(idx)
    return phi_D(scenario, new_runs, ensemble) / opt.phi_d_at_d_opt


def eff_D1(scenario: Scenario, new_runs: NewRuns, ensemble: ScenarioEnsemble) -> float:
    idx = ensemble.index_of(scenario)
    opt = ensemble.require_cache(idx)
    return phi_D1(scenario, new_runs, ensemble) / opt.phi_d1_at_d1_opt


def d1_ratio_vs_d_optimum(
    scenario: Scenario, new_runs: NewRuns, ensemble: ScenarioEnsemble
) -> float:
    """Phi_D1 of the candidate relative to Phi_D1 at the locally D-optimal design."""
    idx = ensemble.index_of(scenario)
    opt = ensemble.require_cache(idx)
    return phi_D1(scenario, new_runs, ensemble) / opt.phi_d1_at_d_opt


def phi_bayes(ensemble: ScenarioEnsemble, new_runs: NewRuns, flavor: str) -> float:
    """Weighted average of per-scenario efficiencies over the ensemble."""
    if flavor not in ("D", "D1"):
        raise ValueError("flavor must be 'D' or 'D1'")
    eff = eff_D if flavor == "D" else eff_D1
    return sum(
        s.weight * eff(s, new_runs, ensemble) for s in ensemble.scenarios
    )


def phi_compromise(
    ensemble: ScenarioEnsemble, new_runs: NewRuns, alpha: float
) -> float:
    """alpha * Phi_B + (1 - alpha) * Phi_B1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * phi_bayes(ensemble, new_runs, "D") + (1.0 - alpha) * phi_bayes(
        ensemble, new_runs, "D1"
    )
