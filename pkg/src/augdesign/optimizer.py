"""Particle swarm search over the m-run design box, plus the cache builder
and the solvers for local, Bayesian, and compromise criteria."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .criteria import (
    Scenario,
    ScenarioEnsemble,
    phi_D,
    phi_D1,
    phi_bayes,
    phi_compromise,
)
from .glm import COORD_MAX, COORD_MIN, GLOBAL_FACTORS as COORD_NAMES
from .information import Design

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 100
    iterations: int = 1000
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    restarts: int = 5
    seed: int = 0
    tolerance: float = 1e-9
    stagnation_window: int = 100

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if not 0.0 < self.inertia < 1.0:
            raise ValueError("inertia must lie in (0, 1)")
        if self.cognitive <= 0 or self.social <= 0:
            raise ValueError("cognitive and social weights must be positive")
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be positive")

    def to_dict(self) -> dict:
        return {
            "swarm_size": self.swarm_size,
            "iterations": self.iterations,
            "inertia": self.inertia,
            "cognitive": self.cognitive,
            "social": self.social,
            "restarts": self.restarts,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "stagnation_window": self.stagnation_window,
        }

    @staticmethod
    def from_dict(d: dict) -> "PsoConfig":
        return PsoConfig(**d)


@dataclass
class SearchResult:
    """Outcome of one multi-restart swarm search.

    ``best_fragment`` is the winning point in the raw search space
    (m x search-dims); ``best_design`` holds the same runs in full
    4-factor coordinates, with inactive factors at 0.
    """

    best_design: Optional[Design]
    best_value: float
    history: tuple[tuple[float, ...], ...]
    evaluations: int
    best_fragment: Optional[np.ndarray] = None


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ODEX_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate(objective: Objective, positions: np.ndarray, m: int, dims: int,
              pool: Optional[ThreadPoolExecutor]) -> np.ndarray:
    fragments = positions.reshape(len(positions), m, dims)
    if pool is None:
        return np.array([objective(f) for f in fragments])
    return np.array(list(pool.map(objective, fragments)))


def _expand(fragment: np.ndarray, indices: tuple[int, ...]) -> np.ndarray:
    """Embed an (m, len(indices)) fragment into full 4-factor coordinates."""
    full = np.zeros((len(fragment), len(COORD_NAMES)))
    full[:, list(indices)] = fragment
    return full


def pso_maximize(
    objective: Objective,
    m: int,
    dims: int,
    config: PsoConfig,
    seeds: Sequence[np.ndarray] = (),
) -> SearchResult:
    """Global-best PSO over [-2, 2]^(m*dims).

    ``objective`` maps an (m, dims) fragment to a real value and must return
    0 (or -inf) for infeasible fragments.  ``seeds`` are fragments placed as
    initial particles in every restart.  All random draws happen on the main
    thread, so results are independent of evaluation parallelism.
    """
    if m < 1 or dims < 1:
        raise ValueError("m and dims must be positive")
    d = m * dims
    flat_seeds = [np.asarray(s, dtype=float).reshape(d) for s in seeds]
    if len(flat_seeds) > config.swarm_size:
        flat_seeds = flat_seeds[: config.swarm_size]

    threads = _thread_count()
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    span = COORD_MAX - COORD_MIN
    best_flat: Optional[np.ndarray] = None
    best_value = -np.inf
    histories: list[tuple[float, ...]] = []
    evaluations = 0
    try:
        for child in np.random.SeedSequence(config.seed).spawn(config.restarts):
            rng = np.random.default_rng(child)
            x = rng.uniform(COORD_MIN, COORD_MAX, size=(config.swarm_size, d))
            v = rng.uniform(-span, span, size=(config.swarm_size, d)) * 0.25
            for i, s in enumerate(flat_seeds):
                x[i] = s
                v[i] = 0.0

            values = _evaluate(objective, x, m, dims, pool)
            evaluations += len(values)
            pbest, pval = x.copy(), values.copy()
            g = int(np.argmax(pval))
            gbest, gval = pbest[g].copy(), float(pval[g])
            history = [gval]
            since_improvement = 0
            for _ in range(config.iterations):
                r1 = rng.uniform(size=(config.swarm_size, d))
                r2 = rng.uniform(size=(config.swarm_size, d))
                v = (
                    config.inertia * v
                    + config.cognitive * r1 * (pbest - x)
                    + config.social * r2 * (gbest - x)
                )
                x = x + v
                clamped = (x < COORD_MIN) | (x > COORD_MAX)
                np.clip(x, COORD_MIN, COORD_MAX, out=x)
                v[clamped] = 0.0

                values = _evaluate(objective, x, m, dims, pool)
                evaluations += len(values)
                improved = values > pval
                pbest[improved] = x[improved]
                pval[improved] = values[improved]
                g = int(np.argmax(pval))
                if float(pval[g]) > gval + config.tolerance:
                    since_improvement = 0
                else:
                    since_improvement += 1
                if float(pval[g]) > gval:
                    gbest, gval = pbest[g].copy(), float(pval[g])
                history.append(gval)
                if since_improvement >= config.stagnation_window:
                    break
            histories.append(tuple(history))
            if gval > best_value:
                best_value, best_flat = gval, gbest
    finally:
        if pool is not None:
            pool.shutdown()

    assert best_flat is not None
    fragment = best_flat.reshape(m, dims)
    recomputed = float(objective(fragment))
    design = None
    if dims == len(COORD_NAMES):
        design = Design.from_coords(fragment, day=1, label="pso")
    return SearchResult(design, recomputed, tuple(histories), evaluations, fragment)


def _published_seeds(m: int, indices: tuple[int, ...]) -> list[np.ndarray]:
    """Bundled 4-run designs restricted to the active factors, plus the
    center and an alternating-corner pattern — cheap lower-bound anchors."""
    dims = len(indices)
    seeds = [np.zeros((m, dims))]
    seeds.append(np.array(
        [[COORD_MAX if (i + j) % 2 == 0 else COORD_MIN for j in range(dims)]
         for i in range(m)]
    ))
    from .data import PUBLISHED_DESIGNS

    for design in PUBLISHED_DESIGNS.values():
        if len(design) == m:
            seeds.append(design.coords[:, list(indices)])
    return seeds


def solve_local(
    scenario: Scenario,
    initial_design: Design,
    m: int,
    flavor: str,
    config: PsoConfig,
) -> SearchResult:
    """Locally D- or D1-optimal m-run augmentation for one scenario.

    Searches only the scenario's active factors; inactive coordinates of the
    returned design are 0 (they do not enter the criterion).
    """
    if flavor not in ("D", "D1"):
        raise ValueError("flavor must be 'D' or 'D1'")
    if m == 0:
        return SearchResult(None, 0.0, ((0.0,),), 0)
    ensemble = ScenarioEnsemble([scenario], initial_design, m)
    indices = scenario.spec.global_indices
    phi = phi_D if flavor == "D" else phi_D1

    def objective(fragment: np.ndarray) -> float:
        return phi(scenario, _expand(fragment, indices), ensemble)

    seeds = _published_seeds(m, indices)
    result = pso_maximize(objective, m, len(indices), config, seeds)
    design = Design.from_coords(
        _expand(result.best_fragment, indices),
        day=1,
        label=f"local-{flavor}/{scenario.spec.name}",
    )
    result.best_design = design
    return result


def build_cache(ensemble: ScenarioEnsemble, config: PsoConfig) -> ScenarioEnsemble:
    """Populate the ensemble's locally-optimal-value cache by running both
    local searches for every scenario.  Returns the same ensemble."""
    for idx, scenario in enumerate(ensemble.scenarios):
        d_opt = solve_local(
            scenario, ensemble.initial_design, ensemble.m, "D", config
        ).best_design
        d1_opt = solve_local(
            scenario, ensemble.initial_design, ensemble.m, "D1", config
        ).best_design
        ensemble.set_optimal(idx, d_opt, d1_opt)
    return ensemble


def _solve_ensemble(
    ensemble: ScenarioEnsemble, objective: Objective, config: PsoConfig, label: str
) -> SearchResult:
    indices = tuple(range(len(COORD_NAMES)))
    seeds = _published_seeds(ensemble.m, indices)
    result = pso_maximize(objective, ensemble.m, len(indices), config, seeds)
    result.best_design = Design.from_coords(
        result.best_fragment, day=1, label=label
    )
    return result


def solve_bayes(
    ensemble: ScenarioEnsemble, flavor: str, config: PsoConfig
) -> SearchResult:
    """Maximize the weighted-average efficiency over the ensemble.

    Requires the locally-optimal cache (build_cache) for every scenario."""
    def objective(fragment: np.ndarray) -> float:
        return phi_bayes(ensemble, fragment, flavor)

    return _solve_ensemble(ensemble, objective, config, f"bayes-{flavor}")


def solve_compromise(
    ensemble: ScenarioEnsemble, alpha: float, config: PsoConfig
) -> SearchResult:
    """Maximize alpha * Phi_B + (1 - alpha) * Phi_B1 over the ensemble."""
    def objective(fragment: np.ndarray) -> float:
        return phi_compromise(ensemble, fragment, alpha)

    return _solve_ensemble(ensemble, objective, config, f"compromise-{alpha:g}")
