"""Fisher information matrices for augmented designs and their reductions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .glm import (
    GLOBAL_FACTORS,
    InvalidPredictorError,
    Link,
    MissingGammaError,
    ModelSpec,
    ParamPoint,
    Run,
    regressor_matrix,
)

MINUS_INF = float("-inf")

#: Relative pivot threshold below which a symmetric factorization is
#: treated as singular.  Separates structurally deficient designs from
#: mere ill-conditioning at the box corners.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class Design:
    """An ordered list of runs; may mix fixed day-0 and new day-1 runs."""

    runs: tuple[Run, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not self.runs:
            raise ValueError("a design must contain at least one run")

    def __len__(self) -> int:
        return len(self.runs)

    @property
    def coords(self) -> np.ndarray:
        return np.array([r.coords for r in self.runs])

    @property
    def days(self) -> np.ndarray:
        return np.array([r.day for r in self.runs])

    def split(self) -> tuple["Design | None", "Design | None"]:
        """Partition into the initial (day-0) and new (day-1) blocks."""
        first = tuple(r for r in self.runs if r.day == 0)
        second = tuple(r for r in self.runs if r.day == 1)
        return (
            Design(first, self.label + "/initial") if first else None,
            Design(second, self.label + "/new") if second else None,
        )

    def concat(self, other: "Design", label: str = "") -> "Design":
        return Design(self.runs + other.runs, label or self.label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["run", *GLOBAL_FACTORS, "day"])
        for i, r in enumerate(self.runs, start=1):
            writer.writerow([i, *(format(c, ".10g") for c in r.coords), r.day])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, label: str = "") -> "Design":
        reader = csv.DictReader(io.StringIO(text))
        runs = []
        for row in reader:
            coords = tuple(float(row[f]) for f in GLOBAL_FACTORS)
            day = int(row.get("day", 0) or 0)
            runs.append(Run(coords, day))
        return Design(tuple(runs), label)

    @staticmethod
    def from_coords(coords, day: int = 0, label: str = "") -> "Design":
        arr = np.atleast_2d(np.asarray(coords, dtype=float))
        return Design(tuple(Run(tuple(row), day) for row in arr), label)


@dataclass(frozen=True)
class InfoMatrix:
    """Symmetric positive-semidefinite information matrix."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _weights(link: Link, eta: np.ndarray) -> np.ndarray:
    if link is Link.LOG:
        return np.ones_like(eta)
    if np.any(eta <= 0.0):
        bad = float(eta[eta <= 0.0][0])
        raise InvalidPredictorError(
            f"{link.value} link requires positive predictors, got {bad}"
        )
    return 1.0 / (eta * eta)


def augmented_info_entries(
    spec: ModelSpec,
    params: ParamPoint,
    coords: np.ndarray,
    days: np.ndarray,
) -> np.ndarray:
    """Raw (p+1)x(p+1) information entries for given coordinates and day flags."""
    Z = regressor_matrix(spec, coords)
    beta = np.asarray(params.beta)
    eta = Z @ beta + days * params.gamma
    w = _weights(spec.link, eta)
    Zs = np.column_stack([Z, days.astype(float)])
    return (Zs * w[:, None]).T @ Zs


def fisher_info(
    spec: ModelSpec,
    params: ParamPoint,
    design: Design,
    with_day_effect: bool = True,
) -> InfoMatrix:
    """Fisher information of a design, optionally with the day-effect column.

    With the day effect the regressor is extended by the day flag and the
    weight is evaluated at z^T beta + t*gamma; without it, day flags are
    ignored and the plain p-dimensional information is returned.  The shape
    parameter is fixed to 1 (criteria are positively homogeneous in it).
    """
    if len(params.beta) != spec.p:
        raise ValueError("beta length must equal the spec's term count")
    coords = design.coords
    Z = regressor_matrix(spec, coords)
    beta = np.asarray(params.beta)
    if with_day_effect:
        if params.gamma is None:
            raise MissingGammaError("day-effect information requires gamma")
        days = design.days.astype(float)
        eta = Z @ beta + days * params.gamma
        Zs = np.column_stack([Z, days])
    else:
        eta = Z @ beta
        Zs = Z
    w = _weights(spec.link, eta)
    entries = (Zs * w[:, None]).T @ Zs
    return InfoMatrix(entries)


def log_det(info: InfoMatrix, tol: float = SINGULAR_TOL) -> float:
    """Log determinant via Cholesky; -inf when numerically singular.

    A pivot is considered zero when its square falls below ``tol`` times
    the largest diagonal entry of the matrix.
    """
    a = info.entries
    scale = float(np.max(np.diag(a))) if a.size else 0.0
    if scale <= 0.0:
        return MINUS_INF
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return MINUS_INF
    piv = np.diag(chol)
    if np.min(piv * piv) < tol * scale:
        return MINUS_INF
    return 2.0 * float(np.sum(np.log(piv)))


def inv_quadratic_form(info: InfoMatrix, index: int) -> float:
    """(e^T I^{-1} e)^{-1} for the given coordinate, via one linear solve.

    Returns 0.0 when the matrix is singular (the criterion-zero signal).
    """
    a = info.entries
    n = a.shape[0]
    if not 0 <= index < n:
        raise IndexError(f"index {index} out of range for dim {n}")
    scale = float(np.max(np.diag(a))) if a.size else 0.0
    if scale <= 0.0:
        return 0.0
    try:
        cho = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError:
        return 0.0
    piv = np.diag(cho[0])
    if np.min(piv * piv) < SINGULAR_TOL * scale:
        return 0.0
    e = np.zeros(n)
    e[index] = 1.0
    q = float(e @ scipy.linalg.cho_solve(cho, e, check_finite=False))
    if q <= 0.0 or not math.isfinite(q):
        return 0.0
    return 1.0 / q
