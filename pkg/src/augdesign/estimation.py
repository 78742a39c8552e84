"""Gamma GLM fitting: Fisher scoring for the coefficients, profile maximum
likelihood for the shape parameter, standard errors, BIC, and prediction
summaries."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .glm import (
    GLOBAL_FACTORS,
    InvalidPredictorError,
    Link,
    MissingGammaError,
    ModelSpec,
    Run,
    regressor_matrix,
)

MAX_SCORING_ITERATIONS = 100
MAX_STEP_HALVINGS = 30

METRICS = ("mse", "rmse", "mae")


class DivergenceError(RuntimeError):
    """Fisher scoring failed to converge within the iteration budget."""


class RankDeficientError(ValueError):
    """The model matrix does not have full column rank."""


class PredictorOutOfDomainError(InvalidPredictorError):
    """A fitted linear predictor left the domain of the link inverse."""


@dataclass(frozen=True)
class Dataset:
    """Runs with one positive response value per run and response name."""

    runs: tuple[Run, ...]
    responses: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        n = len(self.runs)
        if n == 0:
            raise ValueError("a dataset needs at least one run")
        for name, values in self.responses.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"response {name!r} must have one value per run")
            if np.any(arr <= 0.0):
                raise ValueError(f"response {name!r} has nonpositive values")
            self.responses[name] = arr

    def __len__(self) -> int:
        return len(self.runs)

    @property
    def coords(self) -> np.ndarray:
        return np.array([r.coords for r in self.runs])

    @property
    def days(self) -> np.ndarray:
        return np.array([float(r.day) for r in self.runs])

    def concat(self, other: "Dataset") -> "Dataset":
        if set(self.responses) != set(other.responses):
            raise ValueError("datasets carry different response sets")
        merged = {
            name: np.concatenate([self.responses[name], other.responses[name]])
            for name in self.responses
        }
        return Dataset(self.runs + other.runs, merged)

    def to_csv(self) -> str:
        names = list(self.responses)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["run", *GLOBAL_FACTORS, "day", *names])
        for i, r in enumerate(self.runs):
            writer.writerow(
                [i + 1,
                 *(format(c, ".10g") for c in r.coords),
                 r.day,
                 *(format(self.responses[n][i], ".10g") for n in names)]
            )
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "Dataset":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            raise ValueError("empty dataset CSV")
        skip = {"run", "day", *GLOBAL_FACTORS}
        names = [f for f in reader.fieldnames if f not in skip]
        if not names:
            raise ValueError("dataset CSV has no response columns")
        runs, columns = [], {n: [] for n in names}
        for i, row in enumerate(reader, start=2):
            try:
                coords = tuple(float(row[f]) for f in GLOBAL_FACTORS)
                day = int(row.get("day", 0) or 0)
                for n in names:
                    columns[n].append(float(row[n]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"dataset CSV line {i}: {exc}") from exc
            runs.append(Run(coords, day))
        return Dataset(tuple(runs), {n: np.array(v) for n, v in columns.items()})


@dataclass(frozen=True)
class FittedModel:
    """A converged Gamma GLM fit plus its uncertainty summaries.

    ``std_errors`` and ``covariance`` cover the coefficient vector in the
    order (beta, gamma) when a day effect is included.
    """

    spec: ModelSpec
    beta_hat: tuple[float, ...]
    gamma_hat: Optional[float]
    nu_hat: float
    std_errors: tuple[float, ...]
    covariance: np.ndarray
    log_likelihood: float
    bic: float
    n: int

    @property
    def k(self) -> int:
        """Number of estimated parameters, including the shape."""
        return self.spec.p + 1 + (0 if self.gamma_hat is None else 1)

    def to_dict(self) -> dict:
        return {
            "model": self.spec.to_dict(),
            "beta_hat": list(self.beta_hat),
            "gamma_hat": self.gamma_hat,
            "nu_hat": self.nu_hat,
            "std_errors": list(self.std_errors),
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "log_likelihood": self.log_likelihood,
            "bic": self.bic,
            "n": self.n,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @staticmethod
    def from_dict(d: dict) -> "FittedModel":
        return FittedModel(
            spec=ModelSpec.from_dict(d["model"]),
            beta_hat=tuple(d["beta_hat"]),
            gamma_hat=d["gamma_hat"],
            nu_hat=d["nu_hat"],
            std_errors=tuple(d["std_errors"]),
            covariance=np.array(d["covariance"]),
            log_likelihood=d["log_likelihood"],
            bic=d["bic"],
            n=d["n"],
        )

    @staticmethod
    def from_json(text: str) -> "FittedModel":
        return FittedModel.from_dict(json.loads(text))


def gamma_log_likelihood(y: np.ndarray, mu: np.ndarray, nu: float) -> float:
    return float(
        np.sum(
            nu * math.log(nu)
            - gammaln(nu)
            + (nu - 1.0) * np.log(y)
            - nu * np.log(mu)
            - nu * y / mu
        )
    )


def _means(link: Link, eta: np.ndarray) -> np.ndarray:
    """Vectorized link inverse; raises when eta leaves the domain."""
    if link is Link.LOG:
        return np.exp(eta)
    if np.any(eta <= 0.0):
        bad = float(eta[eta <= 0.0][0])
        raise PredictorOutOfDomainError(
            f"{link.value} link requires positive predictors, got {bad}"
        )
    return eta if link is Link.IDENTITY else 1.0 / eta


def _kernel(link: Link, Z: np.ndarray, beta: np.ndarray, y: np.ndarray) -> float:
    """Gamma log-likelihood kernel at nu=1 (what scoring maximizes over beta)."""
    mu = _means(link, Z @ beta)
    return float(np.sum(-np.log(mu) - y / mu))


def _score_and_info(
    link: Link, Z: np.ndarray, beta: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    eta = Z @ beta
    mu = _means(link, eta)
    if link is Link.IDENTITY:
        dmu = np.ones_like(eta)
    elif link is Link.LOG:
        dmu = mu
    else:
        dmu = -mu * mu
    w = (dmu / mu) ** 2
    u = (y - mu) / (mu * mu) * dmu
    return Z.T @ u, (Z * w[:, None]).T @ Z


def _starting_point(link: Link, Z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """OLS on the link-transformed response; intercept-only fallback when the
    OLS start violates the eta > 0 domain."""
    if link is Link.IDENTITY:
        target = y
    elif link is Link.LOG:
        target = np.log(y)
    else:
        target = 1.0 / y
    beta = np.linalg.lstsq(Z, target, rcond=None)[0]
    if link is not Link.LOG and np.any(Z @ beta <= 0.0):
        beta = np.zeros(Z.shape[1])
        beta[0] = float(np.mean(target))
    return beta


def fit(
    spec: ModelSpec,
    data: Dataset,
    response: str,
    include_day_effect: bool = False,
) -> FittedModel:
    """Maximum-likelihood fit of a Gamma GLM to one response of a dataset.

    Coefficients come from Fisher scoring with step-halving; the shape
    parameter from a one-dimensional profile-likelihood search given the
    fitted means; standard errors from the inverse expected information
    evaluated at the estimates.  BIC counts the shape parameter.
    """
    if response not in data.responses:
        raise KeyError(f"dataset has no response {response!r}")
    y = data.responses[response]
    Z = regressor_matrix(spec, data.coords)
    if include_day_effect:
        Z = np.column_stack([Z, data.days])
    n, k = Z.shape
    if n < k + 1:
        raise RankDeficientError(f"{n} runs cannot identify {k} coefficients")
    if np.linalg.matrix_rank(Z) < k:
        raise RankDeficientError("model matrix is rank deficient")

    beta = _starting_point(spec.link, Z, y)
    try:
        current = _kernel(spec.link, Z, beta, y)
    except PredictorOutOfDomainError as exc:
        raise PredictorOutOfDomainError(
            f"no admissible starting point for response {response!r}: {exc}"
        ) from exc

    converged = False
    for _ in range(MAX_SCORING_ITERATIONS):
        score, info = _score_and_info(spec.link, Z, beta, y)
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError as exc:
            raise RankDeficientError(
                "expected information became singular during scoring"
            ) from exc
        scale = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            trial = beta + scale * step
            try:
                value = _kernel(spec.link, Z, trial, y)
            except PredictorOutOfDomainError:
                scale *= 0.5
                continue
            if value >= current - 1e-12 * (1.0 + abs(current)):
                break
            scale *= 0.5
        else:
            raise DivergenceError(
                f"step-halving exhausted while fitting response {response!r}"
            )
        moved = scale * float(np.max(np.abs(step)))
        beta, current = trial, value
        if moved < 1e-10 * (1.0 + float(np.max(np.abs(beta)))):
            converged = True
            break
    if not converged:
        raise DivergenceError(
            f"Fisher scoring did not converge for response {response!r}"
        )

    mu = _means(spec.link, Z @ beta)
    result = minimize_scalar(
        lambda t: -gamma_log_likelihood(y, mu, math.exp(t)),
        bounds=(-5.0, 14.0),
        method="bounded",
        options={"xatol": 1e-12},
    )
    nu = math.exp(result.x)
    ll = gamma_log_likelihood(y, mu, nu)

    _, info = _score_and_info(spec.link, Z, beta, y)
    covariance = np.linalg.inv(nu * info)
    std_errors = tuple(float(v) for v in np.sqrt(np.diag(covariance)))
    bic = -2.0 * ll + (k + 1) * math.log(n)

    if include_day_effect:
        beta_hat, gamma_hat = tuple(beta[:-1]), float(beta[-1])
    else:
        beta_hat, gamma_hat = tuple(beta), None
    return FittedModel(
        spec=spec,
        beta_hat=tuple(float(b) for b in beta_hat),
        gamma_hat=gamma_hat,
        nu_hat=float(nu),
        std_errors=std_errors,
        covariance=covariance,
        log_likelihood=ll,
        bic=float(bic),
        n=n,
    )


def predict(model: FittedModel, runs: Sequence[Run]) -> np.ndarray:
    """Fitted Gamma means at the given runs."""
    runs = tuple(runs)
    coords = np.array([r.coords for r in runs])
    days = np.array([float(r.day) for r in runs])
    if model.gamma_hat is None and np.any(days != 0.0):
        raise MissingGammaError("model has no day effect but a run has day=1")
    Z = regressor_matrix(model.spec, coords)
    eta = Z @ np.asarray(model.beta_hat)
    if model.gamma_hat is not None:
        eta = eta + days * model.gamma_hat
    return _means(model.spec.link, eta)


def prediction_error(
    model: FittedModel, data: Dataset, response: str, metric: str = "rmse"
) -> float:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    residuals = predict(model, data.runs) - data.responses[response]
    if metric == "mae":
        return float(np.mean(np.abs(residuals)))
    mse = float(np.mean(residuals * residuals))
    return mse if metric == "mse" else math.sqrt(mse)


def observed_efficiency(fit_a: FittedModel, fit_b: FittedModel) -> float:
    """Empirical D-efficiency of fit_a relative to fit_b.

    (det Cov_b / det Cov_a)^(1/dim) from the estimated coefficient
    covariance matrices; > 1 means fit_a is the more precise fit.
    """
    if fit_a.spec.to_dict() != fit_b.spec.to_dict():
        raise ValueError("fits must share the same model")
    if (fit_a.gamma_hat is None) != (fit_b.gamma_hat is None):
        raise ValueError("fits must share the day-effect structure")
    dim = fit_a.covariance.shape[0]
    sign_a, ld_a = np.linalg.slogdet(fit_a.covariance)
    sign_b, ld_b = np.linalg.slogdet(fit_b.covariance)
    if sign_a <= 0 or sign_b <= 0:
        raise RankDeficientError("covariance matrix is not positive definite")
    return float(math.exp((ld_b - ld_a) / dim))
