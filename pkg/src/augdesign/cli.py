"""Command-line interface: fit models, search designs, report efficiencies,
and score predictions, all runnable against the bundled experiment data."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data
from .criteria import (
    MissingCacheError,
    Scenario,
    ScenarioEnsemble,
    eff_D,
    eff_D1,
    phi_D,
    phi_D1,
)
from .estimation import (
    Dataset,
    DivergenceError,
    FittedModel,
    METRICS,
    PredictorOutOfDomainError,
    RankDeficientError,
    fit,
    predict,
    prediction_error,
)
from .glm import InvalidPredictorError, Link, ModelSpec, ParamPoint
from .information import Design
from .optimizer import (
    PsoConfig,
    build_cache,
    solve_bayes,
    solve_compromise,
    solve_local,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_FIT = 3
EXIT_CACHE = 4
EXIT_DIMENSION = 5
EXIT_DOMAIN = 6


class UsageError(Exception):
    pass


class DimensionError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _load_dataset(args) -> Dataset:
    if args.data:
        return Dataset.from_csv(_read(args.data))
    return data.ccd_dataset()


def _scenario_from_arg(value: str) -> Scenario:
    """A bundled response name, or a path to a scenario JSON
    {"model": ..., "beta": [...], "gamma": ...}."""
    if value in data.RESPONSES:
        return Scenario(data.MODELS[value], data.ESTIMATES[value], 1.0)
    d = json.loads(_read(value))
    return Scenario(
        ModelSpec.from_dict(d["model"]),
        ParamPoint(tuple(d["beta"]), d.get("gamma")),
        1.0,
    )


def _pso_config(args) -> PsoConfig:
    return PsoConfig(
        swarm_size=args.swarm,
        iterations=args.iters,
        restarts=args.restarts,
        seed=args.seed,
    )


def _add_pso_flags(parser) -> None:
    parser.add_argument("--swarm", type=int, default=100)
    parser.add_argument("--iters", type=int, default=1000)
    parser.add_argument("--restarts", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)


def cmd_fit(args) -> int:
    if args.bundled:
        spec = data.MODELS[args.bundled]
        response = args.bundled
    else:
        if not args.model or not args.response:
            raise UsageError("--model and --response are required without --bundled")
        spec = ModelSpec.from_dict(json.loads(_read(args.model)))
        response = args.response
    if args.link:
        spec = ModelSpec(spec.name, Link(args.link), spec.factors, spec.terms)
    dataset = _load_dataset(args)
    model = fit(spec, dataset, response, include_day_effect=args.day_effect)

    labels = [_term_label(spec, i) for i in range(spec.p)]
    estimates = list(model.beta_hat)
    if model.gamma_hat is not None:
        labels.append("day")
        estimates.append(model.gamma_hat)
    print(f"response: {response}   link: {spec.link.value}   n = {model.n}")
    for label, b, se in zip(labels, estimates, model.std_errors):
        print(f"  {label:<12} {b:14.4f}  ({se:.4f})")
    print(f"  shape nu     {model.nu_hat:14.4f}")
    print(f"  loglik {model.log_likelihood:.4f}   BIC {model.bic:.3f}")
    if args.out:
        _write(args.out, model.to_json())
    return EXIT_OK


def _term_label(spec: ModelSpec, i: int) -> str:
    from .glm import TermKind

    t = spec.terms[i]
    if t.kind is TermKind.INTERCEPT:
        return "intercept"
    if t.kind is TermKind.MAIN:
        return spec.factors[t.a]
    if t.kind is TermKind.SQUARE:
        return f"{spec.factors[t.a]}^2"
    return f"{spec.factors[t.a]}*{spec.factors[t.b]}"


def _report_efficiencies(ensemble: ScenarioEnsemble, design: Design) -> list[dict]:
    rows = []
    for s in ensemble.scenarios:
        rows.append(
            {
                "model": s.spec.name,
                "gamma": s.params.gamma,
                "eff_D": eff_D(s, design, ensemble),
                "eff_D1": eff_D1(s, design, ensemble),
            }
        )
    return rows


def cmd_design(args) -> int:
    config = _pso_config(args)
    if args.m == 0:
        print("warning: m=0 requested; empty design, criterion value 0")
        if args.out:
            _write(args.out, "run,L,K,D,FDV,day\n")
        return EXIT_OK

    if args.criterion in ("D", "D1"):
        names = args.models.split(",") if args.models else ["temperature"]
        if len(names) != 1:
            raise UsageError(f"criterion {args.criterion} takes exactly one model")
        scenario = _scenario_from_arg(names[0])
        result = solve_local(
            scenario, data.initial_design(), args.m, args.criterion, config
        )
        report = {"criterion": args.criterion, "value": result.best_value,
                  "evaluations": result.evaluations}
    else:
        names = args.models.split(",") if args.models else list(data.RESPONSES)
        if set(names) <= set(data.RESPONSES) and len(names) == len(data.RESPONSES):
            ensemble = data.model_ensemble(args.gammas, args.m)
        else:
            scenarios = [_scenario_from_arg(n) for n in names]
            ensemble = ScenarioEnsemble(scenarios, data.initial_design(), args.m)
        try:
            build_cache(ensemble, config)
            if args.criterion == "compromise":
                result = solve_compromise(ensemble, args.alpha, config)
            else:
                flavor = "D" if args.criterion == "bayesD" else "D1"
                result = solve_bayes(ensemble, flavor, config)
        except (MissingCacheError, ValueError) as exc:
            print(f"error: cache build failed: {exc}", file=sys.stderr)
            return EXIT_CACHE
        report = {
            "criterion": args.criterion,
            "value": result.best_value,
            "evaluations": result.evaluations,
            "per_scenario": _report_efficiencies(ensemble, result.best_design),
        }
        if args.criterion == "compromise":
            report["alpha"] = args.alpha

    csv_text = result.best_design.to_csv()
    print(csv_text, end="")
    print(f"criterion value: {result.best_value:.6g}")
    if args.out:
        _write(args.out, csv_text)
    if args.report:
        _write(args.report, json.dumps(report, indent=2))
    return EXIT_OK


def cmd_efficiency(args) -> int:
    scenario = _scenario_from_arg(args.model)
    design = Design.from_csv(_read(args.design))
    m = len(design)
    ensemble = ScenarioEnsemble([scenario], data.initial_design(), m)
    if args.relative_to:
        other = Design.from_csv(_read(args.relative_to))
        if len(other) != m:
            raise DimensionError(
                f"designs have different sizes: {m} vs {len(other)}"
            )
        phi = phi_D if args.flavor == "D" else phi_D1
        denom = phi(scenario, other, ensemble)
        if denom <= 0:
            raise DimensionError("comparison design has zero criterion value")
        ratio = phi(scenario, design, ensemble) / denom
        print(f"eff_{args.flavor} relative to {args.relative_to}: {100*ratio:.2f}%")
        return EXIT_OK
    build_cache(ensemble, _pso_config(args))
    eff = eff_D if args.flavor == "D" else eff_D1
    value = eff(scenario, design, ensemble)
    print(f"eff_{args.flavor} vs local optimum: {100*value:.2f}%")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = FittedModel.from_json(_read(args.model))
    dataset = Dataset.from_csv(_read(args.data)) if args.data else data.validation_dataset()
    response = args.response or model.spec.name
    if response not in dataset.responses:
        raise UsageError(f"dataset has no response {response!r}")
    observed = dataset.responses[response]
    predicted = predict(model, dataset.runs)
    print("run,observed,predicted,residual")
    for i, (o, p) in enumerate(zip(observed, predicted), start=1):
        print(f"{i},{o:.10g},{p:.10g},{p - o:.10g}")
    value = prediction_error(model, dataset, response, args.metric)
    print(f"{args.metric}: {value:.6g}")
    if args.out:
        lines = ["run,observed,predicted,residual"]
        lines += [
            f"{i},{o:.10g},{p:.10g},{p - o:.10g}"
            for i, (o, p) in enumerate(zip(observed, predicted), start=1)
        ]
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="augdesign")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a Gamma GLM to run data")
    p.add_argument("--bundled", choices=data.RESPONSES)
    p.add_argument("--data")
    p.add_argument("--model")
    p.add_argument("--response")
    p.add_argument("--link", choices=[l.value for l in Link])
    p.add_argument("--day-effect", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("design", help="search for an optimal augmentation design")
    p.add_argument("--criterion", required=True,
                   choices=["D", "D1", "bayesD", "bayesD1", "compromise"])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--models")
    p.add_argument("--gammas", choices=["fixed", "pm10", "pm10pm20"],
                   default="fixed")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--out")
    p.add_argument("--report")
    _add_pso_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("efficiency", help="evaluate a design against an optimum")
    p.add_argument("--design", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--relative-to")
    p.add_argument("--flavor", choices=["D", "D1"], default="D")
    _add_pso_flags(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("predict", help="score a fitted model on run data")
    p.add_argument("--model", required=True)
    p.add_argument("--data")
    p.add_argument("--response")
    p.add_argument("--metric", choices=list(METRICS), default="rmse")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PredictorOutOfDomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DivergenceError, RankDeficientError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except MissingCacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except DimensionError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except InvalidPredictorError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
