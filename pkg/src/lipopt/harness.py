"""Experiment configuration, the multi-optimizer runner and its report.

Config files are single JSON documents::

    {
      "function": "f1",                 # registry name or expression in x
      "domain": [0, 10],                # optional for registry functions
      "algorithms": [
        {"sugd": {"alpha": 0.001, "tol": 1e-6}},
        {"sugd": {"epsilon_target": 1e-3, "estimate_k": true, "label": "sugd-theorem"}},
        {"baseline": {"kind": "Adam", "lr": 0.01, "x0": 1.0}}
      ],
      "oracle_n": 1000000,
      "oracle_refine": true,
      "output_dir": "out",
      "emit": ["csv", "json", "svg", "table"]
    }

Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Optional, Union

import numpy as np

from . import baselines as bl
from .benchfns import REGISTRY, OracleResult, grid_oracle, lookup
from .core import Interval, LipschitzEstimate, Objective, estimate_lipschitz
from .errors import InvalidConfig, LipoptError, UnknownFunction
from .expr import parse_expression
from .sugd import SuGDConfig, sugd_run

log = logging.getLogger(__name__)

EMIT_FORMATS = ("csv", "json", "svg", "table")
DEFAULT_ORACLE_N = 1_000_000
DEFAULT_OUTPUT_DIR = "lipopt-out"
LANDSCAPE_POINTS = 400

SUGD_KEYS = {"alpha", "tol", "max_iters", "lipschitz", "epsilon_target", "force",
             "estimate_k", "k_samples", "k_safety", "label"}
BASELINE_KEYS = set(bl.BaselineConfig.field_names()) | {"x0", "label"}
TOP_KEYS = {"function", "domain", "algorithms", "oracle_n", "oracle_refine",
            "output_dir", "emit", "jobs"}


@dataclass
class SuGDSpec:
    config: SuGDConfig
    estimate_k: bool = False
    k_samples: int = 10_001
    k_safety: float = 1.5
    label: str = "sugd"


@dataclass
class BaselineSpec:
    config: bl.BaselineConfig
    x0: Optional[float] = None
    label: str = ""

    def __post_init__(self) -> None:
        if not self.label:
            self.label = self.config.kind.lower()


AlgorithmSpec = Union[SuGDSpec, BaselineSpec]


@dataclass
class ExperimentConfig:
    function: str
    algorithms: list[AlgorithmSpec]
    domain: Optional[Interval] = None
    oracle_n: int = DEFAULT_ORACLE_N
    oracle_refine: bool = True
    output_dir: Optional[str] = None
    emit: tuple[str, ...] = ("csv", "json", "svg", "table")
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.algorithms:
            raise InvalidConfig("config needs at least one algorithm")
        if not self.emit:
            raise InvalidConfig("config needs at least one output format")
        bad = [e for e in self.emit if e not in EMIT_FORMATS]
        if bad:
            raise InvalidConfig(f"unknown output formats {bad}; use {EMIT_FORMATS}")
        labels = [a.label for a in self.algorithms]
        dupes = sorted({lbl for lbl in labels if labels.count(lbl) > 1})
        if dupes:
            raise InvalidConfig(f"algorithm labels must be unique, repeated: {dupes}")
        if not (isinstance(self.oracle_n, int) and self.oracle_n >= 2):
            raise InvalidConfig(f"oracle_n must be an integer >= 2, got {self.oracle_n!r}")
        if not (isinstance(self.jobs, int) and self.jobs >= 1):
            raise InvalidConfig(f"jobs must be a positive integer, got {self.jobs!r}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise InvalidConfig("config must be a JSON object")
        _reject_unknown(data, TOP_KEYS, "config")
        if "function" not in data:
            raise InvalidConfig("config is missing 'function'")
        algos = data.get("algorithms")
        if not isinstance(algos, list):
            raise InvalidConfig("'algorithms' must be a list")
        domain = data.get("domain")
        if domain is not None:
            domain = _parse_domain(domain)
        emit = data.get("emit", list(EMIT_FORMATS))
        if not isinstance(emit, list):
            raise InvalidConfig("'emit' must be a list")
        try:
            parsed = [_parse_algorithm(a, i) for i, a in enumerate(algos)]
        except TypeError as exc:
            raise InvalidConfig(f"bad algorithm parameter: {exc}") from exc
        return cls(
            function=str(data["function"]),
            algorithms=parsed,
            domain=domain,
            oracle_n=data.get("oracle_n", DEFAULT_ORACLE_N),
            oracle_refine=bool(data.get("oracle_refine", True)),
            output_dir=data.get("output_dir"),
            emit=tuple(emit),
            jobs=data.get("jobs", 1),
        )

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidConfig(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _reject_unknown(data: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise InvalidConfig(f"unknown key(s) in {where}: {unknown}; allowed: {sorted(allowed)}")


def _parse_domain(value: Any) -> Interval:
    if isinstance(value, str):
        return Interval.parse(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Interval(value[0], value[1])
    raise InvalidConfig(f"domain must be [lo, hi] or 'lo:hi', got {value!r}")


def _parse_algorithm(item: Any, index: int) -> AlgorithmSpec:
    where = f"algorithms[{index}]"
    if not (isinstance(item, dict) and len(item) == 1):
        raise InvalidConfig(f"{where} must be an object with a single 'sugd' or 'baseline' key")
    (kind, params), = item.items()
    if not isinstance(params, dict):
        raise InvalidConfig(f"{where}.{kind} must be an object")
    params = dict(params)
    if kind == "sugd":
        _reject_unknown(params, SUGD_KEYS, f"{where}.sugd")
        spec = SuGDSpec(
            config=SuGDConfig(**{k: params.pop(k) for k in list(params)
                                 if k in {"alpha", "tol", "max_iters", "lipschitz",
                                          "epsilon_target", "force"}}),
            **params,
        )
        if spec.estimate_k and spec.config.lipschitz is not None:
            raise InvalidConfig(f"{where}.sugd: give either 'lipschitz' or 'estimate_k', not both")
        return spec
    if kind == "baseline":
        _reject_unknown(params, BASELINE_KEYS, f"{where}.baseline")
        x0 = params.pop("x0", None)
        label = params.pop("label", "")
        return BaselineSpec(bl.BaselineConfig(**params), x0=x0, label=label)
    raise InvalidConfig(f"{where}: unknown algorithm type {kind!r}; use 'sugd' or 'baseline'")


def default_comparison(function: str, domain: Optional[Interval] = None,
                       baseline_lr: float = 0.01, baseline_iters: int = 100_000) -> ExperimentConfig:
    """SuGD against all six baselines with the documented defaults."""
    algos: list[AlgorithmSpec] = [SuGDSpec(SuGDConfig(alpha=1e-3, tol=1e-6))]
    for kind in bl.KINDS:
        algos.append(BaselineSpec(bl.BaselineConfig(kind=kind, lr=baseline_lr, max_iters=baseline_iters)))
    return ExperimentConfig(function=function, algorithms=algos, domain=domain)


# ---------------------------------------------------------------- resolution


def resolve_objective(function: str, domain: Optional[Interval]) -> tuple[Objective, Interval, float, bool]:
    """Registry lookup first, expression parsing second.

    Returns (objective, domain, default x0, from_registry).
    """
    if function in REGISTRY:
        entry = lookup(function)
        dom = domain or entry.default_domain
        return entry.objective(dom), dom, entry.default_x0, True
    if function.isidentifier() and function not in ("x", "pi", "e"):
        # bare word that is neither a registry entry nor a valid expression
        raise UnknownFunction(function, sorted(REGISTRY))
    ast = parse_expression(function)
    if domain is None:
        raise InvalidConfig(f"expression {function!r} needs an explicit domain")
    return Objective(ast.evaluate, name=function, domain=domain), domain, domain.lo, False


# -------------------------------------------------------------------- report


@dataclass
class AlgorithmReport:
    label: str
    algorithm: str
    params: dict[str, Any]
    x_min: Optional[float] = None
    f_min: Optional[float] = None
    gap: Optional[float] = None
    iters: Optional[int] = None
    evals: Optional[int] = None
    termination: Optional[str] = None
    converged: Optional[bool] = None
    x_best_seen: Optional[float] = None
    f_best_seen: Optional[float] = None
    k_estimated: Optional[bool] = None
    error: Optional[str] = None
    trace: Any = field(default=None, compare=False, repr=False)


@dataclass
class ExperimentReport:
    function: str
    domain: tuple[float, float]
    oracle: OracleResult
    algorithms: list[AlgorithmReport]
    landscape: Optional[tuple[list[float], list[float]]] = field(default=None, compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return all(a.error is None for a in self.algorithms)

    def to_dict(self) -> dict[str, Any]:
        algos = []
        for a in self.algorithms:
            algos.append({f.name: getattr(a, f.name) for f in fields(a) if f.name != "trace"})
        return {
            "function": self.function,
            "domain": list(self.domain),
            "oracle": asdict(self.oracle),
            "algorithms": algos,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentReport":
        return cls(
            function=data["function"],
            domain=tuple(data["domain"]),
            oracle=OracleResult(**data["oracle"]),
            algorithms=[AlgorithmReport(**a) for a in data["algorithms"]],
        )


def _sugd_params(cfg: SuGDConfig) -> dict[str, Any]:
    return {"alpha": cfg.alpha, "tol": cfg.tol, "max_iters": cfg.max_iters,
            "lipschitz": cfg.lipschitz, "epsilon_target": cfg.epsilon_target}


def _run_one(spec: AlgorithmSpec, base: Objective, domain: Interval, default_x0: float,
             f_star: float) -> AlgorithmReport:
    f = base.fresh()
    if isinstance(spec, SuGDSpec):
        rep = AlgorithmReport(label=spec.label, algorithm="SuGD", params=_sugd_params(spec.config))
        try:
            cfg = spec.config
            k_est: Optional[LipschitzEstimate] = None
            if spec.estimate_k:
                # estimation evaluations are not charged to the run
                k_est = estimate_lipschitz(base.fresh(), domain, spec.k_samples, spec.k_safety)
                cfg = SuGDConfig(cfg.alpha, cfg.tol, cfg.max_iters, k_est.k_hat,
                                 cfg.epsilon_target, cfg.force)
            resolved = cfg.resolve(domain)
            rep.params = _sugd_params(resolved)
            rep.k_estimated = k_est is not None
            result, trace = sugd_run(f, domain, resolved)
        except LipoptError as exc:
            rep.error = f"{type(exc).__name__}: {exc}"
            return rep
        rep.x_min, rep.f_min = result.x_min, result.f_min
        rep.x_best_seen, rep.f_best_seen = result.x_best_seen, result.f_best_seen
        rep.iters, rep.evals = result.iters, result.evals
        rep.termination, rep.converged = result.termination, result.converged
        rep.gap = result.f_min - f_star
        rep.trace = trace
        return rep

    x0 = default_x0 if spec.x0 is None else float(spec.x0)
    params = asdict(spec.config)
    params["x0"] = x0
    rep = AlgorithmReport(label=spec.label, algorithm=spec.config.kind, params=params)
    try:
        result, trace = bl.baseline_run(f, domain, x0, spec.config)
    except LipoptError as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        return rep
    rep.x_min, rep.f_min = result.x, result.f_x
    rep.iters, rep.evals = result.iters, result.evals
    rep.termination = result.termination
    rep.converged = result.termination == bl.GRAD_TOL
    rep.gap = result.f_x - f_star if math.isfinite(result.f_x) else None
    rep.trace = trace
    return rep


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Resolve the objective, compute the oracle and run every algorithm.

    Objective-resolution errors propagate. Errors inside one algorithm are
    recorded on its report entry and the others still run.
    """
    base, domain, default_x0, _ = resolve_objective(cfg.function, cfg.domain)
    oracle = grid_oracle(base.fresh(), domain, cfg.oracle_n, cfg.oracle_refine)
    log.info("oracle for %s on [%g, %g]: x*=%r f*=%r", cfg.function, domain.lo, domain.hi,
             oracle.x_star, oracle.f_star)

    def job(spec):
        return _run_one(spec, base, domain, default_x0, oracle.f_star)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(job, cfg.algorithms))
    else:
        reports = [job(spec) for spec in cfg.algorithms]

    xs = np.linspace(domain.lo, domain.hi, LANDSCAPE_POINTS)
    ys = base.fresh().eval_many(xs)
    return ExperimentReport(
        function=cfg.function,
        domain=(domain.lo, domain.hi),
        oracle=oracle,
        algorithms=reports,
        landscape=(xs.tolist(), ys.tolist()),
    )


def output_dir_for(cfg: ExperimentConfig, override: Optional[str] = None) -> str:
    return override or cfg.output_dir or os.environ.get("LIPOPT_OUT") or DEFAULT_OUTPUT_DIR
