"""Command-line entry point.

    lipopt run --config exp.json [--out DIR]
    lipopt compare [--config exp.json | --function NAME ...] --out DIR
    lipopt minimize --function NAME|EXPR [--domain lo:hi] --algo sugd --alpha A --tol T
                    [--k K | --estimate-k] [--epsilon E] [--trace out.csv]
    lipopt oracle --function NAME|EXPR [--domain lo:hi] [--grid N]

Exit codes: 0 success, 2 usage/config error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import baselines as bl
from .benchfns import BENCHMARK_FUNCTIONS, grid_oracle
from .core import Interval, estimate_lipschitz
from .emit import OutputError, emit_all, emit_trace_csv, render_table
from .errors import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, InvalidConfig, LipoptError
from .harness import (
    DEFAULT_ORACLE_N,
    ExperimentConfig,
    default_comparison,
    output_dir_for,
    resolve_objective,
    run_experiment,
)
from .sugd import SuGDConfig, sugd_run

log = logging.getLogger("lipopt")


def _domain(text: Optional[str]) -> Optional[Interval]:
    return Interval.parse(text) if text else None


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if getattr(args, "domain", None):
        changes["domain"] = _domain(args.domain)
    if getattr(args, "oracle_n", None):
        changes["oracle_n"] = args.oracle_n
    if getattr(args, "jobs", None):
        changes["jobs"] = args.jobs
    return replace(cfg, **changes) if changes else cfg


def _run_and_emit(cfg: ExperimentConfig, out_dir: str, formats) -> int:
    report = run_experiment(cfg)
    emit_all(report, out_dir, formats)
    if "table" in formats:
        sys.stdout.write(render_table(report))
    for a in report.algorithms:
        if a.error:
            log.error("%s failed: %s", a.label, a.error)
    return EXIT_OK if report.ok else EXIT_NUMERIC


def cmd_run(args) -> int:
    cfg = _apply_overrides(ExperimentConfig.load(args.config), args)
    return _run_and_emit(cfg, output_dir_for(cfg, args.out), cfg.emit)


def cmd_compare(args) -> int:
    if args.config:
        if args.function:
            raise InvalidConfig("give either --config or --function, not both")
        configs = [_apply_overrides(ExperimentConfig.load(args.config), args)]
    else:
        names = args.function or list(BENCHMARK_FUNCTIONS)
        configs = [
            _apply_overrides(default_comparison(name, baseline_lr=args.lr, baseline_iters=args.max_iters), args)
            for name in names
        ]
    status = EXIT_OK
    for cfg in configs:
        out = output_dir_for(cfg, args.out)
        status = max(status, _run_and_emit(cfg, out, ("csv", "json", "svg", "table")))
    return status


def cmd_minimize(args) -> int:
    f, domain, default_x0, _ = resolve_objective(args.function, _domain(args.domain))
    if args.algo == "sugd":
        k = args.k
        estimated = False
        if args.estimate_k:
            k = estimate_lipschitz(f.fresh(), domain, args.k_samples, args.k_safety).k_hat
            estimated = True
        cfg = SuGDConfig(alpha=args.alpha, tol=args.tol, max_iters=args.max_iters,
                         lipschitz=k, epsilon_target=args.epsilon, force=args.force)
        result, trace = sugd_run(f, domain, cfg)
        out = {
            "algorithm": "SuGD",
            "x_min": result.x_min,
            "f_min": result.f_min,
            "x_best_seen": result.x_best_seen,
            "f_best_seen": result.f_best_seen,
            "iters": result.iters,
            "evals": result.evals,
            "termination": result.termination,
            "alpha": result.alpha,
            "lipschitz": k,
            "k_estimated": estimated,
        }
    else:
        kind = {k.lower(): k for k in bl.KINDS}[args.algo]
        cfg = bl.BaselineConfig(kind=kind, lr=args.lr,
                                max_iters=args.max_iters or 100_000,
                                fd_scheme=args.grad)
        x0 = default_x0 if args.x0 is None else args.x0
        result, trace = bl.baseline_run(f, domain, x0, cfg)
        out = {
            "algorithm": kind,
            "x0": x0,
            "x_min": result.x,
            "f_min": result.f_x,
            "iters": result.iters,
            "evals": result.evals,
            "termination": result.termination,
        }
    if args.trace:
        emit_trace_csv(trace, args.trace)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_oracle(args) -> int:
    f, domain, _, _ = resolve_objective(args.function, _domain(args.domain))
    res = grid_oracle(f, domain, args.grid, not args.no_refine)
    print(json.dumps({"function": args.function, "domain": [domain.lo, domain.hi],
                      "x_star": res.x_star, "f_star": res.f_star,
                      "grid_points": res.grid_points, "refined": res.refined}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lipopt", description="One-dimensional global minimization toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory (default: config, then $LIPOPT_OUT)")
    run.add_argument("--domain", help="override the config domain, lo:hi")
    run.add_argument("--oracle-n", type=int)
    run.add_argument("--jobs", type=int)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="SuGD vs. all baselines with CSV/SVG/table output")
    cmp_.add_argument("--config")
    cmp_.add_argument("--function", action="append",
                      help="registry name or expression; repeatable (default: f1 f2 f3)")
    cmp_.add_argument("--out")
    cmp_.add_argument("--domain")
    cmp_.add_argument("--oracle-n", type=int)
    cmp_.add_argument("--jobs", type=int)
    cmp_.add_argument("--lr", type=float, default=0.01, help="baseline learning rate")
    cmp_.add_argument("--max-iters", type=int, default=100_000, help="baseline iteration cap")
    cmp_.set_defaults(func=cmd_compare)

    mn = sub.add_parser("minimize", help="run a single optimizer")
    mn.add_argument("--function", required=True)
    mn.add_argument("--domain")
    mn.add_argument("--algo", default="sugd", choices=["sugd"] + [k.lower() for k in bl.KINDS])
    mn.add_argument("--alpha", type=float)
    mn.add_argument("--tol", type=float, default=1e-6)
    k_group = mn.add_mutually_exclusive_group()
    k_group.add_argument("--k", type=float, help="Lipschitz constant")
    k_group.add_argument("--estimate-k", action="store_true")
    mn.add_argument("--k-samples", type=int, default=10_001)
    mn.add_argument("--k-safety", type=float, default=1.5)
    mn.add_argument("--epsilon", type=float, help="target accuracy; derives alpha when --alpha is absent")
    mn.add_argument("--max-iters", type=int)
    mn.add_argument("--force", action="store_true", help="record bracket collapse instead of failing")
    mn.add_argument("--lr", type=float, default=0.01)
    mn.add_argument("--x0", type=float)
    mn.add_argument("--grad", default="central", choices=bl.GRAD_SOURCES)
    mn.add_argument("--trace", help="write the iterate trace to this CSV file")
    mn.set_defaults(func=cmd_minimize)

    orc = sub.add_parser("oracle", help="brute-force grid minimum")
    orc.add_argument("--function", required=True)
    orc.add_argument("--domain")
    orc.add_argument("--grid", type=int, default=DEFAULT_ORACLE_N)
    orc.add_argument("--no-refine", action="store_true")
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OutputError as exc:
        print(f"lipopt: {exc}", file=sys.stderr)
        return EXIT_IO
    except LipoptError as exc:
        print(f"lipopt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"lipopt: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
