"""Command line front end.

Subcommands: check-tableau (order-condition report), moments (increment
law moment table), converge (weak-error CSV over a dyadic step range),
effort (effort/precision pairs for the same runs), trees (tree listing).

CSV output for a given configuration is byte-identical across runs and
worker counts: parallelism never changes any reported number, and floats
are always formatted in scientific notation with six significant digits.
Exit codes: 0 success, 1 usage or input error, 2 when every computed
record diverged.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import increments, trees, weak_mc
from .sde import get_problem
from .tableau import (TableauParseError, an3d1, check_stochastic_order,
                      load_tableau)

CSV_HEADER = ("method,problem,h,M,seed,mu_hat,sigma2_mu,ci_lo,ci_hi,"
              "effort_per_path,diverged_paths")


@dataclass
class RunConfig:
    """Parsed invocation; one subcommand plus its options."""

    command: str
    method: str = "an3d1"
    problem: str = "ex1"
    h_exponents: tuple = (1, 0, -1, -2, -3, -4)
    paths: int = 1_000_000
    seed: int = 0
    dist: str = "gaussian"
    threads: int = 1
    out: str | None = None
    tableau_file: str | None = None
    tol: float = 1e-9
    max_k: int = 8
    max_order: Fraction = Fraction(3)
    m: int = 1
    relevant: int | None = None


def _fmt(x) -> str:
    return f"{float(x):.5E}"


def _parse_h_range(text: str):
    try:
        a, b = text.split(":")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected exponent range A:B, got {text!r}") from None
    if lo < hi:
        raise argparse.ArgumentTypeError("range must be descending, e.g. 1:-4")
    return tuple(range(lo, hi - 1, -1))


def _default_threads() -> int:
    env = os.environ.get("SRKBENCH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srkbench",
        description="weak-approximation benchmarks for additive-noise SDE schemes")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_mc=True):
        p.add_argument("--out", metavar="FILE", default=None,
                       help="write output to FILE instead of stdout")
        if with_mc:
            p.add_argument("--method", default="an3d1",
                           help="an3d1, euler, exem, or tableau:<file>")
            p.add_argument("--problem", default="ex1", help="ex1, ex2 or ex3")
            p.add_argument("--h-exp", type=_parse_h_range, default=(1, 0, -1, -2, -3, -4),
                           metavar="A:B", help="dyadic step exponents, descending (default 1:-4)")
            p.add_argument("--paths", type=int, default=1_000_000, metavar="M",
                           help="Monte Carlo paths per estimate (default 1e6)")
            p.add_argument("--seed", type=int, default=0, help="master seed")
            p.add_argument("--dist", default="gaussian",
                           choices=sorted(("gaussian", "d3", "d5", "d7", "zero")),
                           help="increment law for the first driver block")
            p.add_argument("--threads", type=int, default=None,
                           help="worker threads (default SRKBENCH_THREADS or 1); "
                            "never affects results")

    p_check = sub.add_parser("check-tableau", help="verify order conditions")
    p_check.add_argument("--method", default="an3d1",
                         help="an3d1 or tableau:<file>")
    p_check.add_argument("--tableau", metavar="FILE", default=None,
                         help="coefficient file to check")
    p_check.add_argument("--tol", type=float, default=1e-9,
                         help="residual tolerance for order classification")
    add_common(p_check, with_mc=False)

    p_mom = sub.add_parser("moments", help="print an increment-law moment table")
    p_mom.add_argument("--dist", default="d7",
                       choices=sorted(("gaussian", "d3", "d5", "d7", "zero")))
    p_mom.add_argument("--max-k", type=int, default=8)
    add_common(p_mom, with_mc=False)

    p_conv = sub.add_parser("converge", help="weak-error table over a step range")
    add_common(p_conv)

    p_eff = sub.add_parser("effort", help="effort/precision pairs over a step range")
    add_common(p_eff)

    p_trees = sub.add_parser("trees", help="list colored rooted trees")
    p_trees.add_argument("--max-order", default="3",
                         help="order bound (integer or fraction like 5/2)")
    p_trees.add_argument("--m", type=int, default=1, help="number of noise colors")
    p_trees.add_argument("--relevant", type=int, default=None, metavar="P",
                         help="instead list the relevant f-rooted trees of order P")
    add_common(p_trees, with_mc=False)

    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in ("method", "problem", "paths", "seed", "dist", "out",
                 "tol", "max_k", "m", "relevant"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "h_exp"):
        cfg.h_exponents = args.h_exp
    if hasattr(args, "threads"):
        cfg.threads = args.threads if args.threads else _default_threads()
    if hasattr(args, "tableau") and args.tableau:
        cfg.tableau_file = args.tableau
    if hasattr(args, "max_order"):
        cfg.max_order = Fraction(args.max_order)
    return cfg


def _resolve_method_arg(cfg: RunConfig):
    """Map the --method string to something weak_mc understands."""
    if cfg.method.startswith("tableau:"):
        return _load_tableau_file(cfg.method[len("tableau:"):])
    if cfg.tableau_file:
        return _load_tableau_file(cfg.tableau_file)
    if cfg.method in ("an3d1", "euler", "exem"):
        return cfg.method
    raise ValueError(f"unknown method {cfg.method!r}")


def _load_tableau_file(path):
    text = Path(path).read_text()
    return load_tableau(text)


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_check_tableau(cfg: RunConfig):
    method = _resolve_method_arg(cfg) if (
        cfg.method.startswith("tableau:") or cfg.tableau_file) else an3d1()
    if method == "euler":
        from .tableau import euler_maruyama_tableau
        method = euler_maruyama_tableau()
    report = check_stochastic_order(method, tol=cfg.tol)
    lines = [
        f"tableau: {method.name} (s={method.s}, "
        f"{'explicit' if method.explicit else 'implicit'})",
        f"stochastic order: {report.stochastic_order}",
        f"deterministic order: {report.deterministic_order}",
        f"tolerance: {_fmt(report.tolerance)}",
        "residuals:",
    ]
    for key, value in report.residuals.items():
        lines.append(f"  {key}: {float(value):+.3E}")
    _emit(lines, cfg.out)
    return 0


def _run_moments(cfg: RunConfig):
    dist = increments.by_name(cfg.dist)
    lines = [f"distribution: {dist.name}", "k,moment,normal_moment,matches"]
    for k in range(cfg.max_k + 1):
        mk = dist.moment(k)
        nk = increments.GAUSSIAN.moment(k)
        lines.append(f"{k},{mk},{nk},{'yes' if mk == nk else 'no'}")
    _emit(lines, cfg.out)
    return 0


def _csv_row(rec) -> str:
    return ",".join([
        rec.method, rec.problem, _fmt(rec.h), str(rec.n_paths), str(rec.seed),
        _fmt(rec.mu_hat), _fmt(rec.sigma2_mu), _fmt(rec.ci_lo), _fmt(rec.ci_hi),
        _fmt(rec.effort_per_path), str(rec.n_diverged),
    ])


def _run_converge(cfg: RunConfig, effort_table=False):
    method = _resolve_method_arg(cfg)
    problem = get_problem(cfg.problem)
    dists = increments.distribution_pair(cfg.dist)
    h_list = [2.0 ** e for e in cfg.h_exponents]
    records, fitted = weak_mc.convergence_study(
        method, problem, h_list, cfg.paths, dists=dists, seed=cfg.seed,
        threads=cfg.threads)
    if effort_table:
        lines = ["method,problem,h,effort_per_path,abs_mu_hat"]
        for rec in records:
            lines.append(",".join([rec.method, rec.problem, _fmt(rec.h),
                                   _fmt(rec.effort_per_path), _fmt(abs(rec.mu_hat))]))
    else:
        lines = [CSV_HEADER]
        lines.extend(_csv_row(rec) for rec in records)
        lines.append(f"fitted_order,{_fmt(fitted) if fitted is not None else 'NA'}")
    _emit(lines, cfg.out)
    if records and all(rec.diverged for rec in records):
        return 2
    return 0


def _run_trees(cfg: RunConfig):
    if cfg.relevant is not None:
        ts = trees.relevant_f_trees(cfg.relevant, cfg.m)
        families = trees.shape_families(ts)
        lines = [f"{trees.format_tree(t)}  rho={trees.rho(t)}  beta={trees.density(t)}"
                 for t in ts]
        lines.append(f"trees: {len(ts)}  shape_families: {len(families)}")
    else:
        ts = trees.enumerate_tadd(cfg.max_order, cfg.m)
        lines = [f"{trees.format_tree(t)}  rho={trees.rho(t)}  alpha={trees.density(t)}"
                 for t in ts]
        lines.append(f"trees: {len(ts)}")
    _emit(lines, cfg.out)
    return 0


def run(cfg: RunConfig) -> int:
    """Execute one configuration; returns the process exit code."""
    handlers = {
        "check-tableau": _run_check_tableau,
        "moments": _run_moments,
        "converge": _run_converge,
        "effort": lambda c: _run_converge(c, effort_table=True),
        "trees": _run_trees,
    }
    return handlers[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the usage-error code
        return 0 if exc.code == 0 else 1
    try:
        cfg = _config_from_args(args)
        return run(cfg)
    except (ValueError, TableauParseError, OSError) as exc:
        print(f"srkbench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
