"""Command-line interface: ``torusfit <command> [options]``.

Commands: fit, simulate, gof, compare, moments, heatmap, simstudy.

Exit codes
----------
0  success
1  bad input: unknown command or flag, parse error, domain error
2  internal error
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

from . import baselines
from .datasets import DATASETS, load_dataset
from .distributions import BgwgParams, BwgParams, pmf_table
from .errors import DomainError, ParseError
from .gof import PRESETS, auto_merge_groups, chisq_gof, flatten_row_major, parse_groups
from .inference import CountTable, FitOptions, fit_bgwg, fit_bwg
from .io import (
    _jsonable,
    emit_heatmap,
    fit_to_json,
    format_number,
    gof_to_json,
    parse_observations,
    read_count_table,
)
from .moments import jupp_mardia_rho1sq, trig_moments_brute
from .sampling import sample_joint
from .simulation import run_simulation_study
from .torus import TorusGrid

__all__ = ["main", "dispatch", "build_parser", "params_from_dict"]

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2
FAMILIES = ("bwg", "bgwg", "wc", "vms", "vmc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route that to exit code 1
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# shared helpers


def _add_data(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--data", type=Path, help="count-table CSV")
    g.add_argument("--observations", type=Path, help="two-column CSV of direction pairs")
    g.add_argument("--dataset", choices=DATASETS, help="embedded dataset")
    p.add_argument("--m1", type=int, default=16)
    p.add_argument("--m2", type=int, default=16)


def _add_params(p, family_default="bwg"):
    p.add_argument("--family", choices=("bwg", "bgwg"), default=family_default)
    p.add_argument("--m1", type=int, default=16)
    p.add_argument("--m2", type=int, default=16)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--delta", type=int, default=1)


def _add_output(p):
    p.add_argument("--output", "-o", type=Path, help="write here instead of stdout")


def _emit(args, text):
    if args.output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        args.output.write_text(text if text.endswith("\n") else text + "\n")


def _load_table(args):
    if args.dataset:
        return load_dataset(args.dataset).table
    if args.observations:
        summary = parse_observations(args.observations.read_text(), args.m1, args.m2)
        if summary.calm_dropped:
            print(f"dropped {summary.calm_dropped} calm rows", file=sys.stderr)
        return summary.table
    return read_count_table(args.data, args.m1, args.m2)


def _cli_params(args):
    grid = TorusGrid(args.m1, args.m2)
    cls = BwgParams if args.family == "bwg" else BgwgParams
    return cls(grid, args.alpha, args.beta, args.q, args.s, args.rho, args.delta)


def params_from_dict(family, grid, values):
    """Rebuild parameters from the ``params`` block of a fit JSON document."""
    if family == "bwg":
        return BwgParams(grid, int(values["alpha"]), int(values["beta"]), values["q"],
                         values["s"], values["rho"], int(values["delta"]))
    if family == "bgwg":
        return BgwgParams(grid, values["alpha"], values["beta"], values["q"], values["s"],
                          values["rho"], int(values["delta"]))
    return baselines.BaselineParams(
        family, grid, values["mu1"], values["mu2"], values["kappa1"], values["kappa2"],
        values["assoc"], method=values.get("method", "point"),
        subdivisions=int(values.get("subdivisions", baselines.SUBDIVISIONS)))


def _read_fit(path):
    try:
        doc = json.loads(Path(path).read_text())
        grid = TorusGrid(*doc["grid"])
        return params_from_dict(doc["family"], grid, doc["params"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: not a fit document ({exc})") from None


def _fit(table, family, options, method="point"):
    if family == "bwg":
        return fit_bwg(table, options)
    if family == "bgwg":
        return fit_bgwg(table, options)
    return baselines.fit_baseline(table, family, options, method)


def _fit_json(fit, grid, **extra):
    extra = {"grid": [grid.m1, grid.m2], **extra}
    if isinstance(fit.params, baselines.BaselineParams):
        extra["method"] = fit.params.method
    return fit_to_json(fit, **extra)


# ---------------------------------------------------------------------------
# commands


def cmd_fit(args):
    table = _load_table(args)
    opts = FitOptions(anchors=args.starts, compute_se=not args.no_se)
    fit = _fit(table, args.family, opts, args.method)
    _emit(args, _fit_json(fit, table.grid, n=table.n, seed=args.seed))


def cmd_simulate(args):
    batch = sample_joint(_cli_params(args), args.n, seed=args.seed)
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x1_index", "x2_index"])
    w.writerows(batch.indices.tolist())
    _emit(args, out.getvalue())


def _resolve_groups(spec, expected_flat):
    kind, _, rest = spec.partition(":")
    if kind == "preset":
        if rest not in PRESETS:
            raise DomainError(f"unknown preset {rest!r}; choose from {', '.join(PRESETS)}")
        return PRESETS[rest]
    if kind == "auto" and not rest:
        return auto_merge_groups(expected_flat)
    if kind == "file":
        return parse_groups(Path(rest).read_text())
    raise DomainError(f"cannot read --groups {spec!r}; use preset:<name>, auto or file:<path>")


def cmd_gof(args):
    groups = args.groups or (f"preset:{args.preset}" if args.preset else "auto")
    if args.data or args.observations or args.dataset:
        table = _load_table(args)
    elif args.preset in DATASETS:
        table = load_dataset(args.preset).table
    else:
        raise DomainError("gof needs --data, --observations or --dataset")
    if args.fit:
        params = _read_fit(args.fit)
        family = params.family
    else:
        family = args.family
        params = _fit(table, family, FitOptions(compute_se=False)).params
    p = params.table().p if hasattr(params, "table") else pmf_table(params).p
    chosen = _resolve_groups(groups, table.n * flatten_row_major(p))
    n_par = 6 if family in ("bwg", "bgwg") else 5
    report = chisq_gof(table, p, chosen, p_params=n_par, level=args.level)
    _emit(args, gof_to_json(report, family=family, reject=report.reject,
                            share_at_least_5=report.share_at_least_5))


def cmd_compare(args):
    table = _load_table(args)
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    bad = [f for f in families if f not in FAMILIES]
    if bad:
        raise DomainError(f"unknown families: {', '.join(bad)}")
    rows, _ = baselines.compare(table, families, FitOptions(anchors=args.starts,
                                                            compute_se=False), args.method)
    if args.format == "json":
        _emit(args, json.dumps(_jsonable([r.__dict__ for r in rows]), indent=2))
        return
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["rank", "family", "n_params", "loglik", "aic"])
    for r in rows:
        w.writerow([r.rank, r.family, r.n_params, format_number(r.loglik), format_number(r.aic)])
    _emit(args, out.getvalue())


def cmd_moments(args):
    params = _cli_params(args)
    doc = {"family": params.family, "grid": [params.m1, params.m2],
           "params": params.as_dict(), "moments": trig_moments_brute(params).as_dict()}
    try:
        doc["rho1sq"] = jupp_mardia_rho1sq(params)
    except DomainError as exc:
        doc["rho1sq"] = None
        doc["rho1sq_error"] = str(exc)
    _emit(args, json.dumps(_jsonable(doc), indent=2))


def cmd_heatmap(args):
    if args.fit:
        params = _read_fit(args.fit)
        table = params.table() if hasattr(params, "table") else pmf_table(params)
    elif args.data or args.observations or args.dataset:
        table = _load_table(args)
    else:
        table = pmf_table(_cli_params(args))
    _emit(args, emit_heatmap(table))


SIMSTUDY_KEYS = {"family", "m1", "m2", "alpha", "beta", "q", "s", "rho", "delta",
                 "sample_sizes", "replicates", "seed", "anchors"}


def cmd_simstudy(args):
    try:
        cfg = json.loads(args.config.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.config}: {exc.msg}", line=exc.lineno) from None
    if not isinstance(cfg, dict):
        raise ParseError(f"{args.config}: expected a JSON object")
    unknown = set(cfg) - SIMSTUDY_KEYS
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
    ns = argparse.Namespace(family=cfg.get("family", "bwg"), m1=cfg.get("m1", 5),
                            m2=cfg.get("m2", 6), alpha=cfg.get("alpha", 0),
                            beta=cfg.get("beta", 0), q=cfg["q"], s=cfg["s"],
                            rho=cfg["rho"], delta=cfg.get("delta", 1))
    if ns.family not in ("bwg", "bgwg"):
        raise DomainError("simstudy family must be bwg or bgwg")
    summary = run_simulation_study(
        _cli_params(ns), tuple(cfg.get("sample_sizes", (500,))),
        int(cfg.get("replicates", 200)), int(cfg.get("seed", 0)),
        FitOptions(anchors=int(cfg.get("anchors", 8))), workers=args.workers)
    _emit(args, summary.to_csv())


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser():
    parser = _Parser(prog="torusfit", description="Discrete bivariate circular models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="maximum-likelihood fit; writes FitResult JSON")
    _add_data(p)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--starts", type=int, default=8, help="location anchors per axis")
    p.add_argument("--seed", type=int, default=0, help="recorded in the output")
    p.add_argument("--method", choices=baselines.METHODS, default="point",
                   help="baseline discretisation")
    p.add_argument("--no-se", action="store_true", help="skip standard errors")
    _add_output(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="draw pairs; writes x1_index,x2_index CSV")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gof", help="Pearson chi-square test; writes GofReport JSON")
    _add_data(p, required=False)
    p.add_argument("--fit", type=Path, help="fit JSON; refit when omitted")
    p.add_argument("--family", choices=FAMILIES, default="bgwg")
    p.add_argument("--groups", help="preset:<name>, auto or file:<path>")
    p.add_argument("--preset", choices=tuple(PRESETS), help="same as --groups preset:<name>")
    p.add_argument("--level", type=float, default=0.05)
    _add_output(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("compare", help="AIC ranking across families")
    _add_data(p)
    p.add_argument("--families", default=",".join(FAMILIES))
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--method", choices=baselines.METHODS, default="point")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("moments", help="trigonometric moments and rho1^2; writes JSON")
    _add_params(p)
    _add_output(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("heatmap", help="long-format k,l,value CSV")
    _add_data(p, required=False)
    p.add_argument("--fit", type=Path, help="fit JSON")
    for name, default in (("--family", "bwg"), ("--alpha", 0.0), ("--beta", 0.0),
                          ("--q", 0.5), ("--s", 0.5), ("--rho", 0.0), ("--delta", 1)):
        kw = {"choices": ("bwg", "bgwg")} if name == "--family" else {"type": type(default)}
        p.add_argument(name, default=default, **kw)
    _add_output(p)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("simstudy", help="Monte Carlo study from a JSON config; writes CSV")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--workers", type=int, help="default: $TORUSFIT_THREADS, 0 = all CPUs")
    _add_output(p)
    p.set_defaults(func=cmd_simstudy)
    return parser


def dispatch(argv=None):
    """Run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ParseError, OSError, ValueError) as exc:
        print(f"torusfit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"torusfit: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
