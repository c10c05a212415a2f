"""Command-line front end: every table and figure dataset, plus ad-hoc runs.

Subcommands: eigs, bounds, modes, solve, table2, fig2left, fig2right,
ordering.  Output goes to ``--out`` (stdout if omitted) as CSV with a
``#``-prefixed config echo, or as JSON ``{config, rows, provenance}``.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import report
from .bounds import decay_for, ordering_check, resolve_convention, rho, theorem3_bound
from .discretize import AssemblyError, GridError
from .fourier1d import SingularTraceSystem, build_mode_iteration
from .geometry import DIRICHLET_TRACE, BcPair, GeometryError, build_chain, robin_trace
from .schwarz import (
    DEFAULT_DELTA,
    DEFAULT_H,
    TABLE2_COLUMNS,
    TABLE2_N,
    RunConfig,
    SchwarzError,
    run_schwarz,
    table2_config,
)
from .spectral import RootFindingError, eigenmodes, find_root_k

log = logging.getLogger("schwarzscale")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _transmission(args):
    kind = getattr(args, "transmission", "dirichlet")
    return robin_trace(args.p) if kind == "robin" else DIRICHLET_TRACE


def _emit(args, rows, config, extra=None):
    config = {"command": args.command, **config}
    text = report.write(rows, config, args.out, args.format, seed=getattr(args, "seed", None), extra=extra)
    if args.out is None:
        sys.stdout.write(text)
    else:
        log.info("wrote %s", args.out)


def cmd_eigs(args):
    pair = BcPair.from_label(args.bc, args.q)
    rows = []
    for m in eigenmodes(pair, args.k_max):
        rows.append(dict(k=m.index, freq=m.freq, eigenvalue=m.eigenvalue, norm_const=m.norm_const))
    _emit(args, rows, dict(bc=pair.label, q=pair.q, k_max=args.k_max))


def cmd_bounds(args):
    conv = resolve_convention(args.convention)
    rows = []
    for label in ("DD", "DR", "DN", "RR", "NR", "NN"):
        b = theorem3_bound(label, args.delta, args.L, args.q, conv)
        rows.append(dict(bc=label, decay=b.decay, rho=b.value))
    _emit(args, rows, dict(delta=args.delta, L=args.L, q=args.q, convention=conv))


def cmd_modes(args):
    trans = _transmission(args)
    if args.lam is not None:
        lams = _floats(args.lam)
    else:
        lams = [m.eigenvalue for m in eigenmodes(BcPair.from_label(args.bc, args.q), args.k_max)]
    rows = []
    for n in _ints(args.N):
        chain = build_chain(n, args.L, args.delta)
        for lam in lams:
            radius = build_mode_iteration(chain, lam, trans).spectral_radius
            row = dict(N=n, lam=lam, radius=radius)
            for conv in ("paper", "sqrt"):
                bound = rho(decay_for(math.sqrt(lam), conv), args.delta, args.L)
                row[f"bound_{conv}"] = bound
                row[f"holds_{conv}"] = bool(radius <= bound + 1e-10)
            rows.append(row)
    _emit(args, rows, dict(L=args.L, delta=args.delta, transmission=str(trans), convention=resolve_convention(args.convention)))


def _run_config(args, n_sub=None) -> RunConfig:
    pair = BcPair.from_label(args.bc, args.q)
    grid = dict(h=args.h) if args.nx is None else dict(h=None, nx=args.nx, ny=args.ny)
    return RunConfig(
        n_sub if n_sub is not None else args.N,
        pair,
        _transmission(args),
        sub_len=args.L,
        half_overlap=args.delta,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        norm=args.norm,
        init_range=tuple(args.init_range),
        **grid,
    )


def cmd_solve(args):
    if args.nx is not None and args.ny is None:
        raise UsageError("--nx requires --ny")
    cfg = _run_config(args)
    rep = run_schwarz(cfg)
    rows = [dict(sweep=0, error=rep.initial_norm)]
    rows += [dict(sweep=i, error=e) for i, e in enumerate(rep.error_history, start=1)]
    summary = dict(
        iters=rep.count_label(), terminated=rep.terminated, observed_rho=rep.observed_rho
    )
    _emit(args, rows, {**cfg.describe(), **summary}, extra={"summary": summary})


def cmd_table2(args):
    columns = args.columns.split(",") if args.columns else list(TABLE2_COLUMNS)
    bad = [c for c in columns if c not in TABLE2_COLUMNS]
    if bad:
        raise UsageError(f"unknown column(s) {bad}; choose from {list(TABLE2_COLUMNS)}")
    overrides = dict(
        sub_len=args.L, tol=args.tol, max_iter=args.max_iter, seed=args.seed,
        norm=args.norm, init_range=tuple(args.init_range),
    )
    if args.delta is not None:
        overrides["half_overlap"] = args.delta
    cap = f">{args.max_iter}"
    rows, reports = [], []
    for n in _ints(args.N) if args.N else TABLE2_N:
        row = {"N": n}
        for col in columns:
            pair = []
            for trans in (DIRICHLET_TRACE, robin_trace(args.p)):
                cfg = table2_config(col, n, trans, grid=args.grid, **overrides)
                rep = run_schwarz(cfg)
                log.info("N=%d %s %s: %s", n, col, trans.method, rep.count_label())
                pair.append(rep)
                reports.append(
                    dict(
                        N=n, column=col, method=trans.method, iters=rep.iters,
                        exceeded=rep.exceeded, terminated=rep.terminated,
                        observed_rho=rep.observed_rho, initial_norm=rep.initial_norm,
                        error_history=rep.error_history,
                    )
                )
            row[col] = " - ".join(cap if r.exceeded else str(r.iters) for r in pair)
        rows.append(row)
    config = dict(
        L=args.L, h=DEFAULT_H if args.grid == "nx70" else None, grid=args.grid,
        delta=args.delta if args.delta is not None else (DEFAULT_DELTA if args.grid == "nx70" else 20 * DEFAULT_H),
        p=args.p, tol=args.tol, max_iter=args.max_iter, seed=args.seed, norm=args.norm,
        init_range=list(args.init_range),
    )
    if args.format == "json":
        _emit(args, rows, config, extra={"reports": reports})
        return
    _emit(args, rows, config)
    if args.out is not None:
        companion = Path(str(args.out) + ".reports.json")
        companion.write_text(report.to_json(reports, {"command": "table2", **config}, seed=args.seed))


def _q_grid(args) -> np.ndarray:
    if args.q_min <= 0 or args.q_max <= args.q_min or args.q_points < 2:
        raise UsageError("q grid must satisfy 0 < q-min < q-max and q-points >= 2")
    return np.logspace(math.log10(args.q_min), math.log10(args.q_max), args.q_points)


def cmd_fig2left(args):
    rows = []
    for q in _q_grid(args):
        try:
            rows.append(
                dict(q=float(q), mu1=find_root_k("DR", q, 1), nu1=find_root_k("NR", q, 1), tau1=find_root_k("RR", q, 1))
            )
        except RootFindingError as exc:
            raise RootFindingError(f"root finding failed at q={q!r}: {exc}") from exc
    _emit(args, rows, dict(q_min=args.q_min, q_max=args.q_max, q_points=args.q_points))


def cmd_fig2right(args):
    conv = resolve_convention(args.convention)
    dd = theorem3_bound("DD", args.delta, args.L, None, conv).value
    dn = theorem3_bound("DN", args.delta, args.L, None, conv).value
    rows = []
    for q in _q_grid(args):
        rows.append(
            dict(
                q=float(q),
                rho_DR=theorem3_bound("DR", args.delta, args.L, q, conv).value,
                rho_NR=theorem3_bound("NR", args.delta, args.L, q, conv).value,
                rho_DD=dd,
                rho_DN=dn,
                rho_RR=theorem3_bound("RR", args.delta, args.L, q, conv).value,
                convention=conv,
            )
        )
    _emit(args, rows, dict(delta=args.delta, L=args.L, convention=conv, q_min=args.q_min, q_max=args.q_max, q_points=args.q_points))


def cmd_ordering(args):
    conv = resolve_convention(args.convention)
    rows = []
    for delta in _floats(args.delta):
        for q in _floats(args.q):
            rep = ordering_check(delta, args.L, q, conv)
            for name, margin, ok in rep.checks:
                rows.append(dict(delta=delta, q=q, inequality=name, margin=margin, ok=bool(ok)))
    _emit(args, rows, dict(L=args.L, convention=conv, all_ok=all(r["ok"] for r in rows)))


def _add_common(p, out=True):
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--convention", choices=("paper", "sqrt", "auto"), default="auto")
    p.add_argument("--config", default=None, help="JSON file with option defaults; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_run(p, default_norm="l2_grid", default_init=(-1.0, 1.0)):
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--p", type=float, default=10.0, help="Robin transmission parameter (OSM)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=401)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--norm", choices=("l2_grid", "max"), default=default_norm)
    p.add_argument("--init-range", type=float, nargs=2, default=list(default_init), metavar=("LO", "HI"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schwarzscale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigs", help="eigenpairs of one external pair")
    _add_common(p)
    p.add_argument("--bc", default="DD")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--k-max", type=int, default=5)
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("bounds", help="contraction bounds of the six external pairs")
    _add_common(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--q", type=float, default=10.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("modes", help="exact 1D mode spectral radii vs. bounds")
    _add_common(p)
    p.add_argument("--N", default="5", help="one or more chain lengths, comma separated")
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--lam", default=None, help="eigenvalues, comma separated (default: from --bc)")
    p.add_argument("--bc", default="DD")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--transmission", choices=("dirichlet", "robin"), default="dirichlet")
    p.add_argument("--p", type=float, default=10.0)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("solve", help="one 2D Schwarz run")
    _add_common(p)
    _add_run(p)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--ny", type=int, default=None)
    p.add_argument("--bc", default="DD")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--transmission", choices=("dirichlet", "robin"), default="dirichlet")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table2", help="iteration counts of PSM and OSM against N")
    _add_common(p)
    _add_run(p, default_norm="max", default_init=(0.0, 1.0))
    p.add_argument("--N", default=None, help="chain lengths, comma separated (default 3,4,5,10,20,30,40,50)")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--columns", default=None, help="subset of " + ",".join(TABLE2_COLUMNS))
    p.add_argument("--grid", choices=("nx70", "nx90"), default="nx70")
    p.set_defaults(func=cmd_table2)

    for name, func, help_ in (
        ("fig2left", cmd_fig2left, "first eigenfrequencies against q"),
        ("fig2right", cmd_fig2right, "contraction bounds against q"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.add_argument("--q-min", type=float, default=1e-3)
        p.add_argument("--q-max", type=float, default=1e3)
        p.add_argument("--q-points", type=int, default=200)
        p.add_argument("--delta", type=float, default=0.1)
        p.add_argument("--L", type=float, default=1.0)
        p.set_defaults(func=func)

    p = sub.add_parser("ordering", help="check the strict orderings of the bounds")
    _add_common(p)
    p.add_argument("--delta", default="0.05,0.1,0.2")
    p.add_argument("--q", default="0.1,1,10,100")
    p.add_argument("--L", type=float, default=1.0)
    p.set_defaults(func=cmd_ordering)
    parser.subcommands = sub.choices
    return parser


def _apply_config_file(parser, argv):
    """Re-parse with defaults taken from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        values = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
    sub = parser.subcommands[args.command]
    known = {a.dest for a in sub._actions}
    unknown = [k for k in values if k.replace("-", "_") not in known]
    if unknown:
        raise UsageError(f"unknown config keys {unknown}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in values.items()})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s"
        )
        args.func(args)
    except (UsageError, GeometryError, GridError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RootFindingError, SchwarzError, AssemblyError, SingularTraceSystem, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
