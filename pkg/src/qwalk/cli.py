"""Command-line interface.

Subcommands: gen, hitting-time, search cg-prime, search interpolated, sweep,
fit. Exit codes: 0 success, 2 validation error, 3 numeric failure. Sweep
parallelism is capped by the QWALK_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .chains import load_chain, make_lazy, save_chain, validate_chain
from .cg_prime import run_cg_prime
from .errors import NotAperiodic, NumericError, ValidationError
from .graphs import FAMILIES, FamilySpec, generate
from .hitting import hitting_report
from .interpolated import PhaseRandomConfig, run_phase_random
from .sweep import SweepConfig, fit_scaling, read_csv_rows, run_sweep

_GEN_PARAMS = {
    "complete": ("n",),
    "cycle": ("n",),
    "torus": ("side", "d"),
    "hypercube": ("d",),
    "rook": ("n1", "n2"),
    "weighted_rook": ("n1", "n2", "p"),
    "random_reversible": ("n", "seed", "edge_prob"),
}


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args) -> int:
    params = {}
    for name in _GEN_PARAMS[args.family]:
        value = getattr(args, name.replace("-", "_"), None)
        if value is not None:
            params[name] = value
    chain = generate(FamilySpec(args.family, params), marked=args.marked or ())
    if args.lazy:
        chain = make_lazy(chain)
    elif not (np.diag(chain.p) > 0).any():
        try:
            validate_chain(chain.p, chain.marked)
        except NotAperiodic:
            print(
                "warning: chain is periodic and the loader will reject it; "
                "regenerate with --lazy",
                file=sys.stderr,
            )
    save_chain(chain, args.output)
    print(f"wrote {args.output} (n = {chain.n}, marked = {chain.marked_list})")
    return 0


def _cmd_hitting(args) -> int:
    chain = load_chain(args.chain)
    if args.lazy:
        chain = make_lazy(chain)
    report = hitting_report(chain, mc_samples=args.mc_samples, seed=args.seed)
    _emit(report.to_dict(), args.output)
    return 0


def _cmd_cg_prime(args) -> int:
    chain = load_chain(args.chain)
    w = args.marked
    if w is None:
        marked = chain.marked_list
        if len(marked) != 1:
            raise ValidationError(
                "cg-prime needs exactly one marked node (pass --marked or mark one in the file)"
            )
        w = marked[0]
    result, diag = run_cg_prime(chain, w, c=args.c)
    payload = result.to_dict()
    payload["diagnostics"] = {
        "epsilon_overlap": diag.epsilon_overlap,
        "mu": diag.mu,
        "coupling_norm_formula": diag.coupling_norm_formula,
        "coupling_norm_numeric": diag.coupling_norm_numeric,
        "gap": diag.gap,
        "condition_ratio": diag.condition_ratio,
        "s1": diag.s1,
        "s2": diag.s2,
    }
    _emit(payload, args.output)
    return 0


def _cmd_interpolated(args) -> int:
    chain = load_chain(args.chain)
    config = PhaseRandomConfig(
        epsilon_precision=args.epsilon,
        T=args.T,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
    )
    result = run_phase_random(chain, config)
    _emit(result.to_dict(), args.output)
    return 0


def _parse_param_overrides(pairs) -> dict:
    out = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise ValidationError(f"--param expects KEY=VALUE, got {pair!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    if args.sizes:
        data["sizes"] = args.sizes
    if args.marked is not None:
        data["marked"] = args.marked
    if args.param:
        data.setdefault("params", {}).update(_parse_param_overrides(args.param))
    config = SweepConfig.from_dict(data)
    rows = run_sweep(config, output=args.output)
    stem = args.output or config.output
    failures = [row for row in rows if row.error]
    for row in failures:
        print(f"point {row.values.get('size')}: {row.error}", file=sys.stderr)
    if stem:
        print(f"wrote {stem}.csv and {stem}.json ({len(rows)} rows)")
        if args.plot:
            from .figures import render_sweep_figures

            for path in render_sweep_figures(rows, config.algorithm, stem):
                print(f"wrote {path}")
    return 0


def _cmd_fit(args) -> int:
    rows = read_csv_rows(args.csv)
    exponent, r_squared = fit_scaling(rows, args.x, args.y)
    payload = {"x": args.x, "y": args.y, "exponent": exponent, "r_squared": r_squared}
    if args.plot:
        from .figures import render_fit_figure

        xs = [row[args.x] for row in rows if row.get(args.x) and row.get(args.y)]
        ys = [row[args.y] for row in rows if row.get(args.x) and row.get(args.y)]
        payload["figure"] = render_fit_figure(
            xs, ys, exponent, r_squared, args.x, args.y, args.plot
        )
    _emit(payload, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Quantum-walk search and Markov-chain hitting times at desk scale.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log notices")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a chain file for a graph family")
    gen.add_argument("--family", required=True, choices=sorted(FAMILIES))
    gen.add_argument("--n", type=int)
    gen.add_argument("--side", type=int)
    gen.add_argument("--d", type=int)
    gen.add_argument("--n1", type=int)
    gen.add_argument("--n2", type=int)
    gen.add_argument("--p", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--edge-prob", dest="edge_prob", type=float)
    gen.add_argument("--marked", type=int, nargs="*", help="0-based marked nodes")
    gen.add_argument("--lazy", action="store_true", help="apply (I+P)/2 before writing")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=_cmd_gen)

    hit = sub.add_parser("hitting-time", help="spectral hitting times for a chain file")
    hit.add_argument("--chain", required=True)
    hit.add_argument("--mc-samples", dest="mc_samples", type=int, default=0)
    hit.add_argument("--seed", type=int, default=0)
    hit.add_argument("--lazy", action="store_true")
    hit.add_argument("-o", "--output")
    hit.set_defaults(func=_cmd_hitting)

    search = sub.add_parser("search", help="run a search algorithm")
    search_sub = search.add_subparsers(dest="search_command", required=True)

    cgp = search_sub.add_parser("cg-prime", help="edge-walk search with oracle decoupling")
    cgp.add_argument("--chain", required=True)
    cgp.add_argument("--marked", type=int, help="marked node (default: from the file)")
    cgp.add_argument("--c", type=float, default=0.1, help="spectral-condition constant")
    cgp.add_argument("-o", "--output")
    cgp.set_defaults(func=_cmd_cg_prime)

    itp = search_sub.add_parser("interpolated", help="phase-randomized interpolated search")
    itp.add_argument("--chain", required=True)
    itp.add_argument("--epsilon", type=float, default=0.1)
    itp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    itp.add_argument("--samples", type=int, default=10_000)
    itp.add_argument("--seed", type=int, default=0)
    itp.add_argument("--T", type=float, default=None, help="override the scheduled time")
    itp.add_argument("-o", "--output")
    itp.set_defaults(func=_cmd_interpolated)

    swp = sub.add_parser("sweep", help="run a size-grid sweep from a JSON config")
    swp.add_argument("--config", required=True)
    swp.add_argument("--output", help="override the output stem from the config")
    swp.add_argument("--sizes", type=int, nargs="+", help="override the size grid")
    swp.add_argument("--marked", type=int, nargs="*", help="override the marked nodes")
    swp.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE",
        help="override an algorithm parameter (repeatable)",
    )
    swp.add_argument("--plot", action="store_true", help="render figures next to the CSV")
    swp.set_defaults(func=_cmd_sweep)

    fit = sub.add_parser("fit", help="log-log scaling exponent from a sweep CSV")
    fit.add_argument("--csv", required=True)
    fit.add_argument("--x", required=True)
    fit.add_argument("--y", required=True)
    fit.add_argument("--plot", help="write a fit figure to this path")
    fit.add_argument("-o", "--output")
    fit.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
