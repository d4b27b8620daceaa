"""The efl command line: batch solving, certification, hybrid search, plots.

Commands: solve | extremal | secretive | expelled | hybrid | complex-facets | plot.
All results are JSON on stdout (or --out PATH) with fixed field order and
floats capped at 12 significant digits; exit code 0 means the command ran
(an empty result is a valid outcome), 2 means invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import _kernels, instances
from .core import InputError
from .graphs import certify_extremal_structure
from .hybrid import (
    coloring_count,
    configuration_space_facets,
    chessboard_complex_facets,
    is_prime,
    lower_bound,
    search_favourable,
)
from .plotting import render_ternary
from .preferences import ExtremalInstance, default_eps, extremal_preferences
from .solver import SearchParams, find_certified_cut, sweep_envy_free

SCHEMA = instances.SCHEMA


def _jsonready(obj):
    """Round floats to 12 significant digits so serialization is reproducible."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _jsonready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonready(v) for v in obj]
    return obj


def _emit(doc, out_path):
    text = json.dumps(_jsonready(doc), indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_threads(flag_value):
    env = os.environ.get("EFL_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"EFL_THREADS must be an integer, got {env!r}") from exc
    return max(1, flag_value)


def _search_params(args, data=None, default_grid=None):
    file_params = (data or {}).get("params", {})
    grid = args.grid or file_params.get("grid") or default_grid
    if grid is None:
        raise InputError("no grid denominator: pass --grid or set params.grid")
    dedup = args.tol if args.tol is not None else file_params.get("dedup_tol")
    refine = args.refine if args.refine is not None else file_params.get("refine", 0)
    return SearchParams(
        grid_denominator=int(grid),
        dedup_tol=dedup,
        refine_levels=int(refine),
        threads=_resolve_threads(args.threads),
    )


def _params_doc(params, seed, extra=None):
    doc = {
        "grid": params.grid_denominator,
        "dedup_tol": params.dedup_tol,
        "refine": params.refine_levels,
        "threads": params.threads,
        "seed": seed,
        "backend": _kernels.active_backend(),
    }
    if extra:
        doc.update(extra)
    return doc


def _default_grid_for(r):
    """Smallest multiple of r at or above 24, so the all-equal cut is on grid."""
    return r * max(2, math.ceil(24 / r))


def _cmd_solve(args):
    data = instances.load_instance(args.instance)
    oracle = instances.build_oracle(data)
    params = _search_params(args, data, default_grid=_default_grid_for(oracle.arity))
    t0 = time.perf_counter()
    clusters = sweep_envy_free(oracle, params)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    divisions = [
        {"cut": list(c.cut.lengths), "allocation": list(a.tiles)}
        for c in clusters
        for a in c.allocations
    ]
    doc = {
        "schema": SCHEMA,
        "command": "solve",
        "params": _params_doc(params, args.seed),
        "cut_clusters": [
            {
                "cut": list(c.cut.lengths),
                "grid_hits": c.grid_hits,
                "allocation_count": len(c.allocations),
            }
            for c in clusters
        ],
        "divisions": divisions,
        "count": len(divisions),
        "runtime_ms": runtime_ms,
    }
    if not divisions:
        doc["warning"] = "no envy-free divisions found at this grid resolution"
    _emit(doc, args.out)
    return 0


def _cmd_extremal(args):
    if args.instance is not None:
        if args.r is not None:
            raise InputError("pass either an arity or --instance, not both")
        data = instances.load_instance(args.instance)
        oracle = instances.build_oracle(data)
        if oracle.players != oracle.arity:
            raise InputError("structure certification needs players == arity")
        extra = {"r": oracle.arity, "instance": args.instance}
        data_params = data
    elif args.r is not None:
        eps = tuple(args.eps) if args.eps else default_eps(args.r)
        oracle = extremal_preferences(ExtremalInstance(args.r, eps))
        extra = {"r": args.r, "eps": list(eps)}
        data_params = None
    else:
        raise InputError("pass an arity or --instance")
    params = _search_params(args, data_params, default_grid=_default_grid_for(oracle.arity))
    t0 = time.perf_counter()
    report = certify_extremal_structure(oracle, params)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    doc = {
        "schema": SCHEMA,
        "command": "extremal",
        "params": _params_doc(params, args.seed, extra),
        "report": report,
        "runtime_ms": runtime_ms,
    }
    _emit(doc, args.out)
    return 0


def _cmd_certify(args, mode):
    data = instances.load_instance(args.instance)
    oracle = instances.build_oracle(data)
    params = _search_params(args, data, default_grid=_default_grid_for(oracle.arity))
    t0 = time.perf_counter()
    found = find_certified_cut(oracle, mode, params)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    doc = {
        "schema": SCHEMA,
        "command": mode,
        "params": _params_doc(params, args.seed),
        "found": found is not None,
    }
    if found is None:
        doc["cut"] = None
        doc["families"] = []
        doc["warning"] = f"no {mode} cut certified at this grid resolution"
    else:
        cut, family = found
        doc["cut"] = list(cut.lengths)
        doc["families"] = [
            {"excluded": e, "map": [list(pair) for pair in m]}
            for e, m in zip(family.excluded, family.maps)
        ]
    doc["runtime_ms"] = runtime_ms
    _emit(doc, args.out)
    return 0


def _cmd_hybrid(args):
    data = instances.load_instance(args.instance)
    inst = instances.build_hybrid(data)
    tiles = args.tiles if args.tiles is not None else 2 * inst.p - 1
    params = _search_params(args, data, default_grid=_default_grid_for(tiles))
    t0 = time.perf_counter()
    found = search_favourable(inst, params, tiles=tiles)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    bound = lower_bound(inst.p)
    colorings = [coloring_count(d) for d in found] if tiles == 2 * inst.p - 1 else []
    doc = {
        "schema": SCHEMA,
        "command": "hybrid",
        "params": _params_doc(
            params,
            args.seed,
            {"p": inst.p, "tiles": tiles, "equi_tol": inst.resolved_equi_tol(params.grid_denominator)},
        ),
        "found": [
            {
                "cut": list(d.cut.lengths),
                "boxes": list(d.boxes.assignment),
                "matching": list(d.matching),
            }
            for d in found
        ],
        "count_distinct": len(found),
        "lower_bound": {
            "numerator": bound.numerator,
            "denominator": bound.denominator,
            "value": float(bound),
            "ceiling": math.ceil(bound),
        },
        "meets_bound": len(found) >= math.ceil(bound) if tiles == 2 * inst.p - 1 else None,
        "colorings_per_division": colorings,
        "runtime_ms": runtime_ms,
    }
    _emit(doc, args.out)
    return 0


def _cmd_complex_facets(args):
    p = args.p
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    t0 = time.perf_counter()
    big = len(chessboard_complex_facets(p, p - 1))
    small = len(chessboard_complex_facets(p, 1))
    join = configuration_space_facets(p)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    doc = {
        "schema": SCHEMA,
        "command": "complex-facets",
        "p": p,
        "chessboard_facets": {"rows_p_cols_p_minus_1": big, "rows_p_cols_1": small},
        "join_facets": join,
        "closed_form": math.factorial(p) ** 2 * p,
        "matches": join == math.factorial(p) ** 2 * p,
        "runtime_ms": runtime_ms,
    }
    _emit(doc, args.out)
    return 0


def _cmd_plot(args):
    data = instances.load_instance(args.instance)
    oracle = instances.build_oracle(data)
    if oracle.arity != 3 or oracle.players != 3:
        raise InputError("plot supports r=3 only")
    params = _search_params(args, data, default_grid=60)
    from .solver import find_envy_free_divisions

    divisions = find_envy_free_divisions(oracle, params)
    svg = render_ternary(oracle, divisions)
    with open(args.svg_out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    _emit(
        {
            "schema": SCHEMA,
            "command": "plot",
            "out": args.svg_out,
            "bytes": len(svg.encode("utf-8")),
            "markers": len(divisions),
        },
        args.out,
    )
    return 0


def _add_common_flags(sub):
    sub.add_argument("--grid", type=int, default=None, help="lattice denominator q")
    sub.add_argument("--tol", type=float, default=None, help="cut dedup tolerance")
    sub.add_argument("--refine", type=int, default=None, help="local refinement levels")
    sub.add_argument("--threads", type=int, default=1, help="sweep worker threads")
    sub.add_argument("--seed", type=int, default=0, help="recorded in output params")
    sub.add_argument("--out", default=None, help="write JSON here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="efl",
        description="Find, count and certify envy-free divisions of the unit cake.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="sweep an instance for envy-free divisions")
    p_solve.add_argument("instance")
    _add_common_flags(p_solve)

    p_ext = sub.add_parser("extremal", help="certify the two-division cycle structure")
    p_ext.add_argument("r", type=int, nargs="?", default=None)
    p_ext.add_argument("--eps", type=float, nargs="+", default=None)
    p_ext.add_argument("--instance", default=None, help="certify this instance instead")
    _add_common_flags(p_ext)

    for mode in ("secretive", "expelled"):
        p_mode = sub.add_parser(mode, help=f"search for a {mode}-certified cut")
        p_mode.add_argument("instance")
        _add_common_flags(p_mode)

    p_hyb = sub.add_parser("hybrid", help="search for favourable boxed divisions")
    p_hyb.add_argument("instance")
    p_hyb.add_argument("--tiles", type=int, default=None, help="2p-2 or 2p-1")
    _add_common_flags(p_hyb)

    p_cf = sub.add_parser("complex-facets", help="rook-complex facet counts")
    p_cf.add_argument("p", type=int)
    _add_common_flags(p_cf)

    p_plot = sub.add_parser("plot", help="ternary SVG of 3-player preference regions")
    p_plot.add_argument("instance")
    p_plot.add_argument("svg_out")
    _add_common_flags(p_plot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "extremal":
            return _cmd_extremal(args)
        if args.command in ("secretive", "expelled"):
            return _cmd_certify(args, args.command)
        if args.command == "hybrid":
            return _cmd_hybrid(args)
        if args.command == "complex-facets":
            return _cmd_complex_facets(args)
        if args.command == "plot":
            return _cmd_plot(args)
        raise InputError(f"unknown command {args.command!r}")
    except InputError as exc:
        print(f"efl: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
