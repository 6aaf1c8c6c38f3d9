"""Command-line front end.

Every pass/fail decision is made by a library call; this module only parses
arguments, dispatches and formats reports.  Exit status: 0 when all requested
checks pass, 1 when a check fails, 2 on input or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import geometry, graph, interchange, primal
from .designs import CATALOG, ProjectiveDesign, catalog_build, design_level, welch_design_check
from .errors import QplexError
from .linalg import min_eigenvalue
from .povm import Povm, is_equal_trace, measurement_map, morphophoricity_report, rank_one_vectors
from .sampling import DEFAULT_SEED, random_povm_effects, random_states, rng_from


def _plain(obj):
    """Convert numpy/Fraction/complex values into JSON-serialisable ones."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _text(obj, prefix="") -> list:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            lines += _text(obj[k], f"{prefix}{k}." if isinstance(obj[k], dict) else f"{prefix}{k}")
        return lines
    return [f"{prefix.rstrip('.')}: {json.dumps(obj)}"]


def _emit(report: dict, args) -> None:
    report = _plain(report)
    out = interchange.dumps(report) if args.format == "json" else "\n".join(_text(report)) + "\n"
    if args.output and args.verb != "catalog":
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _design_or_none(obj):
    if isinstance(obj, ProjectiveDesign):
        return obj
    if rank_one_vectors(obj) is not None and is_equal_trace(obj):
        return interchange.as_design(obj)
    return None


# --- verbs -------------------------------------------------------------------


def cmd_catalog(args):
    if not args.name:
        entries = {
            name: {"params": e.nparams, "summary": e.summary, "advertised_t": e.advertised_t}
            for name, e in sorted(CATALOG.items())
        }
        return {"catalog": entries}, True
    params = [] if args.param is None else [args.param]
    obj = catalog_build(args.name, params)
    payload = interchange.povm_to_json(obj if isinstance(obj, Povm) else obj.povm())
    if args.output:
        Path(args.output).write_text(interchange.dumps(payload))
        return {"written": args.output, "n": len(payload["effects"]), "dim": payload["dim"]}, True
    return payload, True


def cmd_verify(args):
    obj = interchange.resolve_source(args.source)
    povm = interchange.as_povm(obj)
    rep = morphophoricity_report(povm, args.tolerance or 1e-9)
    report = {"source": args.source, "n": povm.n, "dim": povm.dim, "morphophoricity": rep.as_dict()}
    design = _design_or_none(obj)
    if design is not None:
        report["design_level"] = design_level(design)
    ok = True
    for req in args.require or []:
        passed = {
            "morphophoric": rep.is_morphophoric,
            "tight-ic": rep.is_tight_ic,
            "ic": rep.is_ic,
            "two-design": design is not None and welch_design_check(design, 2)[0],
        }[req]
        report.setdefault("requirements", {})[req] = passed
        ok = ok and passed
    return report, ok


def cmd_geometry(args):
    povm = interchange.as_povm(interchange.resolve_source(args.source))
    rep = geometry.geometry_report(povm, args.tolerance or 1e-9)
    report = {"source": args.source, "geometry": rep.as_dict()}
    ok = True
    if args.samples:
        dual = geometry.duality_checks(povm, args.samples, args.seed)
        report["duality"] = dual.as_dict()
        ok = dual.passed
    if args.vectors:
        P = interchange.load_vectors(args.vectors)
        design = geometry.as_two_design(povm)
        members = []
        for p in P:
            entry = {"in_range": geometry.reconstruction_membership(povm, p)}
            if design is not None and p.size == povm.n:
                entry["pure_image"] = geometry.pure_membership_check(design, p).is_pure_image
            members.append(entry)
        report["membership"] = members
    if args.polytope_csv:
        try:
            poly = geometry.primal_polytope(povm)
        except ValueError as exc:
            report["polytope"] = str(exc)
        else:
            Path(args.polytope_csv).write_text(interchange.polytope_csv(poly.vertices))
            report["polytope"] = {"vertices": len(poly.vertices), "written": args.polytope_csv}
    return report, ok


def cmd_graph(args):
    design = interchange.as_design(interchange.resolve_source(args.source))
    rep = graph.analyse_design(design)
    if args.adjacency:
        Path(args.adjacency).write_text(graph.adjacency_list(graph.build_orthogonality_graph(design)))
    report = {"source": args.source, **rep.as_dict()}
    return report, rep.cliques.delsarte


def cmd_primal(args):
    sky = interchange.as_povm(interchange.resolve_source(args.sky))
    rng = rng_from(args.seed)
    if args.ground:
        ground = interchange.as_povm(interchange.resolve_source(args.ground))
    else:
        ground = Povm(random_povm_effects(sky.dim, sky.dim**2 + 1, rng), label="random")
    samples = args.samples or 50
    states = interchange.load_state(args.state)[None] if args.state else random_states(sky.dim, samples, rng)
    tol = args.tolerance or 1e-10
    resid = primal.urgleichung_check(sky, ground, states)
    report = {"sky": args.sky, "ground": args.ground or "random", "seed": args.seed, "states": len(states), "residual": resid}
    ok = resid <= tol
    if rank_one_vectors(sky) is not None and is_equal_trace(sky):
        r1 = primal.rank1_urgleichung_check(sky, ground, states)
        report["rank1_residual"] = r1
        ok = ok and r1 <= tol
    try:
        fit = primal.morphophoricity_from_urgleichung(sky, ground, seed=args.seed)
    except QplexError as exc:
        report["fit"] = str(exc)
    else:
        report["fit"] = fit._asdict()
    if args.joint_csv:
        rho = states[0] if args.state else np.eye(sky.dim) / sky.dim
        joint = primal.lueders_joint(sky, ground, rho)
        Path(args.joint_csv).write_text(interchange.joint_csv(joint.matrix))
        report["joint_csv"] = args.joint_csv
    report["passed"] = ok
    return report, ok


def cmd_tomography(args):
    obj = interchange.resolve_source(args.source)
    povm = interchange.as_povm(obj)
    P = interchange.load_vectors(args.p)
    out = []
    ok = True
    for p in P:
        tau = geometry.reconstruct_state(povm, p, tol=args.tolerance or geometry.AFFINE_TOL)
        lo = min_eigenvalue(tau)
        roundtrip = float(np.max(np.abs(measurement_map(povm, tau) - p)))
        valid = lo >= -1e-9
        ok = ok and valid
        out.append({"state": [[[z.real, z.imag] for z in row] for row in tau], "min_eigenvalue": lo, "is_state": valid, "roundtrip": roundtrip})
    return {"source": args.source, "reconstructions": out}, ok


VERBS = {
    "catalog": cmd_catalog,
    "verify": cmd_verify,
    "geometry": cmd_geometry,
    "graph": cmd_graph,
    "primal": cmd_primal,
    "tomography": cmd_tomography,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="override the check tolerance")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED, help="RNG seed (default 0x5EED)")
    common.add_argument("--samples", type=int, default=None, help="sample count for randomised checks")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", default=None, help="write the report (or catalog export) here")

    parser = argparse.ArgumentParser(prog="qplex", description="Morphophoric POVM and qplex verification.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("catalog", parents=[common], help="list or export catalog designs")
    p.add_argument("name", nargs="?")
    p.add_argument("--param", type=float, default=None)

    p = sub.add_parser("verify", parents=[common], help="morphophoricity report")
    p.add_argument("source", help="file path or catalog:NAME[:PARAM]")
    p.add_argument("--require", action="append", choices=("morphophoric", "tight-ic", "ic", "two-design"))

    p = sub.add_parser("geometry", parents=[common], help="qplex geometry and duality checks")
    p.add_argument("source")
    p.add_argument("--vectors", help="JSON file of probability vectors to test for membership")
    p.add_argument("--polytope-csv", help="write primal polytope vertices as CSV")

    p = sub.add_parser("graph", parents=[common], help="orthogonality graph parameters")
    p.add_argument("source")
    p.add_argument("--adjacency", help="write the edge list here")

    p = sub.add_parser("primal", parents=[common], help="primal equation residuals")
    p.add_argument("sky")
    p.add_argument("--ground", help="ground POVM (default: random)")
    p.add_argument("--state", help="state file (default: random states)")
    p.add_argument("--joint-csv", help="write the sky/ground joint distribution (at --state, else I/d) as CSV")

    p = sub.add_parser("tomography", parents=[common], help="reconstruct states from probabilities")
    p.add_argument("source")
    p.add_argument("p", help="JSON file of probability vectors")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, ok = VERBS[args.verb](args)
    except (QplexError, ValueError, KeyError, ArithmeticError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    _emit(report, args)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
