"""Command line front end.

``halfflow solve`` reads a JSON instance, solves it, and writes a JSON result
with the doubled flow value, the paths, and optionally the dual, the rounded
multiway cut and solver statistics.  ``halfflow oracle`` prints the exact
dual optimum of a small instance by exhaustive enumeration, for
cross-checking.

Exit codes: 0 success, 2 unbounded instance, 3 malformed or invalid input,
4 oracle size guard exceeded, 5 self-verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .apps import round_cut, verify_cut
from .descent import solve
from .errors import (InfeasibleDual, InstanceSyntaxError, TooLarge,
                     UnboundedInstance, ValidationError)
from .extract import certify
from .instance import MultiflowInstance, parse_instance, star_embedding
from .oracle import dual_enum

EXIT_OK = 0
EXIT_UNBOUNDED = 2
EXIT_INVALID = 3
EXIT_TOO_LARGE = 4
EXIT_VERIFY_FAILED = 5


def _load_instance(path: str) -> MultiflowInstance:
    with open(path, "rb") as handle:
        return parse_instance(handle.read())


def _point_json(inst: MultiflowInstance, point) -> dict:
    """Star positions as edge coordinates: the centre is the null endpoint."""
    terms = sorted(inst.terminals)
    if point == ("v", 0):
        return {"edge": [None, terms[0]], "q": 0}
    if point[0] == "v":
        return {"edge": [None, terms[point[1] - 1]], "q": 4}
    return {"edge": [None, terms[point[1]]], "q": point[2]}


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        inst = _load_instance(args.input)
    except UnboundedInstance as exc:
        print(f"halfflow: unbounded instance: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except (InstanceSyntaxError, ValidationError, OSError) as exc:
        print(f"halfflow: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    result = solve(inst)
    payload: dict = {
        "value2": result.value2,
        "paths": [{"nodes": list(nodes), "lambda2": w2}
                  for nodes, w2 in result.multiflow.paths],
    }
    cut = None
    try:
        cut = round_cut(inst, result.dual)
    except InfeasibleDual as exc:
        print(f"halfflow: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    if args.emit_dual:
        payload["dual"] = {
            "p": {node: _point_json(inst, point)
                  for node, (point, _) in sorted(result.dual.items())},
            "r4": {node: r4 for node, (_, r4) in sorted(result.dual.items())},
        }
    if args.emit_cut:
        payload["multiway_cut"] = list(cut.nodes)
    if args.stats:
        payload["stats"] = {
            "iterations": result.stats.iterations,
            "augmentations": result.stats.augmentations,
            "g_trace": result.stats.g_trace,
            "core_diameter": result.stats.core_diameter,
            "band_index": result.stats.band_index,
        }
    if args.verify:
        report = certify(inst, star_embedding(inst), result.dual,
                         result.multiflow)
        if not report.optimal or not verify_cut(inst, cut.nodes):
            print(f"halfflow: verification failed: {report.violations}",
                  file=sys.stderr)
            return EXIT_VERIFY_FAILED
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        inst = _load_instance(args.input)
    except UnboundedInstance as exc:
        print(f"halfflow: unbounded instance: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except (InstanceSyntaxError, ValidationError, OSError) as exc:
        print(f"halfflow: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        value = dual_enum(inst, radius=args.radius)
    except TooLarge as exc:
        print(f"halfflow: oracle too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    print(value)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfflow",
        description="Exact half-integral maximum multiflow solver")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve an instance")
    ps.add_argument("--input", required=True, help="JSON instance file")
    ps.add_argument("--output", help="write the JSON result here")
    ps.add_argument("--emit-cut", action="store_true",
                    help="include the rounded multiway cut")
    ps.add_argument("--emit-dual", action="store_true",
                    help="include the optimal dual")
    ps.add_argument("--stats", action="store_true",
                    help="include solver statistics")
    ps.add_argument("--verify", action="store_true",
                    help="re-certify before writing; exit 5 on failure")
    ps.set_defaults(func=cmd_solve)

    po = sub.add_parser("oracle", help="exact dual optimum by enumeration")
    po.add_argument("--input", required=True, help="JSON instance file")
    po.add_argument("--radius", type=int, default=2,
                    help="dual radius bound (default: star diameter)")
    po.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
