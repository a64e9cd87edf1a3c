"""Command-line surface.

Subcommands: classical, tropical, enumerate, monodromy, complex,
probe-conventions.  Rationals print as num/den in lowest terms; --format
json emits canonically ordered JSON (stable byte-for-byte across runs).
Exit codes: 0 success, 1 infeasible problem (structured message on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .conecomplex import (
    barycentric_subdivision,
    branch_complex_map,
    build_complex,
    subdivision_is_simplicial,
    target_complex,
)
from .covers import cover_to_dot, cover_to_json
from .enumeration import branch_fiber_report, covers_over_target, default_target
from .graphs import graph_from_json
from .hurwitz import (
    CONVENTIONS,
    DEFAULT_CONVENTION,
    HurwitzCache,
    HurwitzProblem,
    InfeasibleProblem,
    ResourceGuard,
    classical_hurwitz,
    probe_lz_convention,
)
from .monodromy import cjm_sum, generate_monodromy_graphs
from .symgroup import (
    Partition,
    brute_tuple_count,
    frobenius_tuple_count,
    partitions_of,
)


def _rational(x):
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator) if x.denominator != 1 else str(x.numerator)


def _parse_profiles(text):
    try:
        data = json.loads(text)
        return [Partition(p) for p in data]
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError("profiles must be a JSON array of arrays: %s" % exc)


def _parse_partition(text):
    try:
        return Partition(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError("partition must be a JSON array: %s" % exc)


def _emit(data, fmt, table_renderer=None):
    if fmt == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        if table_renderer is None:
            print(json.dumps(data, sort_keys=True, indent=2))
        else:
            print(table_renderer(data))


def _load_target(path):
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(json.load(fh))


def _common_flags(parser, suppress=False):
    # the same flags are accepted before and after the subcommand; the
    # subparser copies use SUPPRESS so they only override when given
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument(
        "--format", choices=("json", "table"),
        **(kw if suppress else {"default": "table"}),
    )
    parser.add_argument("--cache", help="path of the persistent Hurwitz cache",
                        **(kw if suppress else {"default": None}))
    parser.add_argument("--max-d", type=int, dest="max_d", help="degree resource guard",
                        **(kw if suppress else {"default": 6}))
    parser.add_argument("--seed", type=int, help="seed for randomized checks",
                        **(kw if suppress else {"default": 0}))
    parser.add_argument("--jobs", type=int, help="worker processes for tuple counting",
                        **(kw if suppress else {"default": 1}))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tropcover",
        description="Exact Hurwitz numbers and tropical admissible covers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    _common_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_args(p):
        p.add_argument("--g", type=int, required=True, help="source genus")
        p.add_argument("--h", type=int, required=True, help="target genus")
        p.add_argument("--d", type=int, required=True, help="degree")
        p.add_argument("--profiles", type=_parse_profiles, default=[])
        p.add_argument("--convention", choices=CONVENTIONS, default=DEFAULT_CONVENTION)

    p = sub.add_parser("classical", help="classical Hurwitz number (monodromy oracle)")
    _common_flags(p, suppress=True)
    add_problem_args(p)

    p = sub.add_parser("tropical", help="tropical Hurwitz number (branch map degree)")
    _common_flags(p, suppress=True)
    add_problem_args(p)
    p.add_argument("--target", help="JSON file with an explicit target graph")

    p = sub.add_parser("enumerate", help="list the cover types over the target")
    _common_flags(p, suppress=True)
    add_problem_args(p)
    p.add_argument("--target", help="JSON file with an explicit target graph")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")

    p = sub.add_parser("monodromy", help="monodromy graphs and the CJM sum")
    _common_flags(p, suppress=True)
    p.add_argument("--mu1", type=_parse_partition, required=True)
    p.add_argument("--mu2", type=_parse_partition, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("complex", help="cone complex, subdivision, branch degree")
    _common_flags(p, suppress=True)
    add_problem_args(p)

    p = sub.add_parser(
        "probe-conventions",
        help="compare the Lando-Zvonkine closed form with the oracle per convention",
    )
    _common_flags(p, suppress=True)
    p.add_argument("--probe-max-d", type=int, default=6)
    p.add_argument(
        "--samples",
        type=int,
        default=0,
        help="additionally cross-check the Frobenius count on random profiles",
    )
    return parser


def _cmd_classical(args, cache):
    problem = HurwitzProblem(args.g, args.h, args.d, tuple(args.profiles), args.convention)
    value, route = classical_hurwitz(
        problem, cache=cache, max_degree=args.max_d, jobs=args.jobs, return_route=True
    )
    if args.format == "json":
        _emit(
            {
                "problem": problem.key(),
                "value": _rational(value),
                "route": route,
                "simple_branch_points": problem.s,
            },
            "json",
        )
    else:
        print(_rational(value))
    return 0


def _cmd_tropical(args, cache):
    target = _load_target(args.target) if args.target else None
    report = branch_fiber_report(
        args.g, args.h, args.d, args.profiles,
        convention=args.convention, target=target, cache=cache, max_degree=args.max_d,
    )
    if args.format == "json":
        _emit(report.to_json(), "json")
    else:
        print(_rational(report.total))
    return 0


def _cmd_enumerate(args, cache):
    if args.target:
        target = _load_target(args.target)
        from .hurwitz import simple_branch_count
        from .symgroup import simple_profile

        s = simple_branch_count(args.g, args.h, args.d, args.profiles)
        leg_profiles = {
            "mu%d" % (i + 1): p for i, p in enumerate(args.profiles)
        }
        for i in range(s):
            leg_profiles["q%d" % (i + 1)] = simple_profile(args.d)
    else:
        target, leg_profiles = default_target(args.g, args.h, args.d, args.profiles)
    covers = covers_over_target(
        target, args.d, args.g, leg_profiles,
        convention=args.convention, cache=cache, max_degree=args.max_d,
    )
    if args.dot:
        for i, c in enumerate(covers):
            print(cover_to_dot(c, name="cover%d" % i))
    else:
        _emit([cover_to_json(c) for c in covers], "json")
    return 0


def _render_monodromy_table(data):
    lines = []
    for g in data["graphs"]:
        lines.append(
            "%-40s contribution %s (|Aut| = %d)"
            % (g["render"], g["contribution"], g["aut"])
        )
    lines.append("cjm_sum = %s" % data["cjm_sum"])
    return "\n".join(lines)


def _cmd_monodromy(args, cache):
    graphs = generate_monodromy_graphs(args.mu1, args.mu2, args.g)
    if args.dot:
        for i, m in enumerate(graphs):
            print(m.to_dot(name="monodromy%d" % i))
        return 0
    total = cjm_sum(args.mu1, args.mu2, args.g)
    data = {
        "graphs": [
            {
                "render": m.render(),
                "contribution": _rational(m.contribution()),
                "aut": m.wiener_automorphisms(),
                "strands": m.to_json()["strands"],
            }
            for m in graphs
        ],
        "cjm_sum": _rational(total),
    }
    _emit(data, args.format, _render_monodromy_table)
    return 0


def _cmd_complex(args, cache):
    target, leg_profiles = default_target(args.g, args.h, args.d, args.profiles)
    H = build_complex(
        target, args.d, args.g, leg_profiles,
        convention=args.convention, cache=cache, max_degree=args.max_d,
    )
    M = target_complex(target)
    bm = branch_complex_map(H, M, convention=args.convention, cache=cache)
    sub = barycentric_subdivision(H)
    data = {
        "complex": H.to_json(),
        "branch_map": bm.to_json(),
        "subdivision": {
            "cones": len(sub.cone_list()),
            "maximal_chains": len(H.maximal_chains()),
            "simplicial": subdivision_is_simplicial(sub, H),
        },
    }
    if args.format == "json":
        _emit(data, "json")
    else:
        dims = {}
        for c in H.cone_list():
            dims[c.dimension] = dims.get(c.dimension, 0) + 1
        print("cones by dimension: %s" % dims)
        for k, v in sorted(bm.degrees.items()):
            print("branch degree over %s = %s" % (k, _rational(v)))
        print(
            "subdivision: %d cones, simplicial=%s"
            % (len(sub.cone_list()), data["subdivision"]["simplicial"])
        )
    return 0


def _cmd_probe(args, cache):
    convention, table = probe_lz_convention(max_d=args.probe_max_d, cache=cache)
    data = {
        "lz_convention": convention,
        "cases": [
            {
                "d": d,
                "nu": nu.to_json(),
                "lando_zvonkine": _rational(lz),
                "oracle": {conv: _rational(v) for conv, v in values.items()},
            }
            for d, nu, lz, values in table
        ],
    }
    if args.samples:
        rng = random.Random(args.seed)
        checks = []
        for _ in range(args.samples):
            d = rng.randint(2, 5)
            h = rng.randint(0, 1)
            profiles = [
                Partition(rng.choice(list(partitions_of(d))).parts)
                for _ in range(rng.randint(0 if h else 1, 3))
            ]
            frob = frobenius_tuple_count(h, profiles, d=d)
            brute = brute_tuple_count(h, profiles, 0, d=d, transitive=False)
            checks.append(
                {
                    "d": d,
                    "h": h,
                    "profiles": [p.to_json() for p in profiles],
                    "frobenius": frob,
                    "brute": brute,
                    "match": frob == brute,
                }
            )
        data["frobenius_checks"] = checks
        if not all(c["match"] for c in checks):
            print(json.dumps(data, sort_keys=True, indent=2))
            return 1
    if args.format == "json":
        _emit(data, "json")
    else:
        print("lz_convention = %s" % convention)
        for case in data["cases"]:
            print(
                "  d=%d nu=%s lz=%s %s"
                % (case["d"], case["nu"], case["lando_zvonkine"], case["oracle"])
            )
        if args.samples:
            good = sum(1 for c in data["frobenius_checks"] if c["match"])
            print("frobenius checks: %d/%d match" % (good, len(data["frobenius_checks"])))
    return 0


COMMANDS = {
    "classical": _cmd_classical,
    "tropical": _cmd_tropical,
    "enumerate": _cmd_enumerate,
    "monodromy": _cmd_monodromy,
    "complex": _cmd_complex,
    "probe-conventions": _cmd_probe,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cache = HurwitzCache(args.cache) if args.cache else None
    try:
        return COMMANDS[args.command](args, cache)
    except (InfeasibleProblem, ResourceGuard) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
