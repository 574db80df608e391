"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error
(including non-finite intersections), 3 oracle refusal.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import cluster as cl
from . import formats, germ, resgraph
from .errors import (InternalError, NonFiniteIntersection, OracleRefusal, ParseError,
                     PreconditionError, SingkitError)
from .germ import TheoremViolation
from .series import discriminant as disc
from .series.colength import jacobian_colength, pair_colength
from .series.resolve import (EmbeddedCluster, diagram_in, resolve,
                             virtual_multiplicity_check)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 as well; keep our message format
        raise UsageError(message)


def _read(arg: str) -> str:
    """File contents, or the argument itself when no such file exists (``-`` reads stdin)."""
    if arg == "-":
        return sys.stdin.read()
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _poly(arg: str, args):
    return formats.parse_polynomial(_read(arg), args.precision)


def _cluster_file(arg: str) -> formats.ClusterFile:
    text = _read(arg)
    if not os.path.exists(arg) and "point" not in text:
        raise UsageError(f"no such cluster file: {arg}")
    return formats.parse_cluster(text)


def _embedded(arg: str) -> tuple[EmbeddedCluster, bool]:
    """The embedded cluster of a file, unloaded if needed (coordinates are kept)."""
    cf = _cluster_file(arg)
    k = cf.embedded()
    if cl.is_consistent(k.weighted):
        return k, False
    return k.with_weights(cl.unload(k.weighted)), True


def _dmax(args) -> int:
    return args.degree_bound


# --- commands ------------------------------------------------------------------------

def cmd_invariants(args) -> tuple[dict, int]:
    text = _read(args.input)
    unloaded = False
    if formats.looks_like_graph(text):
        gf = formats.parse_graph(text)
        g = gf.graph
        if gf.cycles:
            name = "Z" if "Z" in gf.cycles else next(iter(gf.cycles))
            z, source = gf.cycles[name], f"cycle {name}"
        else:
            z, source = resgraph.fundamental_cycle(g), "fundamental cycle"
        mu = resgraph.generic_milnor(g, z)
        e = resgraph.multiplicity_from_cycle(g, z)
    else:
        k = formats.parse_cluster(text).weighted
        if not cl.is_consistent(k):
            k, unloaded = cl.unload(k), True
        g, z = cl.to_resolution_graph(k)
        source = "cluster"
        mu, e = cl.generic_milnor_cluster(k), cl.multiplicity_cluster(k)
    report = {
        "mu": mu, "e": e, "e_delta": resgraph.discriminant_multiplicity(g, z),
        "K": dict(resgraph.canonical_cycle(g)), "Z": dict(z),
        "matrix": [list(r) for r in g.matrix], "vertices": list(g.ids),
        "source": source, "unloaded": unloaded,
    }
    return report, EXIT_OK


def cmd_unload(args) -> tuple[dict, int]:
    cf = _cluster_file(args.input)
    u = cl.unload(cf.weighted)
    coords = {p: d for p, d in cf.coords.items() if p in u.cluster}
    return {"cluster": u, "coords": coords, "changed": u != cf.weighted}, EXIT_OK


def cmd_member(args) -> tuple[dict, int]:
    f = _poly(args.poly, args)
    k = _cluster_file(args.cluster).embedded()
    m = virtual_multiplicity_check(f, k)
    return {"member": m.member, "virtual": m.virtual, "required": dict(k.nu),
            "certified_precision": m.certified_precision}, EXIT_OK


def cmd_general(args) -> tuple[dict, int]:
    f = _poly(args.poly, args)
    k, unloaded = _embedded(args.cluster)
    mu = jacobian_colength(f, _dmax(args))
    member = virtual_multiplicity_check(f, k).member
    dia, m = diagram_in(f, k, max(4 * _dmax(args), 64))
    mu_i = cl.generic_milnor_cluster(k.weighted)
    report = {"poly": f, "mu": mu.value, "mu_I": mu_i, "member": member,
              "certified_precision": mu.certified_precision, "unloaded": unloaded,
              "mu_from_diagram": germ.milnor(dia)}
    try:
        report["general"] = germ.is_general(dia, k.weighted, m)
        report["theorem_check"] = "ok"
        code = EXIT_OK
    except TheoremViolation as exc:
        report["general"] = germ.goes_sharply_through(dia, k.weighted, m)
        report["theorem_check"] = f"violated: {exc}"
        code = EXIT_FAIL
    if report["mu_from_diagram"] != mu.value:
        report["theorem_check"] = "Jacobian colength and diagram disagree"
        code = EXIT_FAIL
    return report, code


def cmd_reduction(args) -> tuple[dict, int]:
    f, g = _poly(args.f, args), _poly(args.g, args)
    k, unloaded = _embedded(args.cluster)
    e_j = pair_colength(f, g, _dmax(args))
    r = resolve([f, g], k, max(4 * _dmax(args), 64), allow_multiple=True)
    df, dg = r.diagrams
    mf, mg = r.to_cluster
    members = [germ.is_member(df, k.weighted, mf), germ.is_member(dg, k.weighted, mg)]
    if not all(members):
        raise PreconditionError("both elements must belong to I_K "
                                f"(f: {members[0]}, g: {members[1]})")
    rep = germ.is_reduction_pair(df, dg, k.weighted, mf, mg, r.matching(0, 1))
    report = {
        "e_J": e_j.value, "e_I": rep.e_i, "reduction": e_j.value == rep.e_i,
        "f_superficial": rep.f_superficial, "g_superficial": rep.g_superficial,
        "separated": rep.separated, "good_pair": rep.good_pair, "e_J_noether": rep.e_j,
        "certified_precision": e_j.certified_precision, "unloaded": unloaded,
    }
    ok = rep.good_pair == (e_j.value == rep.e_i) and rep.e_j == e_j.value
    return report, EXIT_OK if ok else EXIT_FAIL


def _samples(args) -> list[tuple[Fraction, Fraction]]:
    out = list(disc.DEFAULT_SAMPLES)
    n = args.samples if args.samples is not None else len(out)
    if n < 1:
        raise UsageError("--samples must be positive")
    rng = random.Random(args.seed)
    while len(out) < n:
        a, b = rng.randint(-9, 9), rng.randint(-9, 9)
        if (a, b) != (0, 0):
            out.append((a, b))
    return [(Fraction(a), Fraction(b)) for a, b in out[:n]]


def cmd_pencil(args) -> tuple[dict, int]:
    p = disc.ProjectionPair(_poly(args.f, args), _poly(args.g, args))
    scan = disc.pencil_scan(p, _samples(args), _dmax(args))
    rows = []
    try:
        d = disc.discriminant_by_elimination(p)
        e_delta, lines = d.multiplicity, {(s.alpha, s.beta): d.line_intersection(s.alpha, s.beta)
                                           for s in scan.samples}
    except OracleRefusal:
        e_delta, lines = None, {}
    for s in scan.samples:
        rows.append({"alpha": s.alpha, "beta": s.beta, "mu": s.mu, "rhs": s.rhs,
                     "special": s.special, "error": s.error,
                     "delta_dot_L": lines.get((s.alpha, s.beta))})
    report = {"degree": scan.degree, "generic_mu": scan.generic_mu, "e_delta": e_delta,
              "samples": rows, "special": [[r["alpha"], r["beta"]] for r in rows if r["special"]],
              "certified_precision": scan.certified_precision}
    bad = any(r["delta_dot_L"] is not None and r["rhs"] is not None and r["delta_dot_L"] != r["rhs"]
              for r in rows)
    return report, EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    samples = args.samples if args.samples is not None else 20
    if samples < 1:
        raise UsageError("--samples must be positive")
    res = run_suite(args.suite, args.seed, samples)
    report = {"suite": res.name, "passed": res.passed, "failures": res.failures,
              "skipped": res.skipped, "samples": samples, "seed": args.seed, "lines": res.lines}
    return report, EXIT_OK if res.passed else EXIT_FAIL


def cmd_graph(args) -> tuple[dict, int]:
    k = _cluster_file(args.input).weighted
    unloaded = False
    if not cl.is_consistent(k):
        k, unloaded = cl.unload(k), True
    g, z = cl.to_resolution_graph(k)
    return {"graph": g, "cycles": {"Z": z}, "unloaded": unloaded}, EXIT_OK


# --- output -------------------------------------------------------------------------------

def _text(command: str, report: dict) -> str:
    if command == "unload":
        return formats.format_cluster(report["cluster"], report["coords"])
    if command == "graph":
        return formats.format_graph(report["graph"], report["cycles"])
    if command == "verify":
        head = "PASS" if report["passed"] else "FAIL"
        tail = f"{report['suite']}: {head} ({report['samples']} samples, " \
               f"{report['failures']} failed, {report['skipped']} skipped)"
        return "\n".join(report["lines"] + [tail]) + "\n"
    if command == "pencil":
        lines = [f"deg(p) = {report['degree']}", f"generic mu = {report['generic_mu']}",
                 f"e(Delta) = {report['e_delta']}",
                 "alpha beta mu mu+deg-1 (Delta.L) special"]
        for r in report["samples"]:
            mu = r["mu"] if r["mu"] is not None else f"error({r['error']})"
            lines.append(f"{r['alpha']} {r['beta']} {mu} {r['rhs']} {r['delta_dot_L']} "
                         f"{'*' if r['special'] else ''}".rstrip())
        return "\n".join(lines) + "\n"
    out = []
    for key in sorted(report):
        v = report[key]
        if isinstance(v, dict):
            v = " ".join(f"{a}={b}" for a, b in v.items())
        out.append(f"{key}: {v}")
    return "\n".join(out) + "\n"


def _json(command: str, report: dict) -> str:
    data = dict(report)
    if command == "unload":
        data = {"cluster": formats.cluster_to_json(report["cluster"], report["coords"]),
                "changed": report["changed"]}
    elif command == "graph":
        data = {"graph": formats.graph_to_json(report["graph"], report["cycles"]),
                "unloaded": report["unloaded"]}
    return formats.to_json(data) + "\n"


COMMANDS = {
    "invariants": cmd_invariants, "unload": cmd_unload, "member": cmd_member,
    "general": cmd_general, "reduction": cmd_reduction, "pencil": cmd_pencil,
    "verify": cmd_verify, "graph": cmd_graph,
}


def _common(suppress: bool) -> argparse.ArgumentParser:
    # the copy attached to subcommands must not reset flags given before them
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=d("text"))
    common.add_argument("--seed", type=int, default=d(0))
    common.add_argument("--samples", type=int, default=d(None))
    common.add_argument("--degree-bound", type=int, default=d(96),
                        help="largest truncation degree the oracles may use")
    common.add_argument("--precision", type=int, default=d(None),
                        help="treat input polynomials as known only below this degree")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singkit", description=__doc__.splitlines()[0], parents=[_common(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    inner = _common(True)
    for name, positional in (
            ("invariants", ["input"]), ("unload", ["input"]), ("member", ["poly", "cluster"]),
            ("general", ["poly", "cluster"]), ("reduction", ["f", "g", "cluster"]),
            ("pencil", ["f", "g"]), ("verify", ["suite"]), ("graph", ["input"])):
        sp = sub.add_parser(name, parents=[inner])
        for arg in positional:
            sp.add_argument(arg)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.seed < 0:
            raise UsageError("--seed must be non-negative")
        if args.degree_bound < 1:
            raise UsageError("--degree-bound must be positive")
        report, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, PreconditionError, NonFiniteIntersection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleRefusal as exc:
        print(f"oracle refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (InternalError, AssertionError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SingkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    render = _json if args.format == "json" else _text
    sys.stdout.write(render(args.command, report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
