"""Text and JSON formats for clusters, germ diagrams, resolution graphs and polynomials.

Cluster files, one point per line in blow-up order::

    point O root mult=2
    point O1 parent=O mult=1 coord=0
    point O2 parent=O1 sat=O mult=1

Germ files use the same lines, with ``mult`` the effective multiplicity,
plus optional ``match <id>=<id>`` lines.  Graph files::

    vertex E1 self=-2 genus=0
    edge E1 E2
    cycle Z E1=1 E2=2

``#`` starts a comment everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .cluster import Cluster, Point, WeightedCluster
from .errors import ParseError, SingkitError
from .germ import GermCluster, Matching
from .resgraph import Cycle, ResolutionGraph
from .series.resolve import EmbeddedCluster
from .series.truncated import INF, Direction, TruncatedSeries


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _kv(tokens: list[str], n: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"line {n}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k in out:
            raise ParseError(f"line {n}: repeated key {k!r}")
        out[k] = v
    return out


def _int(v: str, n: int, what: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise ParseError(f"line {n}: {what} must be an integer, got {v!r}") from None


def _rational(v: str, n: int) -> Fraction:
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"line {n}: not a rational number: {v!r}") from None


def _direction(v: str, n: int) -> Direction:
    return INF if v.lower() in ("inf", "infinity") else _rational(v, n)


def _fmt_direction(d: Direction) -> str:
    return "inf" if d is INF else str(d)


# --- clusters ---------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterFile:
    weighted: WeightedCluster
    coords: dict[str, Direction] = field(default_factory=dict)
    matches: dict[str, str] = field(default_factory=dict)

    def embedded(self) -> EmbeddedCluster:
        return EmbeddedCluster(self.weighted, self.coords)


def parse_cluster(text: str) -> ClusterFile:
    pts: list[Point] = []
    nu: dict[str, int] = {}
    coords: dict[str, Direction] = {}
    matches: dict[str, str] = {}
    for n, toks in _lines(text):
        kind = toks[0]
        if kind == "match":
            for tok in toks[1:]:
                if "=" not in tok:
                    raise ParseError(f"line {n}: match takes a=b pairs")
                a, b = tok.split("=", 1)
                matches[a] = b
            continue
        if kind != "point" or len(toks) < 2:
            raise ParseError(f"line {n}: expected 'point <id> ...'")
        pid, rest = toks[1], toks[2:]
        is_root = bool(rest) and rest[0] == "root"
        if is_root:
            rest = rest[1:]
        kv = _kv(rest, n)
        unknown = set(kv) - {"parent", "sat", "mult", "coord"}
        if unknown:
            raise ParseError(f"line {n}: unknown keys {sorted(unknown)}")
        if "mult" not in kv:
            raise ParseError(f"line {n}: point {pid!r} needs mult=")
        if is_root == ("parent" in kv):
            raise ParseError(f"line {n}: a point is either 'root' or has a parent")
        nu[pid] = _int(kv["mult"], n, "mult")
        pts.append(Point(pid, kv.get("parent"), kv.get("sat")))
        if "coord" in kv:
            coords[pid] = _direction(kv["coord"], n)
    if not pts:
        raise ParseError("empty cluster")
    try:
        k = WeightedCluster(Cluster(tuple(pts)), nu)
    except SingkitError as exc:
        raise ParseError(str(exc)) from None
    return ClusterFile(k, coords, matches)


def format_cluster(k: WeightedCluster, coords: Mapping[str, Direction] | None = None,
                   mult_key: str = "mult") -> str:
    coords = coords or {}
    out = []
    for p in k.cluster.points:
        parts = ["point", p.id]
        if p.is_root:
            parts.append("root")
        else:
            parts.append(f"parent={p.parent}")
            if p.sat is not None:
                parts.append(f"sat={p.sat}")
        parts.append(f"{mult_key}={k.nu[p.id]}")
        if p.id in coords:
            parts.append(f"coord={_fmt_direction(coords[p.id])}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def parse_germ(text: str) -> tuple[GermCluster, Matching]:
    cf = parse_cluster(text)
    try:
        g = GermCluster(cf.weighted.cluster, cf.weighted.nu)
    except SingkitError as exc:
        raise ParseError(str(exc)) from None
    return g, Matching(cf.matches)


def format_germ(g: GermCluster, matching: Matching | None = None) -> str:
    text = format_cluster(WeightedCluster(g.cluster, g.e))
    if matching and matching.pairs:
        text += "".join(f"match {a}={b}\n" for a, b in matching.pairs.items())
    return text


# --- graphs -------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphFile:
    graph: ResolutionGraph
    cycles: dict[str, Cycle]


def parse_graph(text: str) -> GraphFile:
    verts, edges = [], []
    raw_cycles: dict[str, dict[str, Fraction]] = {}
    for n, toks in _lines(text):
        kind = toks[0]
        if kind == "vertex":
            if len(toks) < 2:
                raise ParseError(f"line {n}: vertex needs an id")
            kv = _kv(toks[2:], n)
            if "self" not in kv:
                raise ParseError(f"line {n}: vertex needs self=")
            verts.append((toks[1], _int(kv["self"], n, "self"), _int(kv.get("genus", "0"), n, "genus")))
        elif kind == "edge":
            if len(toks) != 3:
                raise ParseError(f"line {n}: edge takes two vertex ids")
            edges.append((toks[1], toks[2]))
        elif kind == "cycle":
            if len(toks) < 2:
                raise ParseError(f"line {n}: cycle needs a name")
            raw_cycles[toks[1]] = {k: _rational(v, n) for k, v in _kv(toks[2:], n).items()}
        else:
            raise ParseError(f"line {n}: unknown declaration {kind!r}")
    if not verts:
        raise ParseError("graph has no vertices")
    try:
        g = ResolutionGraph(tuple(verts), tuple(edges))
        cycles = {}
        for name, coeffs in raw_cycles.items():
            z = Cycle(coeffs)
            g._check(z)
            cycles[name] = z
    except SingkitError as exc:
        raise ParseError(str(exc)) from None
    return GraphFile(g, cycles)


def format_graph(g: ResolutionGraph, cycles: Mapping[str, Cycle] | None = None) -> str:
    out = [f"vertex {v} self={s} genus={gen}" for v, s, gen in g.vertices]
    out += [f"edge {a} {b}" for a, b in g.edges]
    for name, z in (cycles or {}).items():
        out.append(" ".join(["cycle", name] + [f"{v}={z[v]}" for v in g.ids if z[v]]))
    return "\n".join(out) + "\n"


def looks_like_graph(text: str) -> bool:
    for _, toks in _lines(text):
        return toks[0] in ("vertex", "edge", "cycle")
    return False


# --- polynomials ------------------------------------------------------------------------

def parse_polynomial(text: str, prec: int | None = None) -> TruncatedSeries:
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    return TruncatedSeries.parse(body, prec)


# --- JSON ------------------------------------------------------------------------

def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    if v is INF:
        return "inf"
    if isinstance(v, Mapping):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, TruncatedSeries):
        return str(v)
    return v


def to_json(obj: Mapping[str, Any]) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def cluster_to_json(k: WeightedCluster, coords: Mapping[str, Direction] | None = None) -> dict:
    coords = coords or {}
    pts = []
    for p in k.cluster.points:
        d: dict[str, Any] = {"id": p.id, "mult": k.nu[p.id]}
        if p.parent is not None:
            d["parent"] = p.parent
        if p.sat is not None:
            d["sat"] = p.sat
        if p.id in coords:
            d["coord"] = _fmt_direction(coords[p.id])
        pts.append(d)
    return {"points": pts}


def cluster_from_json(data: Mapping[str, Any]) -> ClusterFile:
    lines = []
    for d in data["points"]:
        parts = ["point", d["id"]]
        parts.append(f"parent={d['parent']}" if "parent" in d else "root")
        if "sat" in d:
            parts.append(f"sat={d['sat']}")
        parts.append(f"mult={d['mult']}")
        if "coord" in d:
            parts.append(f"coord={d['coord']}")
        lines.append(" ".join(parts))
    return parse_cluster("\n".join(lines))


def graph_to_json(g: ResolutionGraph, cycles: Mapping[str, Cycle] | None = None) -> dict:
    return {
        "vertices": [{"id": v, "self": s, "genus": gen} for v, s, gen in g.vertices],
        "edges": [list(e) for e in g.edges],
        "cycles": {name: dict(z) for name, z in (cycles or {}).items()},
    }


def graph_from_json(data: Mapping[str, Any]) -> GraphFile:
    lines = [f"vertex {v['id']} self={v['self']} genus={v['genus']}" for v in data["vertices"]]
    lines += [f"edge {a} {b}" for a, b in data["edges"]]
    for name, z in data.get("cycles", {}).items():
        lines.append(" ".join(["cycle", name] + [f"{k}={v}" for k, v in z.items()]))
    return parse_graph("\n".join(lines))
