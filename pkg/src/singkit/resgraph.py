"""Intersection theory on weighted dual graphs of good resolutions.

A :class:`ResolutionGraph` carries the exceptional curves ``E_i`` of a good
resolution (self-intersection and genus of each) and the number of
intersection points between any two of them.  Cycles are rational
combinations of the ``E_i``.  All arithmetic is exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DomainError, InternalError, PreconditionError

Rational = Fraction | int


class Cycle(Mapping[str, Fraction]):
    """An exceptional cycle; a finitely supported map vertex id -> rational.

    Missing vertices have coefficient 0 and zero coefficients are never
    stored, so two cycles compare equal iff they have the same coefficients.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Mapping[str, Rational] | Iterable[tuple[str, Rational]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        c: dict[str, Fraction] = {}
        for k, v in items:
            v = Fraction(v)
            if v:
                c[str(k)] = c.get(str(k), Fraction(0)) + v
        self._c = {k: v for k, v in c.items() if v}

    def __getitem__(self, key: str) -> Fraction:
        return self._c.get(key, Fraction(0))

    def __iter__(self) -> Iterator[str]:
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __contains__(self, key: object) -> bool:
        return key in self._c

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Cycle):
            return self._c == other._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __add__(self, other: Cycle) -> Cycle:
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Cycle(out)

    def __neg__(self) -> Cycle:
        return Cycle({k: -v for k, v in self._c.items()})

    def __sub__(self, other: Cycle) -> Cycle:
        return self + (-other)

    def __mul__(self, scalar: Rational) -> Cycle:
        return Cycle({k: v * scalar for k, v in self._c.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*E[{k}]" for k, v in self._c.items())
        return f"Cycle({body or '0'})"

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._c)

    def reduced(self) -> Cycle:
        """The reduced cycle |z|: coefficient 1 on every vertex of the support."""
        return Cycle({k: 1 for k in self._c})

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())

    def to_json(self) -> dict[str, int | str]:
        return {k: (int(v) if v.denominator == 1 else str(v)) for k, v in sorted(self._c.items())}


def _determinant(m: list[list[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _solve(m: list[list[int]], rhs: list[Rational]) -> list[Fraction]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise InternalError("singular intersection matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


@dataclass(frozen=True)
class ResolutionGraph:
    """Weighted dual graph of a good resolution.

    ``vertices`` is a sequence of ``(id, self_intersection, genus)`` and
    ``edges`` a sequence of vertex-id pairs; repeating a pair records several
    intersection points between the same two curves.
    """

    vertices: tuple[tuple[str, int, int], ...]
    edges: tuple[tuple[str, str], ...] = ()
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _matrix: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        verts = tuple((str(v), int(s), int(g)) for v, s, g in self.vertices)
        edges = tuple(tuple(sorted((str(a), str(b)))) for a, b in self.edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        if not verts:
            raise PreconditionError("a resolution graph needs at least one vertex")
        index = {}
        for i, (v, s, g) in enumerate(verts):
            if v in index:
                raise PreconditionError(f"duplicate vertex {v!r}")
            if s > -1:
                raise PreconditionError(f"vertex {v!r} has self-intersection {s} > -1")
            if g < 0:
                raise PreconditionError(f"vertex {v!r} has negative genus")
            index[v] = i
        n = len(verts)
        mat = [[0] * n for _ in range(n)]
        for i, (_, s, _) in enumerate(verts):
            mat[i][i] = s
        for a, b in edges:
            if a not in index or b not in index:
                raise DomainError(f"edge {a}-{b} references an unknown vertex")
            if a == b:
                raise PreconditionError(f"loop at vertex {a!r}")
            i, j = index[a], index[b]
            mat[i][j] += 1
            mat[j][i] += 1
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_matrix", tuple(tuple(r) for r in mat))
        if not self._connected():
            raise PreconditionError("resolution graph is not connected")
        for k in range(1, n + 1):
            minor = _determinant([list(r[:k]) for r in mat[:k]])
            if (-1) ** k * minor <= 0:
                raise PreconditionError("intersection matrix is not negative definite")

    def _connected(self) -> bool:
        adj: dict[str, set[str]] = {v: set() for v in self.ids}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen, stack = {self.ids[0]}, [self.ids[0]]
        while stack:
            for w in adj[stack.pop()] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == len(self.ids)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.vertices)

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """The intersection matrix N, rows and columns in vertex order."""
        return self._matrix

    def self_intersection(self, v: str) -> int:
        return self.vertices[self._index[v]][1]

    def genus(self, v: str) -> int:
        return self.vertices[self._index[v]][2]

    def determinant(self) -> int:
        return _determinant([list(r) for r in self._matrix])

    def edge_multiplicities(self) -> Counter:
        return Counter(self.edges)

    def basis(self, v: str) -> Cycle:
        self._check({v: 1})
        return Cycle({v: 1})

    def _check(self, z: Mapping[str, Rational]) -> None:
        for v in z:
            if v not in self._index:
                raise DomainError(f"cycle references unknown vertex {v!r}")

    def dot_vertex(self, z: Cycle, v: str) -> Fraction:
        """z . E_v"""
        self._check(z)
        row = self._matrix[self._index[v]]
        return sum((c * row[self._index[k]] for k, c in z.items()), Fraction(0))


def intersect(g: ResolutionGraph, a: Cycle, b: Cycle) -> Fraction:
    """The intersection number a . b = a^T N b."""
    g._check(a)
    g._check(b)
    return sum((ca * g.dot_vertex(b, v) for v, ca in a.items()), Fraction(0))


def canonical_cycle(g: ResolutionGraph) -> Cycle:
    """Numerically canonical cycle: K . E_i = -E_i^2 + 2 g_i - 2 for every i."""
    rhs = [-s + 2 * genus - 2 for _, s, genus in g.vertices]
    sol = _solve([list(r) for r in g.matrix], rhs)
    k = Cycle(zip(g.ids, sol))
    for (v, s, genus), r in zip(g.vertices, rhs):
        if g.dot_vertex(k, v) != r:
            raise InternalError("adjunction system residual is nonzero")
    return k


def is_antinef(g: ResolutionGraph, z: Cycle) -> bool:
    return all(g.dot_vertex(z, v) <= 0 for v in g.ids)


def fundamental_cycle(g: ResolutionGraph, start: str | None = None) -> Cycle:
    """Laufer's algorithm for the minimal nonzero antinef cycle."""
    v0 = g.ids[0] if start is None else start
    z = g.basis(v0)
    while True:
        bad = next((v for v in g.ids if g.dot_vertex(z, v) > 0), None)
        if bad is None:
            return z
        z = z + Cycle({bad: 1})


def _check_ideal_cycle(g: ResolutionGraph, z: Cycle) -> None:
    g._check(z)
    if z.support != frozenset(g.ids):
        missing = sorted(set(g.ids) - z.support)
        raise PreconditionError(f"cycle must have full support; zero on {missing}")
    if any(c <= 0 for c in z.values()):
        raise PreconditionError("cycle must have strictly positive coefficients")
    if not is_antinef(g, z):
        raise PreconditionError("cycle is not antinef")


def generic_milnor(g: ResolutionGraph, z: Cycle) -> int:
    """Milnor number mu_I = 1 - z.(z - |z| - K) of a general element of the
    ideal whose exceptional cycle on ``g`` is ``z``."""
    _check_ideal_cycle(g, z)
    k = canonical_cycle(g)
    mu = 1 - intersect(g, z, z - z.reduced() - k)
    if mu.denominator != 1:
        raise InternalError(f"non-integral Milnor number {mu}; inconsistent graph data")
    if mu < 0:
        raise InternalError(f"negative Milnor number {mu}")
    return int(mu)


def multiplicity_from_cycle(g: ResolutionGraph, z: Cycle) -> int:
    """Samuel multiplicity e(I) = -z.z."""
    _check_ideal_cycle(g, z)
    e = -intersect(g, z, z)
    if e.denominator != 1 or e <= 0:
        raise InternalError(f"multiplicity {e} is not a positive integer")
    return int(e)


def discriminant_multiplicity(g: ResolutionGraph, z: Cycle) -> int:
    """Multiplicity of the discriminant of a projection given by a reduction
    of the ideal: mu_I + e(I) - 1."""
    return generic_milnor(g, z) + multiplicity_from_cycle(g, z) - 1


def mu1_mu2(g: ResolutionGraph, z_m: Cycle) -> tuple[int, int]:
    """(mu^1, mu^2) of the surface germ, from the cycle of its maximal ideal."""
    mu2 = generic_milnor(g, z_m)
    mu1 = multiplicity_from_cycle(g, z_m) - 1
    if mu1 + mu2 != discriminant_multiplicity(g, z_m):
        raise InternalError("mu^1 + mu^2 disagrees with the discriminant multiplicity")
    return mu1, mu2


def chain(self_intersections: Iterable[int], genus: int = 0) -> ResolutionGraph:
    """Linear graph E1 - E2 - ... with the given self-intersections (ids "1", "2", ...)."""
    s = list(self_intersections)
    verts = [(str(i + 1), x, genus) for i, x in enumerate(s)]
    edges = [(str(i + 1), str(i + 2)) for i in range(len(s) - 1)]
    return ResolutionGraph(tuple(verts), tuple(edges))
