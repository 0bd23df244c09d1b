"""Weighted undirected graphs with loops, Hamiltonians and twin detection."""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "GraphFormatError",
    "HamiltonianKind",
    "WeightedGraph",
    "Hamiltonian",
    "TwinSet",
    "build_hamiltonian",
    "are_twins",
    "twin_sets",
    "twin_set_of",
    "theta_of",
    "parse_weight",
    "parse_graph",
    "load_graph",
    "dump_graph",
]

Weight = "Fraction | float"


class GraphFormatError(ValueError):
    """Malformed graph text."""


class HamiltonianKind(str, enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"

    @classmethod
    def parse(cls, value) -> "HamiltonianKind":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        for k in cls:
            if k.value.startswith(v) and v:
                return k
        raise ValueError(f"unknown Hamiltonian kind {value!r}")


def parse_weight(text) -> Fraction | float:
    """Exact Fraction for ints, decimals and ``p/q`` text; float otherwise."""
    if isinstance(text, bool):
        raise TypeError("bool is not a weight")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, numbers.Real) and not isinstance(text, str):
        x = float(text)
        if not math.isfinite(x):
            raise ValueError("weight must be finite")
        return x
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse weight {text!r}") from exc


def _is_zero(w) -> bool:
    return w == 0


@dataclass(frozen=True)
class WeightedGraph:
    """Connected or not, undirected, no multi-edges, nonzero real weights.

    ``edges`` maps ``(u, v)`` with ``u < v`` to a weight; ``loops`` maps a
    vertex to its loop weight.  Weights are Fractions when exact.
    """

    n: int
    edges: Mapping[tuple[int, int], Fraction | float] = field(default_factory=dict)
    loops: Mapping[int, Fraction | float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        edges: dict[tuple[int, int], Fraction | float] = {}
        for (u, v), w in dict(self.edges).items():
            u, v = int(u), int(v)
            self._check_vertex(u)
            self._check_vertex(v)
            if u == v:
                raise ValueError("use loops for (u, u) entries")
            key = (min(u, v), max(u, v))
            w = parse_weight(w)
            if key in edges and edges[key] != w:
                raise ValueError(f"conflicting weights for edge {key}")
            if not _is_zero(w):
                edges[key] = w
        loops = {}
        for u, w in dict(self.loops).items():
            self._check_vertex(int(u))
            w = parse_weight(w)
            if not _is_zero(w):
                loops[int(u)] = w
        object.__setattr__(self, "edges", dict(sorted(edges.items())))
        object.__setattr__(self, "loops", dict(sorted(loops.items())))

    def _check_vertex(self, u: int):
        if not 0 <= u < self.n:
            raise IndexError(f"vertex {u} out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, loops: Mapping | None = None, name: str = ""):
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; missing weights are 1."""
        emap = {}
        for e in edges:
            u, v, *w = e
            emap[(u, v)] = w[0] if w else 1
        return cls(n, emap, loops or {}, name)

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for w in (*self.edges.values(), *self.loops.values()))

    def weight(self, u: int, v: int):
        if u == v:
            return self.loops.get(u, Fraction(0))
        return self.edges.get((min(u, v), max(u, v)), Fraction(0))

    def neighbors(self, u: int) -> set[int]:
        out = {b if a == u else a for (a, b) in self.edges if u in (a, b)}
        return out

    def degree(self, u: int):
        """``2*loop + sum of incident edge weights``."""
        return 2 * self.weight(u, u) + sum((w for (a, b), w in self.edges.items() if u in (a, b)), Fraction(0))

    def components(self) -> list[list[int]]:
        adj: dict[int, set[int]] = {u: set() for u in range(self.n)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen, comps = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    @property
    def connected(self) -> bool:
        return len(self.components()) == 1

    def subgraph(self, vertices: Iterable[int]) -> tuple["WeightedGraph", list[int]]:
        """Induced subgraph relabelled ``0..k-1``; also returns the old labels."""
        verts = sorted(set(vertices))
        index = {v: i for i, v in enumerate(verts)}
        edges = {(index[a], index[b]): w for (a, b), w in self.edges.items() if a in index and b in index}
        loops = {index[u]: w for u, w in self.loops.items() if u in index}
        return WeightedGraph(len(verts), edges, loops, self.name), verts

    def exact_adjacency(self) -> list[list]:
        a = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (u, v), w in self.edges.items():
            a[u][v] = a[v][u] = w
        for u, w in self.loops.items():
            a[u][u] = w
        return a


@dataclass(frozen=True)
class Hamiltonian:
    kind: HamiltonianKind
    matrix: np.ndarray
    exact: list | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.exact is not None


def build_hamiltonian(g: WeightedGraph, kind="adjacency") -> Hamiltonian:
    kind = HamiltonianKind.parse(kind)
    a = g.exact_adjacency()
    if kind is HamiltonianKind.LAPLACIAN:
        m = [[-x for x in row] for row in a]
        for u in range(g.n):
            m[u][u] = g.degree(u) - a[u][u]
    else:
        m = a
    numeric = np.array([[float(x) for x in row] for row in m], dtype=float)
    exact = m if g.exact else None
    return Hamiltonian(kind, numeric, exact)


def _same(x, y) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    return math.isclose(float(x), float(y), rel_tol=1e-12, abs_tol=1e-12)


def are_twins(g: WeightedGraph, u: int, v: int) -> bool:
    """Same neighbours outside ``{u, v}`` with equal weights, and equal loops."""
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        raise ValueError("twins must be distinct vertices")
    if not _same(g.weight(u, u), g.weight(v, v)):
        return False
    return all(_same(g.weight(u, w), g.weight(v, w)) for w in range(g.n) if w not in (u, v))


@dataclass(frozen=True)
class TwinSet:
    vertices: tuple[int, ...]
    omega: Fraction | float
    eta: Fraction | float

    @property
    def true_twins(self) -> bool:
        return not _is_zero(self.eta)

    @property
    def kind(self) -> str:
        return "true" if self.true_twins else "false"

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, u) -> bool:
        return u in self.vertices


def twin_sets(g: WeightedGraph) -> list[TwinSet]:
    """Maximal sets of pairwise twins, singletons omitted, ordered by first vertex."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u in range(g.n):
        for v in range(u + 1, g.n):
            if find(u) != find(v) and are_twins(g, u, v):
                parent[find(v)] = find(u)
    groups: dict[int, list[int]] = {}
    for u in range(g.n):
        groups.setdefault(find(u), []).append(u)
    out = []
    for members in groups.values():
        if len(members) < 2:
            continue
        u, v = members[0], members[1]
        out.append(TwinSet(tuple(members), g.weight(u, u), g.weight(u, v)))
    return sorted(out, key=lambda t: t.vertices)


def twin_set_of(g: WeightedGraph, u: int) -> TwinSet | None:
    for ts in twin_sets(g):
        if u in ts:
            return ts
    return None


def theta_of(ts: TwinSet, g: WeightedGraph, kind="adjacency"):
    """Eigenvalue of ``e_u - e_v`` for twins in ``ts``."""
    if not ts.vertices:
        raise ValueError("empty twin set")
    kind = HamiltonianKind.parse(kind)
    if kind is HamiltonianKind.ADJACENCY:
        return ts.omega - ts.eta
    return g.degree(ts.vertices[0]) - ts.omega + ts.eta


# ---------------------------------------------------------------------------
# text format:  "n <count>", "e u v w", "l u w", '#' comments
# ---------------------------------------------------------------------------


def parse_graph(text: str, name: str = "") -> WeightedGraph:
    n = None
    edges: dict[tuple[int, int], object] = {}
    loops: dict[int, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0].lower()
        try:
            if tag == "n":
                if n is not None or len(parts) != 2:
                    raise GraphFormatError("bad or repeated header")
                n = int(parts[1])
            elif tag == "e":
                if len(parts) != 4:
                    raise GraphFormatError("edge lines are 'e u v w'")
                u, v = int(parts[1]), int(parts[2])
                key = (min(u, v), max(u, v))
                if key in edges:
                    raise GraphFormatError(f"duplicate edge {key}")
                edges[key] = parse_weight(parts[3])
            elif tag == "l":
                if len(parts) != 3:
                    raise GraphFormatError("loop lines are 'l u w'")
                u = int(parts[1])
                if u in loops:
                    raise GraphFormatError(f"duplicate loop at {u}")
                loops[u] = parse_weight(parts[2])
            else:
                raise GraphFormatError(f"unknown record {parts[0]!r}")
        except GraphFormatError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphFormatError("missing 'n <count>' header")
    try:
        return WeightedGraph(n, edges, loops, name)
    except (ValueError, IndexError) as exc:
        raise GraphFormatError(str(exc)) from None


def load_graph(path) -> WeightedGraph:
    p = Path(path)
    return parse_graph(p.read_text(), name=p.stem)


def dump_graph(g: WeightedGraph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"e {u} {v} {w}" for (u, v), w in g.edges.items()]
    lines += [f"l {u} {w}" for u, w in g.loops.items()]
    return "\n".join(lines) + "\n"
