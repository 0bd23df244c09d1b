"""Named graph families with fixed vertex labels.

Labels (0-indexed):

* ``complete(m, omega, eta)``: vertices ``0..m-1``, loop ``omega`` at every
  vertex, every edge weighted ``eta``.
* ``complete_bipartite(m, n)``: ``0..m-1`` form the part of size ``m``.
* ``complete_multipartite(sizes)``: parts listed in order.
* ``cocktail_party(m)``: ``2m`` vertices; ``2i`` and ``2i+1`` are the
  non-adjacent (false twin) pairs.
* ``complete_minus_edge(m)``: the missing edge is ``{1, 2}``.
* ``path(n)``, ``cycle(n)``: consecutive labels.
* ``star(n)``: ``K_{1,n}`` with center ``0`` and leaves ``1..n``.
* ``empty(m)``: ``m`` isolated vertices.
* ``join(x, y)``: ``x`` keeps its labels, ``y`` is shifted by ``x.n``.
* ``figure2``: pendants ``0`` and ``1`` attached to ``2``; path ``2-3-4``.
"""

from __future__ import annotations

from itertools import combinations

from .graph import WeightedGraph, parse_weight

__all__ = [
    "complete",
    "complete_bipartite",
    "complete_multipartite",
    "cocktail_party",
    "complete_minus_edge",
    "path",
    "cycle",
    "star",
    "empty",
    "join",
    "figure2",
    "FAMILIES",
    "generate_family",
    "parse_family_spec",
]


def _need(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


def complete(m: int, omega=0, eta=1) -> WeightedGraph:
    _need(m >= 1, "complete graph needs m >= 1")
    eta = parse_weight(eta)
    _need(eta != 0 or m == 1, "eta must be nonzero")
    edges = {(u, v): eta for u, v in combinations(range(m), 2)}
    loops = {u: omega for u in range(m)}
    return WeightedGraph(m, edges, loops, f"K{m}({omega},{eta})")


def complete_multipartite(sizes) -> WeightedGraph:
    sizes = [int(s) for s in sizes]
    _need(len(sizes) >= 1 and all(s >= 1 for s in sizes), "part sizes must be >= 1")
    part = [i for i, s in enumerate(sizes) for _ in range(s)]
    n = len(part)
    edges = {(u, v): 1 for u, v in combinations(range(n), 2) if part[u] != part[v]}
    return WeightedGraph(n, edges, name="K" + ",".join(map(str, sizes)))


def complete_bipartite(m: int, n: int) -> WeightedGraph:
    _need(m >= 1 and n >= 1, "complete bipartite needs m, n >= 1")
    return complete_multipartite([m, n])


def cocktail_party(m: int) -> WeightedGraph:
    _need(m >= 1, "cocktail party needs m >= 1")
    n = 2 * m
    edges = {(u, v): 1 for u, v in combinations(range(n), 2) if u // 2 != v // 2}
    return WeightedGraph(n, edges, name=f"CP({m})")


def complete_minus_edge(m: int) -> WeightedGraph:
    _need(m >= 3, "complete minus an edge needs m >= 3")
    edges = {(u, v): 1 for u, v in combinations(range(m), 2) if (u, v) != (1, 2)}
    return WeightedGraph(m, edges, name=f"K{m}-e")


def path(n: int) -> WeightedGraph:
    _need(n >= 1, "path needs n >= 1")
    return WeightedGraph(n, {(i, i + 1): 1 for i in range(n - 1)}, name=f"P{n}")


def cycle(n: int) -> WeightedGraph:
    _need(n >= 3, "cycle needs n >= 3")
    edges = {(i, (i + 1) % n): 1 for i in range(n)}
    return WeightedGraph(n, edges, name=f"C{n}")


def star(n: int) -> WeightedGraph:
    _need(n >= 1, "star needs n >= 1")
    return complete_bipartite(1, n)


def empty(m: int) -> WeightedGraph:
    _need(m >= 1, "empty graph needs m >= 1")
    return WeightedGraph(m, name=f"O{m}")


def join(x: WeightedGraph, y: WeightedGraph) -> WeightedGraph:
    k = x.n
    edges = dict(x.edges)
    edges.update({(a + k, b + k): w for (a, b), w in y.edges.items()})
    edges.update({(u, k + v): 1 for u in range(x.n) for v in range(y.n)})
    loops = dict(x.loops)
    loops.update({u + k: w for u, w in y.loops.items()})
    return WeightedGraph(x.n + y.n, edges, loops, f"({x.name})v({y.name})")


def figure2() -> WeightedGraph:
    return WeightedGraph.from_edges(5, [(0, 2), (1, 2), (2, 3), (3, 4)], name="P3+2pendants")


FAMILIES = {
    "complete": (complete, ("m",), ("omega", "eta")),
    "complete_bipartite": (complete_bipartite, ("m", "n"), ()),
    "complete_multipartite": (complete_multipartite, ("sizes",), ()),
    "cocktail_party": (cocktail_party, ("m",), ()),
    "complete_minus_edge": (complete_minus_edge, ("m",), ()),
    "path": (path, ("n",), ()),
    "cycle": (cycle, ("n",), ()),
    "star": (star, ("n",), ()),
    "empty": (empty, ("m",), ()),
    "join": (join, ("left", "right"), ()),
    "figure2": (figure2, (), ()),
}


def generate_family(name: str, **params) -> WeightedGraph:
    """Build a family member; ``join`` takes ``left``/``right`` graphs or spec strings."""
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    fn, required, optional = FAMILIES[name]
    missing = [p for p in required if params.get(p) is None]
    if missing:
        raise ValueError(f"family {name!r} needs parameter(s): {', '.join(missing)}")
    kwargs = {p: params[p] for p in (*required, *optional) if params.get(p) is not None}
    if name == "join":
        parts = [v if isinstance(v, WeightedGraph) else parse_family_spec(v) for v in (kwargs["left"], kwargs["right"])]
        return join(*parts)
    elif name == "complete_multipartite":
        sizes = kwargs["sizes"]
        kwargs["sizes"] = [int(s) for s in sizes.split(",")] if isinstance(sizes, str) else sizes
    else:
        kwargs = {k: (v if k in ("omega", "eta") else int(v)) for k, v in kwargs.items()}
    return fn(**kwargs)


def parse_family_spec(spec: str) -> WeightedGraph:
    """``"name:key=value,key=value"``, e.g. ``"complete:m=3,eta=1/2"``."""
    name, _, rest = spec.partition(":")
    params: dict[str, object] = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"bad family parameter {item!r}")
        params[key.strip()] = value.strip()
    if name.strip() == "complete_multipartite" and "sizes" in params:
        params["sizes"] = str(params["sizes"]).replace("/", ",")
    return generate_family(name.strip(), **params)

