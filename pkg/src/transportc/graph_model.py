"""Labeled two-colored DAGs with explicit source and out-edge orders.

Vertices are blue (they stand for a copy of the fibre) or green (they stand
for the empty manifold and evaluate to the ground field).  The orders stored
on the graph are the only orders used anywhere; nothing is inferred from
dictionary or list insertion order except through the explicit
:func:`ExpressionGraph.build` convenience constructor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    GraphError,
    IncompleteOrdering,
    ParallelEdge,
    SelfLoop,
    UnknownVertex,
)

BLUE = "blue"
GREEN = "green"
COLORS = (BLUE, GREEN)

Edge = tuple[str, str]


@dataclass(frozen=True)
class Vertex:
    id: str
    label: str
    color: str = BLUE


@dataclass(frozen=True, eq=False)
class ExpressionGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    source_order: tuple[str, ...]
    out_orders: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        edges: Iterable[Edge],
        vertices: Iterable = (),
        source_order: Iterable[str] | None = None,
        out_orders: Mapping[str, Iterable[str]] | None = None,
    ) -> "ExpressionGraph":
        """Convenience constructor.

        ``vertices`` may hold :class:`Vertex` objects, ``(id, label, color)``
        tuples or bare ids.  Vertices mentioned only in ``edges`` are blue and
        labeled by their id.  When ``source_order`` or an out-order is not
        given, the order in which the vertices/edges were listed is used.
        """
        edges = [(str(u), str(v)) for u, v in edges]
        vs: dict[str, Vertex] = {}
        for item in vertices:
            if isinstance(item, Vertex):
                v = item
            elif isinstance(item, (tuple, list)):
                vid = str(item[0])
                label = str(item[1]) if len(item) > 1 else vid
                color = item[2] if len(item) > 2 else BLUE
                v = Vertex(vid, label, color)
            else:
                v = Vertex(str(item), str(item))
            vs[v.id] = v
        for u, w in edges:
            for x in (u, w):
                if x not in vs:
                    vs[x] = Vertex(x, x)
        order = list(vs)
        indeg = {x: 0 for x in order}
        for _, w in edges:
            indeg[w] += 1
        if source_order is None:
            source_order = [x for x in order if indeg[x] == 0]
        outs: dict[str, list[str]] = {}
        for u, w in edges:
            outs.setdefault(u, []).append(w)
        if out_orders:
            for u, targets in out_orders.items():
                outs[str(u)] = [str(t) for t in targets]
        return cls(
            tuple(vs[x] for x in order),
            tuple(edges),
            tuple(str(s) for s in source_order),
            {u: tuple(ts) for u, ts in outs.items()},
        )

    # lookup tables -------------------------------------------------------
    @cached_property
    def vertex(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def preds(self) -> dict[str, list[str]]:
        p: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for u, w in self.edges:
            p[w].append(u)
        return p

    @cached_property
    def succs(self) -> dict[str, tuple[str, ...]]:
        return {v.id: tuple(self.out_orders.get(v.id, ())) for v in self.vertices}

    def label(self, vid: str) -> str:
        return self.vertex[vid].label

    def color(self, vid: str) -> str:
        return self.vertex[vid].color

    def outdeg(self, vid: str) -> int:
        return len(self.succs[vid])

    def indeg(self, vid: str) -> int:
        return len(self.preds[vid])

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"ExpressionGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class LevelOrdering:
    levels: tuple[tuple[str, ...], ...]

    @cached_property
    def position(self) -> dict[str, tuple[int, int]]:
        return {v: (k, i) for k, lev in enumerate(self.levels) for i, v in enumerate(lev)}

    def level_of(self, vid: str) -> int:
        return self.position[vid][0]

    def flat(self) -> list[str]:
        return [v for lev in self.levels for v in lev]

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Boundary:
    """Ordered boundary slots ``(vertex id, color)``."""

    slots: tuple[tuple[str, str], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s[0] for s in self.slots)

    @property
    def colors(self) -> tuple[str, ...]:
        return tuple(s[1] for s in self.slots)

    @property
    def blue_count(self) -> int:
        return sum(c == BLUE for c in self.colors)

    def __len__(self) -> int:
        return len(self.slots)


def validate(g: ExpressionGraph) -> ExpressionGraph:
    """Check the structural invariants and return ``g`` unchanged."""
    seen: set[str] = set()
    for v in g.vertices:
        if v.id in seen:
            raise GraphError(f"duplicate vertex id {v.id!r}")
        seen.add(v.id)
        if not v.label:
            raise GraphError(f"vertex {v.id!r} has an empty label")
        if v.color not in COLORS:
            raise GraphError(f"vertex {v.id!r} has color {v.color!r}")
    edge_seen: set[Edge] = set()
    for u, w in g.edges:
        for x in (u, w):
            if x not in seen:
                raise UnknownVertex(f"edge ({u}, {w}) mentions unknown vertex {x!r}")
        if u == w:
            raise SelfLoop(f"self-loop at {u!r}")
        if (u, w) in edge_seen:
            raise ParallelEdge(f"parallel edge ({u}, {w})")
        edge_seen.add((u, w))

    # out-orders: a permutation of the out-neighbours of each vertex
    outs: dict[str, set[str]] = {}
    for u, w in g.edges:
        outs.setdefault(u, set()).add(w)
    for u, order in g.out_orders.items():
        if u not in seen:
            raise UnknownVertex(f"out-order given for unknown vertex {u!r}")
        if len(order) != len(set(order)) or set(order) != outs.get(u, set()):
            raise IncompleteOrdering(f"out-order of {u!r} is not a permutation of its targets")
    for u in outs:
        if u not in g.out_orders:
            raise IncompleteOrdering(f"vertex {u!r} has out-edges but no out-order")

    srcs = {v.id for v in g.vertices if not g.preds[v.id]}
    so = list(g.source_order)
    if len(so) != len(set(so)) or set(so) != srcs:
        raise IncompleteOrdering("source order is not a permutation of the sources")

    _topological(g)
    return g


def _topological(g: ExpressionGraph) -> list[str]:
    indeg = {v.id: 0 for v in g.vertices}
    for _, w in g.edges:
        indeg[w] += 1
    stack = [v for v in g.source_order if indeg.get(v) == 0][::-1]
    stack += [v.id for v in g.vertices if indeg[v.id] == 0 and v.id not in g.source_order]
    out = []
    while stack:
        u = stack.pop()
        out.append(u)
        for w in g.succs.get(u, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    if len(out) != len(g.vertices):
        stuck = sorted(v for v, d in indeg.items() if d > 0)
        raise CycleDetected(f"cycle through {stuck[:5]}")
    return out


def level_order(g: ExpressionGraph) -> LevelOrdering:
    """Partition into levels and order each level.

    Level one is the source order.  A vertex sits on level ``k+1`` when all
    its in-neighbours sit on levels ``<= k`` and one of them on level ``k``.
    Within a level, vertices are listed by walking the previous level in
    order and taking each vertex's out-neighbours in out-order.
    """
    topo = _topological(g)
    depth: dict[str, int] = {}
    for u in topo:
        ps = g.preds[u]
        depth[u] = 1 + max(depth[p] for p in ps) if ps else 0
    if not g.vertices:
        return LevelOrdering(())
    levels = [list(g.source_order)]
    nlev = max(depth.values()) + 1
    for k in range(1, nlev):
        lev: list[str] = []
        seen: set[str] = set()
        for u in levels[-1]:
            for w in g.succs[u]:
                if depth[w] == k and w not in seen:
                    seen.add(w)
                    lev.append(w)
        levels.append(lev)
    if sum(map(len, levels)) != len(g.vertices) or any(depth[v] for v in levels[0]):
        raise IncompleteOrdering("source order does not list exactly the sources")
    return LevelOrdering(tuple(tuple(lev) for lev in levels))


def in_edge_order(g: ExpressionGraph, v: str, levels: LevelOrdering | None = None) -> list[Edge]:
    """In-edges of ``v`` ordered by the level ordering of their sources."""
    if v not in g.vertex:
        raise UnknownVertex(f"unknown vertex {v!r}")
    levels = levels or level_order(g)
    pos = levels.position
    return [(u, v) for u in sorted(g.preds[v], key=lambda u: pos[u])]


def sources(g: ExpressionGraph) -> Boundary:
    return Boundary(tuple((v, g.color(v)) for v in g.source_order))


def targets(g: ExpressionGraph) -> Boundary:
    """Target boundary.

    The target vertices are the vertices without out-edges.  Their order is
    the order of the last level once the graph has been brought into reduced
    form (targets that sit early are extended by identity chains), read back
    through the reduction's provenance.
    """
    from .reduction import reduce

    if not g.vertices:
        return Boundary(())
    r = reduce(g)
    last = level_order(r.graph).levels[-1]
    ids = [r.vertex_origin[v] for v in last]
    return Boundary(tuple((v, g.color(v)) for v in ids))


def find_expression_iso(g: ExpressionGraph, h: ExpressionGraph) -> dict[str, str] | None:
    """Return the vertex bijection preserving levels, orders, labels and colors."""
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    lg, lh = level_order(g), level_order(h)
    if [len(x) for x in lg.levels] != [len(x) for x in lh.levels]:
        return None
    f = {a: b for la, lb in zip(lg.levels, lh.levels) for a, b in zip(la, lb)}
    for a, b in f.items():
        if g.label(a) != h.label(b) or g.color(a) != h.color(b):
            return None
        if tuple(f[x] for x in g.succs[a]) != h.succs[b]:
            return None
    return f


def is_identity_edge(g: ExpressionGraph, e: Edge) -> bool:
    u, v = e
    return g.label(u) == g.label(v) and g.color(u) == g.color(v)
