"""Rewrite passes that bring an expression graph into reduced form.

Each pass copies vertices (copies keep the label and color of the vertex
they duplicate) and reroutes edges.  Provenance records, for every vertex of
the output, the original vertex it copies, and for every edge either the
original edge whose data it carries or ``None`` for an inserted identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .graph_model import (
    Edge,
    ExpressionGraph,
    Vertex,
    in_edge_order,
    level_order,
)

INSERTED = None  # marker used in ReducedGraph.edge_origin


@dataclass(frozen=True, eq=False)
class ReducedGraph:
    graph: ExpressionGraph
    vertex_origin: dict[str, str]
    edge_origin: dict[Edge, Edge | None]

    def provenance(self, item):
        """Original vertex id or edge for ``item``; ``"inserted-identity"`` for new edges."""
        if isinstance(item, tuple):
            o = self.edge_origin[item]
            return "inserted-identity" if o is None else o
        return self.vertex_origin[item]


GraphLike = Union[ExpressionGraph, ReducedGraph]


class _Work:
    """Mutable copy of a graph plus provenance."""

    def __init__(self, src: GraphLike):
        if isinstance(src, ReducedGraph):
            g, vo, eo = src.graph, dict(src.vertex_origin), dict(src.edge_origin)
        else:
            g = src
            vo = {v.id: v.id for v in g.vertices}
            eo = {e: e for e in g.edges}
        self.vorder = [v.id for v in g.vertices]
        self.label = {v.id: v.label for v in g.vertices}
        self.color = {v.id: v.color for v in g.vertices}
        self.out = {v: list(g.succs[v]) for v in self.vorder}
        self.sources = list(g.source_order)
        self.vorigin = vo
        self.eorigin = eo
        self._counter = 0

    def graph(self) -> ExpressionGraph:
        vs = tuple(Vertex(v, self.label[v], self.color[v]) for v in self.vorder)
        edges = tuple((u, w) for u in self.vorder for w in self.out[u])
        outs = {u: tuple(ws) for u, ws in self.out.items() if ws}
        return ExpressionGraph(vs, edges, tuple(self.sources), outs)

    def result(self) -> ReducedGraph:
        return ReducedGraph(self.graph(), self.vorigin, self.eorigin)

    def copy_of(self, v: str) -> str:
        base = self.vorigin[v]
        while True:
            self._counter += 1
            new = f"{base}~{self._counter}"
            if new not in self.label:
                break
        self.vorder.append(new)
        self.label[new] = self.label[v]
        self.color[new] = self.color[v]
        self.out[new] = []
        self.vorigin[new] = base
        return new

    def add_edge(self, u: str, w: str, origin: Edge | None):
        self.out[u].append(w)
        self.eorigin[(u, w)] = origin

    def reroute(self, u: str, old: str, new: str, origin: Edge | None):
        """Replace edge (u, old) by (u, new), keeping its slot in u's out-order."""
        i = self.out[u].index(old)
        self.out[u][i] = new
        del self.eorigin[(u, old)]
        self.eorigin[(u, new)] = origin

    def drop_edge(self, u: str, w: str) -> Edge | None:
        self.out[u].remove(w)
        return self.eorigin.pop((u, w))


def split_fan_in(g: GraphLike) -> ReducedGraph:
    """Replace every k-ary merge (k > 2) by a chain of binary merges."""
    w = _Work(g)
    cur = w.graph()
    lv = level_order(cur)
    for v in lv.flat():
        ins = [u for u, _ in in_edge_order(cur, v, lv)]
        if len(ins) <= 2:
            continue
        # ins[0], ins[1] merge into the first copy; each later input joins
        # the chain one step further; the last step is v itself
        prev = None
        for j, u in enumerate(ins[:-1]):
            if j == 0:
                continue
            c = w.copy_of(v)
            if prev is None:
                w.reroute(ins[0], v, c, w.eorigin[(ins[0], v)])
            else:
                w.add_edge(prev, c, INSERTED)
            w.reroute(u, v, c, w.eorigin[(u, v)])
            prev = c
        w.add_edge(prev, v, INSERTED)
    return w.result()


def split_fan_out(g: GraphLike) -> ReducedGraph:
    """Replace every k-ary split (k > 2) by a chain of binary splits.

    The vertex keeps its last out-neighbour; the first two out-neighbours are
    split off by the deepest copy.
    """
    w = _Work(g)
    for v in list(w.vorder):
        outs = list(w.out[v])
        k = len(outs)
        if k <= 2:
            continue
        origins = [w.drop_edge(v, x) for x in outs]
        # copies c[0] (deepest, splits outs[0], outs[1]) ... c[k-3]
        copies = [w.copy_of(v) for _ in range(k - 2)]
        w.add_edge(copies[0], outs[0], origins[0])
        w.add_edge(copies[0], outs[1], origins[1])
        for j in range(1, k - 2):
            w.add_edge(copies[j], copies[j - 1], INSERTED)
            w.add_edge(copies[j], outs[j + 1], origins[j + 1])
        w.add_edge(v, copies[-1], INSERTED)
        w.add_edge(v, outs[-1], origins[-1])
    return w.result()


def _find_shared(g: ExpressionGraph, lv) -> Edge | None:
    for u in lv.flat():
        if len(g.succs[u]) != 2:
            continue
        for t in g.succs[u]:
            if len(g.preds[t]) == 2:
                return (u, t)
    return None


def separate_shared(g: GraphLike) -> ReducedGraph:
    """Remove every edge that leaves a split and enters a merge.

    Rewrites are applied to the first such edge in level order until none is
    left; each rewrite lowers the number of shared edges by at least one.
    """
    w = _Work(g)
    while True:
        cur = w.graph()
        lv = level_order(cur)
        s = _find_shared(cur, lv)
        if s is None:
            return w.result()
        u, t = s
        o = next(x for x in cur.succs[u] if x != t)
        ins = [a for a, _ in in_edge_order(cur, t, lv)]
        p = next(a for a in ins if a != u)
        if o == p:
            _triangle(w, u, t)
        else:
            out_first = cur.succs[u][0] == t
            in_first = ins[0] == u
            if out_first != in_first:
                _pants_apart(w, u, t, o, p)
            else:
                _pants_crossed(w, u, t, o, p)


def _triangle(w: _Work, u: str, t: str):
    # u -> o -> t together with u -> t: subdivide the short side
    a = w.copy_of(t)
    origin = w.eorigin[(u, t)]
    w.reroute(u, t, a, origin)
    w.add_edge(a, t, INSERTED)


def _pants_apart(w: _Work, u: str, t: str, o: str, p: str):
    a, b, c = w.copy_of(o), w.copy_of(t), w.copy_of(p)
    w.reroute(u, o, a, w.eorigin[(u, o)])
    w.add_edge(a, o, INSERTED)
    w.reroute(u, t, b, w.eorigin[(u, t)])
    w.add_edge(b, t, INSERTED)
    pt = w.eorigin[(p, t)]
    w.reroute(p, t, c, INSERTED)
    w.add_edge(c, t, pt)


def _pants_crossed(w: _Work, u: str, t: str, o: str, p: str):
    # the two strands cross, so the copies get an extra level to cross on
    a, aa = w.copy_of(t), w.copy_of(t)
    b, cc = w.copy_of(o), w.copy_of(o)
    c, bb = w.copy_of(p), w.copy_of(t)
    w.reroute(u, t, a, w.eorigin[(u, t)])
    w.add_edge(a, aa, INSERTED)
    w.add_edge(aa, t, INSERTED)
    w.reroute(u, o, b, w.eorigin[(u, o)])
    w.add_edge(b, cc, INSERTED)
    w.add_edge(cc, o, INSERTED)
    pt = w.eorigin[(p, t)]
    w.reroute(p, t, c, INSERTED)
    w.add_edge(c, bb, pt)
    w.add_edge(bb, t, INSERTED)


def normalize_levels(g: GraphLike) -> ReducedGraph:
    """Extend early targets to the last level and subdivide level-skipping edges."""
    w = _Work(g)
    cur = w.graph()
    lv = level_order(cur)
    if not lv.levels:
        return w.result()
    last = len(lv) - 1
    for v in lv.flat():
        k = lv.level_of(v)
        if not cur.succs[v] and k < last:
            prev = v
            for _ in range(last - k):
                c = w.copy_of(v)
                w.add_edge(prev, c, INSERTED)
                prev = c
    for u in lv.flat():
        ku = lv.level_of(u)
        for x in cur.succs[u]:
            gap = lv.level_of(x) - ku
            if gap <= 1:
                continue
            origin = w.eorigin[(u, x)]
            chain = [w.copy_of(u) for _ in range(gap - 1)]
            w.reroute(u, x, chain[0], INSERTED)
            for a, b in zip(chain, chain[1:]):
                w.add_edge(a, b, INSERTED)
            w.add_edge(chain[-1], x, origin)
    return w.result()


def reduce(g: GraphLike) -> ReducedGraph:
    """Full pipeline; the result satisfies :func:`is_reduced`."""
    return normalize_levels(separate_shared(split_fan_out(split_fan_in(g))))


def is_reduced(g: GraphLike) -> bool:
    if isinstance(g, ReducedGraph):
        g = g.graph
    if not g.vertices:
        return True
    lv = level_order(g)
    last = len(lv) - 1
    for v in g.vertex:
        if g.indeg(v) > 2 or g.outdeg(v) > 2:
            return False
        if not g.succs[v] and lv.level_of(v) != last:
            return False
    for u, x in g.edges:
        if lv.level_of(x) != lv.level_of(u) + 1:
            return False
        if g.outdeg(u) == 2 and g.indeg(x) == 2:
            return False
    return True
