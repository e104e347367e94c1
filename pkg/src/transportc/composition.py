"""Disjoint union, gluing and formal sums of graphs.

Transport graphs live on rectangular charts.  Both disjoint union and gluing
place the second operand's chart to the right of the first one, translating
its paths, so a composite is always laid out left to right along ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NotGluable, SegmentOutOfRange
from .graph_model import (
    BLUE,
    Boundary,
    Edge,
    ExpressionGraph,
    Vertex,
    sources,
    targets,
)
from .transport import (
    Bump,
    ConnectionSpec,
    ConstantConnection,
    GluedConnection,
    PathSpec,
)

Chart = tuple[float, float, float, float]
DEFAULT_CHART: Chart = (0.0, 1.0, 0.0, 1.0)
PAD_WIDTH = 1.0


@dataclass(frozen=True, eq=False)
class TransportGraph:
    graph: ExpressionGraph
    realization: dict[Edge, PathSpec]
    chart: Chart = DEFAULT_CHART

    def __post_init__(self):
        missing = [e for e in self.graph.edges if e not in self.realization]
        if missing:
            raise ValueError(f"edges without a path: {missing[:3]}")

    @classmethod
    def build(cls, graph: ExpressionGraph, realization=None, chart: Chart = DEFAULT_CHART):
        """Fill in a constant path at the chart centre for edges not given one."""
        real = dict(realization or {})
        centre = (0.5 * (chart[0] + chart[1]), 0.5 * (chart[2] + chart[3]))
        for e in graph.edges:
            real.setdefault(e, PathSpec.constant(centre))
        return cls(graph, real, tuple(float(c) for c in chart))

    def sources(self) -> Boundary:
        return sources(self.graph)

    def targets(self) -> Boundary:
        return targets(self.graph)


def _graph(x) -> ExpressionGraph:
    return x.graph if isinstance(x, TransportGraph) else x


def _fresh_ids(taken: set[str], ids: Sequence[str], keep: dict[str, str] | None = None):
    rename = dict(keep or {})
    for vid in ids:
        if vid in rename:
            continue
        new = vid
        while new in taken:
            new += "'"
        rename[vid] = new
        taken.add(new)
    return rename


def _merge(g: ExpressionGraph, h: ExpressionGraph, rename: dict[str, str],
           glued: set[str], source_order, relabel=None) -> ExpressionGraph:
    """Union of ``g`` and renamed ``h``; ``glued`` are h-vertices mapped onto g."""
    relabel = relabel or {}
    vertices = list(g.vertices)
    for v in h.vertices:
        if v.id not in glued:
            vertices.append(Vertex(rename[v.id], relabel.get(v.label, v.label), v.color))
    edges = list(g.edges) + [(rename[u], rename[w]) for u, w in h.edges]
    outs = {u: tuple(ws) for u, ws in g.out_orders.items()}
    for u, ws in h.out_orders.items():
        if ws:
            outs[rename[u]] = tuple(rename[w] for w in ws)
    return ExpressionGraph(tuple(vertices), tuple(edges), tuple(source_order), outs)


def _place(g: TransportGraph, h: TransportGraph, graph: ExpressionGraph, rename) -> TransportGraph:
    dx = g.chart[1] - h.chart[0]
    real = dict(g.realization)
    for (u, w), p in h.realization.items():
        real[(rename[u], rename[w])] = p.translated(dx, 0.0)
    width = h.chart[1] - h.chart[0]
    chart = (g.chart[0], g.chart[1] + width, min(g.chart[2], h.chart[2]), max(g.chart[3], h.chart[3]))
    return TransportGraph(graph, real, chart)


def place_connections(left: ConnectionSpec, left_chart: Chart,
                      right: ConnectionSpec, right_chart: Chart) -> ConnectionSpec:
    """Connection on the side-by-side layout used by union and gluing."""
    if isinstance(left, ConstantConnection) and isinstance(right, ConstantConnection):
        if (left.cx == right.cx).all() and (left.cy == right.cy).all():
            return left
    seam = left_chart[1]
    dx = seam - right_chart[0]
    return GluedConnection(left, right.translated(dx, 0.0), Bump.at(seam), seam)


def disjoint_union(g, h):
    """``g`` followed by ``h``; sources and targets concatenate."""
    gg, hh = _graph(g), _graph(h)
    rename = _fresh_ids({v.id for v in gg.vertices}, [v.id for v in hh.vertices])
    so = list(gg.source_order) + [rename[s] for s in hh.source_order]
    graph = _merge(gg, hh, rename, set(), so)
    if isinstance(g, TransportGraph) and isinstance(h, TransportGraph):
        return _place(g, h, graph, rename)
    return graph


def _align(src: Boundary, tgt: Boundary):
    """Pair the slots of ``src`` (later graph) and ``tgt`` (earlier graph).

    Blue slots pair in order.  Between consecutive blue slots, green slots pair
    in order; leftover greens on either side face the empty manifold.
    Returns (pairs, unpaired later-graph greens).
    """
    def runs(b: Boundary):
        blues, gaps, cur = [], [], []
        for vid, c in b.slots:
            if c == BLUE:
                gaps.append(cur)
                cur = []
                blues.append(vid)
            else:
                cur.append(vid)
        gaps.append(cur)
        return blues, gaps

    sb, sg = runs(src)
    tb, tg = runs(tgt)
    if len(sb) != len(tb):
        lines = []
        for k in range(max(len(src), len(tgt))):
            a = src.slots[k] if k < len(src) else ("-", "none")
            b = tgt.slots[k] if k < len(tgt) else ("-", "none")
            mark = "" if a[1] == b[1] else "  <- differs"
            lines.append(f"  slot {k}: source {a[0]}:{a[1]} / target {b[0]}:{b[1]}{mark}")
        raise NotGluable(
            f"{len(sb)} blue source slots against {len(tb)} blue target slots\n" + "\n".join(lines)
        )
    pairs = list(zip(sb, tb))
    extra: list[str] = []
    for a, b in zip(sg, tg):
        pairs += list(zip(a, b))
        extra += a[len(b):]
    return pairs, extra


def glue(h, g):
    """``h * g``: identify the sources of ``h`` with the targets of ``g``."""
    gg, hh = _graph(g), _graph(h)
    pairs, extra = _align(sources(hh), targets(gg))
    so = list(gg.source_order)
    return _pushout(h, g, pairs, lambda rn: so + [rn[x] for x in extra])


def glue_at(h, g, segment):
    """Glue ``g`` into the contiguous block ``segment = (start, stop)`` of h's sources."""
    gg, hh = _graph(g), _graph(h)
    src = sources(hh)
    start, stop = segment
    if not 0 <= start <= stop <= len(src):
        raise SegmentOutOfRange(f"segment {segment} outside 0..{len(src)}")
    tgt = targets(gg)
    block = src.slots[start:stop]
    if len(block) != len(tgt) or any(a[1] != b[1] for a, b in zip(block, tgt.slots)):
        raise NotGluable(
            f"segment colors {[c for _, c in block]} differ from target colors {list(tgt.colors)}"
        )
    pairs = [(a[0], b[0]) for a, b in zip(block, tgt.slots)]
    before = [s for s, _ in src.slots[:start]]
    after = [s for s, _ in src.slots[stop:]]
    so = list(gg.source_order)
    return _pushout(h, g, pairs, lambda rn: [rn[x] for x in before] + so + [rn[x] for x in after])


def _relabel(g: ExpressionGraph, h: ExpressionGraph, pairs) -> dict[str, str]:
    """Label map for h that keeps each h-edge an identity exactly when it was one.

    A glued label follows the g-vertex it lands on; any other h label that
    clashes with a g label gets primes appended.
    """
    out: dict[str, str] = {}
    for a, b in pairs:
        out.setdefault(h.label(a), g.label(b))
    taken = {v.label for v in g.vertices} | set(out.values())
    for v in h.vertices:
        if v.label in out:
            continue
        new = v.label
        while new in taken:
            new += "'"
        out[v.label] = new
        taken.add(new)
    return out


def _pushout(h, g, pairs, source_order_of):
    gg, hh = _graph(g), _graph(h)
    keep = {a: b for a, b in pairs}
    rename = _fresh_ids({v.id for v in gg.vertices}, [v.id for v in hh.vertices], keep)
    graph = _merge(gg, hh, rename, set(keep), source_order_of(rename), _relabel(gg, hh, pairs))
    if isinstance(g, TransportGraph) and isinstance(h, TransportGraph):
        return _place(g, h, graph, rename)
    return graph


def identity_graph(boundary: Boundary, like: ExpressionGraph) -> ExpressionGraph:
    """Edgeless graph on copies of the boundary's vertices."""
    vs = tuple(Vertex(v, like.label(v), like.color(v)) for v in boundary.ids)
    return ExpressionGraph(vs, (), boundary.ids, {})


def sources_unit(g) -> ExpressionGraph:
    gg = _graph(g)
    return identity_graph(sources(gg), gg)


def targets_unit(g) -> ExpressionGraph:
    gg = _graph(g)
    return identity_graph(targets(gg), gg)


def pad(t: TransportGraph, k: int, width: float = PAD_WIDTH) -> TransportGraph:
    """Append ``k`` edgeless blue vertices (identity slots) after ``t``."""
    if k <= 0:
        return t
    vs = tuple(Vertex(f"pad{j}", "pad", BLUE) for j in range(k))
    extra = TransportGraph(ExpressionGraph(vs, (), tuple(v.id for v in vs), {}), {},
                           (0.0, width, t.chart[2], t.chart[3]))
    return disjoint_union(t, extra)


# multitangles -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Multitangle:
    summands: tuple[TransportGraph, ...] = ()
    connections: tuple[ConnectionSpec, ...] | None = None
    declared_source_arity: int = 0
    declared_target_arity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if self.connections is not None:
            object.__setattr__(self, "connections", tuple(self.connections))
            if len(self.connections) != len(self.summands):
                raise ValueError("one connection per summand")

    @property
    def source_arity(self) -> int:
        return max([self.declared_source_arity] + [s.sources().blue_count for s in self.summands])

    @property
    def target_arity(self) -> int:
        return max([self.declared_target_arity] + [s.targets().blue_count for s in self.summands])

    def __len__(self) -> int:
        return len(self.summands)


def add(m: Multitangle, n: Multitangle) -> Multitangle:
    if not len(m):
        conns = n.connections
    elif not len(n):
        conns = m.connections
    elif m.connections is not None and n.connections is not None:
        conns = m.connections + n.connections
    elif m.connections is None and n.connections is None:
        conns = None
    else:
        raise ValueError("either both or neither summand lists carry connections")
    return Multitangle(m.summands + n.summands, conns,
                       max(m.source_arity, n.source_arity), max(m.target_arity, n.target_arity))


def _pad_conn(conn: ConnectionSpec, t: TransportGraph, k: int) -> ConnectionSpec:
    if k <= 0:
        return conn
    zero = ConstantConnection.zero(conn.dim)
    return place_connections(conn, t.chart, zero, (0.0, PAD_WIDTH, t.chart[2], t.chart[3]))


def compose_multitangles(n: Multitangle, m: Multitangle) -> Multitangle:
    """Bilinear composite ``n o m``; summands ordered ``n_1 m_1, n_2 m_1, ...``.

    Before each pairwise gluing the operand with fewer slots on the shared
    boundary gets trailing identity slots.
    """
    out: list[TransportGraph] = []
    conns: list[ConnectionSpec] | None = (
        [] if n.connections is not None and m.connections is not None else None
    )
    for i, mi in enumerate(m.summands):
        for j, nj in enumerate(n.summands):
            s = nj.sources().blue_count
            t = mi.targets().blue_count
            mi_p, nj_p = pad(mi, s - t), pad(nj, t - s)
            out.append(glue(nj_p, mi_p))
            if conns is not None:
                cm = _pad_conn(m.connections[i], mi, s - t)
                cn = _pad_conn(n.connections[j], nj, t - s)
                conns.append(place_connections(cm, mi_p.chart, cn, nj_p.chart))
    return Multitangle(tuple(out), None if conns is None else tuple(conns),
                       m.source_arity, n.target_arity)
