"""Random expression graphs and gluable pairs from a numpy Generator."""
from __future__ import annotations

import numpy as np

from transportc.composition import TransportGraph
from transportc.graph_model import BLUE, GREEN, ExpressionGraph, Vertex, targets
from transportc.transport import ConstantConnection, PathSpec


def _finish(vertices, edges, rng) -> ExpressionGraph:
    ids = [v.id for v in vertices]
    has_pred = {w for _, w in edges}
    srcs = [v for v in ids if v not in has_pred]
    order = [srcs[i] for i in rng.permutation(len(srcs))]
    outs: dict[str, list[str]] = {}
    for u, w in edges:
        outs.setdefault(u, []).append(w)
    out_orders = {u: tuple(ws[i] for i in rng.permutation(len(ws))) for u, ws in outs.items()}
    return ExpressionGraph(tuple(vertices), tuple(edges), tuple(order), out_orders)


def random_graph(rng, max_vertices=20, green=0.2, prefix="v", min_vertices=1) -> ExpressionGraph:
    n = int(rng.integers(min_vertices, max_vertices + 1))
    p = float(rng.uniform(0.08, 0.45))
    colors = [GREEN if rng.random() < green else BLUE for _ in range(n)]
    vs = [Vertex(f"{prefix}{i}", f"{prefix}{i}", colors[i]) for i in range(n)]
    edges = [(vs[i].id, vs[j].id) for j in range(n) for i in range(j) if rng.random() < p]
    return _finish(vs, edges, rng)


def extend(g: ExpressionGraph, rng, extra_max=6, green=0.2, prefix="h") -> ExpressionGraph:
    """Graph whose sources match the targets of ``g`` slot for slot."""
    tb = targets(g)
    vs = [Vertex(f"{prefix}{i}", f"{prefix}{i}", c) for i, c in enumerate(tb.colors)]
    edges = []
    for j in range(int(rng.integers(0, extra_max + 1))):
        new = Vertex(f"{prefix}{len(vs)}", f"{prefix}{len(vs)}", GREEN if rng.random() < green else BLUE)
        k = min(len(vs), int(rng.integers(1, 3)))
        for i in rng.choice(len(vs), size=k, replace=False):
            edges.append((vs[int(i)].id, new.id))
        vs.append(new)
    has_pred = {w for _, w in edges}
    # sources must be exactly the first len(tb) vertices, in slot order
    order = [v.id for v in vs[: len(tb)]]
    assert all(v.id not in has_pred for v in vs[: len(tb)])
    outs: dict[str, list[str]] = {}
    for u, w in edges:
        outs.setdefault(u, []).append(w)
    out_orders = {u: tuple(ws[i] for i in rng.permutation(len(ws))) for u, ws in outs.items()}
    return ExpressionGraph(tuple(vs), tuple(edges), tuple(order), out_orders)


def gluable_pair(rng, max_vertices=12, green=0.2):
    g = random_graph(rng, max_vertices=max_vertices - 2, green=green, prefix="g", min_vertices=2)
    h = extend(g, rng, extra_max=max(0, max_vertices - len(targets(g))), green=green)
    while len(h.vertices) > max_vertices:
        g = random_graph(rng, max_vertices=max_vertices - 2, green=green, prefix="g", min_vertices=2)
        h = extend(g, rng, extra_max=max(0, max_vertices - len(targets(g))), green=green)
    return h, g


def realize(g: ExpressionGraph, rng, chart=(0.0, 1.0, 0.0, 1.0)) -> TransportGraph:
    """Random straight paths inside the chart."""
    x0, x1, y0, y1 = chart
    lo, hi = np.array([x0, y0]) + 0.1, np.array([x1, y1]) - 0.1
    real = {e: PathSpec.straight(rng.uniform(lo, hi), rng.uniform(lo, hi)) for e in g.edges}
    return TransportGraph(g, real, chart)


def random_constant_connection(rng, n, scale=0.5) -> ConstantConnection:
    def m():
        return scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    return ConstantConnection(m(), m())


def conjugated_algebra(base, rng):
    """``base`` transported along a random change of basis ``S``.

    Still associative and coassociative, but with no zero pattern left to hide
    a wrong argument order.
    """
    from transportc.calculus import AlgebraSpec

    n = base.n
    s = np.eye(n) + 0.3 * rng.normal(size=(n, n))
    while np.linalg.cond(s) > 4.0:
        s = np.eye(n) + 0.3 * rng.normal(size=(n, n))
    si = np.linalg.inv(s)
    return AlgebraSpec.from_mult(
        s @ base.mult @ np.kron(si, si), s @ base.unit, base.trace @ si,
        comult=np.kron(s, s) @ base.comult @ si,
    )
