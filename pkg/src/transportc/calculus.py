"""Evaluation of transport graphs and multitangles to matrices.

A blue boundary slot stands for the fibre ``C^n`` and a green slot for the
ground field, so a graph with ``p`` blue sources and ``q`` blue targets
evaluates to an ``n^q x n^p`` matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce as _fold
from typing import Callable, Sequence

import numpy as np

from .composition import Multitangle, TransportGraph
from .errors import ShrinkNotAllowed
from .expression import Semantics, extract_expr, interface, substitute
from .graph_model import BLUE, GREEN, Boundary, Edge, sources, targets
from .reduction import reduce
from .transport import ConnectionSpec, GaugeMap, Grid, gauge_act, transport


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    n: int
    mult: np.ndarray  # n x n^2, column index a * n + b for e_a (x) e_b
    unit: np.ndarray
    comult: np.ndarray  # n^2 x n
    trace: np.ndarray  # covector of length n
    elements: dict = field(default_factory=dict)

    @classmethod
    def from_mult(cls, mult, unit, trace, comult=None, elements=None) -> "AlgebraSpec":
        """Comultiplication defaults to the conjugate transpose of ``mult``."""
        mult = np.asarray(mult, dtype=np.complex128)
        n = mult.shape[0]
        if mult.shape != (n, n * n):
            raise ValueError("mult must be an n x n^2 matrix")
        comult = mult.conj().T if comult is None else np.asarray(comult, dtype=np.complex128)
        unit = np.asarray(unit, dtype=np.complex128)
        trace = np.asarray(trace, dtype=np.complex128)
        if comult.shape != (n * n, n) or unit.shape != (n,) or trace.size != n:
            raise ValueError(f"comult, unit and trace must have shapes ({n * n}, {n}), ({n},), ({n},)")
        return cls(n, mult, unit, comult, trace.reshape(n), dict(elements or {}))

    def with_elements(self, elements: dict) -> "AlgebraSpec":
        merged = dict(self.elements)
        merged.update({tuple(k): np.asarray(v, dtype=np.complex128) for k, v in elements.items()})
        return replace(self, elements=merged)

    def element(self, edge: Edge) -> np.ndarray:
        return self.elements.get(tuple(edge), self.unit)

    def associativity_defect(self) -> float:
        eye = np.eye(self.n)
        left = self.mult @ np.kron(self.mult, eye)
        right = self.mult @ np.kron(eye, self.mult)
        return float(np.max(np.abs(left - right)))


def matrix_algebra(k: int) -> AlgebraSpec:
    """``k x k`` matrices, vectorized row-major: ``e_ij`` has index ``i * k + j``."""
    n = k * k
    mult = np.zeros((n, n * n), dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            for l in range(k):
                # e_ij e_jl = e_il
                mult[i * k + l, (i * k + j) * n + (j * k + l)] = 1.0
    unit = np.eye(k).reshape(n)
    return AlgebraSpec.from_mult(mult, unit, np.eye(k).reshape(n))


def diagonal_algebra(n: int) -> AlgebraSpec:
    """``C^n`` with componentwise product."""
    mult = np.zeros((n, n * n), dtype=np.complex128)
    for i in range(n):
        mult[i, i * n + i] = 1.0
    return AlgebraSpec.from_mult(mult, np.ones(n), np.ones(n))


def vec(m) -> np.ndarray:
    return np.asarray(m, dtype=np.complex128).reshape(-1)


def unvec(v, k: int) -> np.ndarray:
    return np.asarray(v).reshape(k, k)


@dataclass(frozen=True, eq=False)
class EvalResult:
    matrix: np.ndarray
    domain_dim: int
    codomain_dim: int


def eval_object(b: Boundary | Sequence[str], alg: AlgebraSpec | int) -> int:
    n = alg if isinstance(alg, int) else alg.n
    colors = b.colors if isinstance(b, Boundary) else b
    return int(np.prod([n if c == BLUE else 1 for c in colors], dtype=np.int64))


def eval_edge(edge: Edge, tg: TransportGraph, conn: ConnectionSpec, alg: AlgebraSpec,
              steps: int | None = None) -> np.ndarray:
    """Matrix of a single edge, by the colors and labels of its endpoints."""
    g = tg.graph
    u, v = edge
    cu, cv = g.color(u), g.color(v)
    if cu == GREEN and cv == GREEN:
        return np.ones((1, 1), dtype=np.complex128)
    if cu == BLUE and cv == BLUE and g.label(u) == g.label(v):
        return np.eye(alg.n, dtype=np.complex128)
    t = transport(conn, tg.realization[edge], steps)
    if cu == BLUE and cv == BLUE:
        return t
    if cu == GREEN:
        return (t @ alg.element(edge)).reshape(alg.n, 1)
    return (alg.trace @ t).reshape(1, alg.n)


def _swap(dx: int, dz: int) -> np.ndarray:
    """Permutation taking ``x (x) z`` to ``z (x) x``."""
    p = np.zeros((dx * dz, dx * dz), dtype=np.complex128)
    for x in range(dx):
        for z in range(dz):
            p[z * dx + x, x * dz + z] = 1.0
    return p


class MatrixSemantics(Semantics):
    def __init__(self, alg: AlgebraSpec):
        self.alg = alg
        self._one = np.ones((1, 1), dtype=np.complex128)

    def _dim(self, color):
        return self.alg.n if color == BLUE else 1

    def identity(self, node):
        return np.eye(self._dim(node.color), dtype=np.complex128)

    def compose(self, payloads):
        if not payloads:
            return self._one
        return _fold(lambda acc, m: m @ acc, payloads[1:], payloads[0])

    def tensor(self, payloads, nodes):
        return _fold(np.kron, payloads, self._one)

    def mult(self, node, left, right):
        color = interface(node)[1][0]
        m = self.alg.mult if color == BLUE else self._one
        return m @ np.kron(left, right)

    def comult(self, node, left, right):
        color = interface(node)[0][0]
        c = self.alg.comult if color == BLUE else self._one
        return np.kron(left, right) @ c

    def twist(self, node, left, right):
        return _swap(left.shape[0], right.shape[0]) @ np.kron(left, right)


def eval_graph(tg: TransportGraph, conn: ConnectionSpec, alg: AlgebraSpec,
               steps: int | None = None) -> EvalResult:
    g = tg.graph
    if not g.vertices:
        return EvalResult(np.ones((1, 1), dtype=np.complex128), 1, 1)
    r = reduce(g)
    expr = extract_expr(r)
    cache: dict[Edge, np.ndarray] = {}

    def assign(key):
        if key not in cache:
            origin = r.edge_origin[key]
            if origin is None:
                c = r.graph.color(key[0])
                cache[key] = np.eye(alg.n if c == BLUE else 1, dtype=np.complex128)
            else:
                cache[key] = eval_edge(origin, tg, conn, alg, steps)
        return cache[key]

    m = substitute(expr, assign, MatrixSemantics(alg))
    return EvalResult(m, m.shape[1], m.shape[0])


def iota_embed(m, rows: int, cols: int) -> np.ndarray:
    """Zero-pad ``m`` to ``rows x cols`` keeping it in the top-left block."""
    m = np.atleast_2d(np.asarray(m))
    if rows < m.shape[0] or cols < m.shape[1]:
        raise ShrinkNotAllowed(f"cannot embed {m.shape} into ({rows}, {cols})")
    out = np.zeros((rows, cols), dtype=np.result_type(m, np.complex128))
    out[: m.shape[0], : m.shape[1]] = m
    return out


def pad_evaluation(m: np.ndarray, n: int, src: int, tgt: int,
                   src_arity: int, tgt_arity: int) -> np.ndarray:
    """Bring an ``n^tgt x n^src`` matrix up to ``n^tgt_arity x n^src_arity``.

    Slots missing on both sides become trailing identity factors; whatever
    mismatch is left over is zero padded.
    """
    k = min(src_arity - src, tgt_arity - tgt)
    if k > 0:
        m = np.kron(m, np.eye(n ** k))
    return iota_embed(m, n ** tgt_arity, n ** src_arity)


def eval_multitangle(mt: Multitangle, conns, alg: AlgebraSpec,
                     steps: int | None = None) -> EvalResult:
    """Sum of the padded summand evaluations.

    ``conns`` is one connection for all summands, a sequence with one per
    summand, or ``None`` to use the connections stored on ``mt``.
    """
    if conns is None:
        conns = mt.connections
    if isinstance(conns, ConnectionSpec):
        conns = [conns] * len(mt)
    p, q = mt.source_arity, mt.target_arity
    total = np.zeros((alg.n ** q, alg.n ** p), dtype=np.complex128)
    for t, c in zip(mt.summands, conns or ()):
        r = eval_graph(t, c, alg, steps)
        s = sources(t.graph).blue_count
        u = targets(t.graph).blue_count
        total += pad_evaluation(r.matrix, alg.n, s, u, p, q)
    return EvalResult(total, alg.n ** p, alg.n ** q)


def eval_2morphism_family(tg: TransportGraph, conn: ConnectionSpec,
                          gauge_path: Callable[[float], GaugeMap], samples: int,
                          alg: AlgebraSpec, steps: int | None = None,
                          grid: Grid | None = None) -> list[np.ndarray]:
    """Evaluate ``tg`` under ``gauge_path(t)`` acting on ``conn`` for evenly spaced ``t``."""
    if samples < 1:
        raise ValueError("samples must be positive")
    ts = np.linspace(0.0, 1.0, samples) if samples > 1 else np.zeros(1)
    out = []
    for t in ts:
        c = gauge_act(gauge_path(float(t)), conn, grid)
        out.append(eval_graph(tg, c, alg, steps).matrix)
    return out
