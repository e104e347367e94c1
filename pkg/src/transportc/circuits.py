"""Quantum circuits as tangles.

The default encoding uses the fibre ``C^2`` (componentwise algebra, unit
``(1, 1)``, trace = sum of coordinates).  A gate is a cylinder with one edge
whose transport is the gate's unitary; kets and projectors are built from
cups and caps whose transports move the unit onto the right basis vector.
Controlled gates are two-summand multitangles ``P0 (x) I + P1 (x) U``.

The alternative encoding with elements of ``M_2`` combined by :func:`wedge` is
also available.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .calculus import AlgebraSpec, diagonal_algebra, eval_graph, eval_multitangle, vec
from .composition import (
    Multitangle,
    TransportGraph,
    compose_multitangles,
    disjoint_union,
    glue,
    place_connections,
)
from .errors import ArityMismatch, BoundaryMismatch
from .graph_model import BLUE, GREEN, ExpressionGraph, Vertex, targets
from .transport import ConnectionSpec, ConstantConnection, PathSpec, synthesize_gate

QUBIT = diagonal_algebra(2)
CELL = (0.0, 2.0, 0.0, 1.0)
CELL_PATH = PathSpec.straight((0.5, 0.5), (1.5, 0.5))

_ids = itertools.count()


def _uid(prefix: str) -> str:
    return f"{prefix}{next(_ids)}"


@dataclass(frozen=True, eq=False)
class Tangle:
    """A transport graph together with the connection it is evaluated under."""

    graph: TransportGraph
    connection: ConnectionSpec

    def evaluate(self, alg: AlgebraSpec = QUBIT, steps: int | None = None) -> np.ndarray:
        return eval_graph(self.graph, self.connection, alg, steps).matrix


def tensor(a: Tangle, b: Tangle) -> Tangle:
    return Tangle(disjoint_union(a.graph, b.graph),
                  place_connections(a.connection, a.graph.chart, b.connection, b.graph.chart))


def then(g: Tangle, h: Tangle) -> Tangle:
    """``h`` after ``g``."""
    return Tangle(glue(h.graph, g.graph),
                  place_connections(g.connection, g.graph.chart, h.connection, h.graph.chart))


def edge_tangle(u: np.ndarray, src_color: str = BLUE, dst_color: str = BLUE,
                name: str = "e") -> Tangle:
    """One edge on its own cell whose transport is ``u``."""
    a, b = _uid(name), _uid(name)
    g = ExpressionGraph(
        (Vertex(a, a, src_color), Vertex(b, b, dst_color)), ((a, b),), (a,), {a: (b,)}
    )
    return Tangle(TransportGraph(g, {(a, b): CELL_PATH}, CELL), synthesize_gate(u))


def wire(n: int = 2) -> Tangle:
    """Cylinder without paths: a lone blue vertex."""
    a = _uid("w")
    g = ExpressionGraph((Vertex(a, a, BLUE),), (), (a,), {})
    return Tangle(TransportGraph(g, {}, CELL), ConstantConnection.zero(n))


# transports that move the unit (1, 1) onto a basis vector, and the trace onto
# a basis covector
_KET = {0: np.array([[1.0, 0.0], [1.0, -1.0]]), 1: np.array([[1.0, -1.0], [0.0, 1.0]])}
_BRA = {0: np.array([[1.0, 1.0], [0.0, -1.0]]), 1: np.array([[1.0, 0.0], [-1.0, 1.0]])}


def ket(k: int) -> Tangle:
    return edge_tangle(_KET[k], GREEN, BLUE, name="ket")


def bra(k: int) -> Tangle:
    return edge_tangle(_BRA[k], BLUE, GREEN, name="bra")


def projector(k: int) -> Tangle:
    """``|k><k|`` as a cap followed by a cup through a green vertex."""
    return then(bra(k), ket(k))


@dataclass(frozen=True, eq=False)
class Gate:
    name: str
    unitary: np.ndarray
    tangle: Tangle

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class ControlledGate:
    """``P0 (x) I + P1 (x) target``; wires are (control, target)."""

    name: str
    target: Gate

    @property
    def arity(self) -> int:
        return 2

    @property
    def unitary(self) -> np.ndarray:
        p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        return np.kron(p0, np.eye(2)) + np.kron(p1, self.target.unitary)

    def terms(self, control: int, target: int) -> list[dict[int, Tangle]]:
        return [{control: projector(0)}, {control: projector(1), target: self.target.tangle}]

    def multitangle(self) -> Multitangle:
        parts = []
        for term in self.terms(0, 1):
            parts.append(tensor(term.get(0, wire()), term.get(1, wire())))
        return Multitangle(tuple(p.graph for p in parts), tuple(p.connection for p in parts))


_S2 = 1 / np.sqrt(2)
UNITARIES = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
    "H": np.array([[_S2, _S2], [_S2, -_S2]]),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
}


def make_gate(name: str, u) -> Gate:
    u = np.asarray(u, dtype=np.complex128)
    return Gate(name, u, edge_tangle(u, name=name))


def standard_gates() -> dict:
    lib: dict = {name: make_gate(name, u) for name, u in UNITARIES.items() if name != "I"}
    lib["CNOT"] = ControlledGate("CNOT", lib["X"])
    lib["CZ"] = ControlledGate("CZ", lib["Z"])
    return lib


@dataclass(frozen=True)
class Circuit:
    qubits: int
    layers: tuple  # of tuples of (gate name, wires)

    @classmethod
    def from_json(cls, doc: dict) -> "Circuit":
        layers = tuple(
            tuple((op["gate"], tuple(int(w) for w in op["wires"])) for op in layer)
            for layer in doc["layers"]
        )
        return cls(int(doc["qubits"]), layers)

    def to_json(self) -> dict:
        return {"qubits": self.qubits,
                "layers": [[{"gate": g, "wires": list(w)} for g, w in layer] for layer in self.layers]}


@dataclass(frozen=True)
class Register:
    kets: tuple

    @classmethod
    def parse(cls, bits: str | Sequence[int]) -> "Register":
        return cls(tuple(int(b) for b in bits))

    def tangle(self) -> Tangle:
        if not self.kets:
            raise ArityMismatch("empty register")
        out = ket(self.kets[0])
        for k in self.kets[1:]:
            out = tensor(out, ket(k))
        return out

    def multitangle(self) -> Multitangle:
        t = self.tangle()
        return Multitangle((t.graph,), (t.connection,))

    def vector(self) -> np.ndarray:
        v = np.zeros(2 ** len(self.kets), dtype=np.complex128)
        v[int("".join(map(str, self.kets)), 2)] = 1.0
        return v


def layer_multitangle(layer, qubits: int, lib: dict | None = None) -> Multitangle:
    """Sum over the expansion of the layer's controlled gates."""
    lib = lib or standard_gates()
    used: set[int] = set()
    options = []
    for name, wires in layer:
        if name not in lib:
            raise ArityMismatch(f"unknown gate {name!r}")
        gate = lib[name]
        if len(wires) != gate.arity:
            raise ArityMismatch(f"{name} acts on {gate.arity} wire(s), got {list(wires)}")
        for w in wires:
            if not 0 <= w < qubits or w in used:
                raise ArityMismatch(f"wire {w} out of range or used twice in one layer")
            used.add(w)
        if isinstance(gate, ControlledGate):
            options.append(gate.terms(*wires))
        else:
            options.append([{wires[0]: gate.tangle}])
    graphs, conns = [], []
    for choice in itertools.product(*options):
        placed: dict[int, Tangle] = {}
        for term in choice:
            placed.update(term)
        t = placed.get(0, wire())
        for q in range(1, qubits):
            t = tensor(t, placed.get(q, wire()))
        graphs.append(t.graph)
        conns.append(t.connection)
    return Multitangle(tuple(graphs), tuple(conns), qubits, qubits)


def circuit_multitangle(c: Circuit, r: Register, lib: dict | None = None) -> Multitangle:
    """The whole computation glued into one multitangle ``layers * register``."""
    if len(r.kets) != c.qubits:
        raise ArityMismatch(f"register has {len(r.kets)} qubits, circuit {c.qubits}")
    lib = lib or standard_gates()
    mt = r.multitangle()
    for layer in c.layers:
        mt = compose_multitangles(layer_multitangle(layer, c.qubits, lib), mt)
    return mt


def apply_circuit(c: Circuit, r: Register, lib: dict | None = None, glued: bool = False,
                  steps: int | None = None) -> np.ndarray:
    """State vector after running ``c`` on ``r``.

    By default each layer is evaluated on its own and applied to the state;
    with ``glued=True`` the whole glued multitangle is evaluated instead.
    """
    if len(r.kets) != c.qubits:
        raise ArityMismatch(f"register has {len(r.kets)} qubits, circuit {c.qubits}")
    lib = lib or standard_gates()
    if glued:
        m = eval_multitangle(circuit_multitangle(c, r, lib), None, QUBIT, steps).matrix
        return m[:, 0]
    state = r.tangle().evaluate(QUBIT, steps)[:, 0]
    for layer in c.layers:
        state = eval_multitangle(layer_multitangle(layer, c.qubits, lib), None, QUBIT, steps).matrix @ state
    return state


# elements of M_2 combined with the pair of pants ---------------------------


def element_graph(m, alg: AlgebraSpec) -> tuple[Tangle, AlgebraSpec]:
    """Green-to-blue edge carrying the fixed element ``vec(m)``."""
    a, b = _uid("el"), _uid("el")
    g = ExpressionGraph((Vertex(a, a, GREEN), Vertex(b, b, BLUE)), ((a, b),), (a,), {a: (b,)})
    t = TransportGraph(g, {(a, b): PathSpec.constant((1.0, 0.5))}, CELL)
    return Tangle(t, ConstantConnection.zero(alg.n)), alg.with_elements({(a, b): vec(m)})


def _pants(n: int) -> Tangle:
    a, b, c = _uid("p"), _uid("p"), _uid("p")
    g = ExpressionGraph(
        (Vertex(a, a), Vertex(b, b), Vertex(c, c)), ((a, c), (b, c)), (a, b), {a: (c,), b: (c,)}
    )
    point = PathSpec.constant((1.0, 0.5))
    return Tangle(TransportGraph(g, {(a, c): point, (b, c): point}, CELL), ConstantConnection.zero(n))


def wedge(g1, g2):
    """Feed two one-output tangles into a pair of pants (constant paths)."""
    for g in (g1, g2):
        tg = g.graph if isinstance(g, Tangle) else g
        tb = targets(tg.graph)
        if tb.colors != (BLUE,):
            raise BoundaryMismatch(f"expected a single blue target, got {list(tb.colors)}")
    if isinstance(g1, Tangle):
        return then(tensor(g1, g2), _pants(g1.connection.dim))
    pants = _pants(2).graph
    return glue(pants, disjoint_union(g1, g2))


def embed_column(v) -> np.ndarray:
    """``(a, b) -> [[a, 0], [b, 0]]``."""
    v = np.asarray(v, dtype=np.complex128)
    return np.column_stack([v, np.zeros_like(v)])
