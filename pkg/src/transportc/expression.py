"""Cobordism expressions: the IR produced from reduced graphs.

``Compose.layers`` lists layers in application order (the first layer acts
first); the printer shows them outermost first, the usual way of writing a
composite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

from .errors import InterfaceMismatch, MissingAssignment, NotReduced
from .graph_model import BLUE, ExpressionGraph, level_order
from .reduction import ReducedGraph, is_reduced


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Gen(Expr):
    source: str
    target: str
    source_color: str = BLUE
    target_color: str = BLUE
    key: tuple | None = None

    @property
    def edge(self) -> tuple:
        return self.key if self.key is not None else (self.source, self.target)

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.source_color == self.target_color


@dataclass(frozen=True)
class Id(Expr):
    label: str
    color: str = BLUE


@dataclass(frozen=True)
class Compose(Expr):
    layers: tuple


@dataclass(frozen=True)
class Tensor(Expr):
    factors: tuple


@dataclass(frozen=True)
class Mult(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Comult(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Twist(Expr):
    left: Expr
    right: Expr


def interface(e: Expr) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Domain and codomain color sequences."""
    if isinstance(e, Gen):
        return (e.source_color,), (e.target_color,)
    if isinstance(e, Id):
        return (e.color,), (e.color,)
    if isinstance(e, Tensor):
        dom: tuple = ()
        cod: tuple = ()
        for f in e.factors:
            d, c = interface(f)
            dom, cod = dom + d, cod + c
        return dom, cod
    if isinstance(e, Compose):
        if not e.layers:
            return (), ()
        dom, cod = interface(e.layers[0])
        for layer in e.layers[1:]:
            d, c = interface(layer)
            if d != cod:
                raise InterfaceMismatch(f"layer expects {d}, previous layer gives {cod}")
            cod = c
        return dom, cod
    dl, cl = interface(e.left)
    dr, cr = interface(e.right)
    if isinstance(e, Mult):
        if len(cl) != 1 or cl != cr:
            raise InterfaceMismatch("merge branches must end on the same single slot")
        return dl + dr, cl
    if isinstance(e, Comult):
        if len(dl) != 1 or dl != dr:
            raise InterfaceMismatch("split branches must start on the same single slot")
        return dl, cl + cr
    if isinstance(e, Twist):
        return dl + dr, cr + cl
    raise TypeError(f"not an expression: {e!r}")


def _tensor(items: Sequence[Expr]) -> Expr:
    flat: list[Expr] = []
    for x in items:
        flat.extend(x.factors if isinstance(x, Tensor) else (x,))
    return flat[0] if len(flat) == 1 else Tensor(tuple(flat))


def _compose(layers: Sequence[Expr]) -> Expr:
    flat: list[Expr] = []
    for x in layers:
        flat.extend(x.layers if isinstance(x, Compose) else (x,))
    return flat[0] if len(flat) == 1 else Compose(tuple(flat))


# extraction -------------------------------------------------------------

def extract_expr(r: ReducedGraph | ExpressionGraph) -> Expr:
    """Read a reduced graph as a composite of one tensor layer per level gap."""
    g = r.graph if isinstance(r, ReducedGraph) else r
    if not is_reduced(g):
        raise NotReduced("graph is not in reduced form; run reduce() first")
    lv = level_order(g)
    if not lv.levels:
        return Tensor(())
    if len(lv) == 1:
        return _tensor([Id(g.label(v), g.color(v)) for v in lv.levels[0]])

    def gen(u, v):
        return Gen(g.label(u), g.label(v), g.color(u), g.color(v), key=(u, v))

    layers: list[Expr] = []
    wires = list(lv.levels[0])
    last = len(lv) - 1
    for i in range(last):
        order = _group(wires, g)
        if order != wires:
            layers.extend(_permutation_layers(wires, order, g))
        comps: list[tuple[Expr, list[str]]] = []
        taken: set[str] = set()
        for x in order:
            if x in taken:
                continue
            taken.add(x)
            outs = g.succs[x]
            if len(outs) == 2:
                comps.append((Comult(gen(x, outs[0]), gen(x, outs[1])), list(outs)))
                continue
            y = outs[0]
            if g.indeg(y) == 2:
                partner = next(p for p in g.preds[y] if p != x)
                taken.add(partner)
                comps.append((Mult(gen(x, y), gen(partner, y)), [y]))
            else:
                comps.append((gen(x, y), [y]))
        natural = [y for _, outs in comps for y in outs]
        desired = list(lv.levels[i + 1]) if i + 1 == last else _group(natural, g)
        layers.extend(_arrange(comps, natural, desired, g))
        wires = desired
    return _compose(layers)


def _group(seq: Sequence[str], g: ExpressionGraph) -> list[str]:
    """Reorder so that the two inputs of every merge in the next layer are adjacent."""
    out: list[str] = []
    seen: set[str] = set()
    for x in seq:
        if x in seen:
            continue
        out.append(x)
        seen.add(x)
        outs = g.succs[x]
        if len(outs) == 1 and g.indeg(outs[0]) == 2:
            partner = next(p for p in g.preds[outs[0]] if p != x)
            if partner not in seen:
                out.append(partner)
                seen.add(partner)
    return out


def _arrange(comps, natural, desired, g) -> list[Expr]:
    pos = {v: k for k, v in enumerate(desired)}
    blocks = [(e, [pos[y] for y in outs]) for e, outs in comps]
    built = _separable(blocks)
    if built is not None:
        return [built]
    return [_tensor([e for e, _ in comps])] + _permutation_layers(natural, desired, g)


def _separable(blocks):
    if len(blocks) == 1:
        e, ps = blocks[0]
        return e if ps == sorted(ps) else None
    for k in range(1, len(blocks)):
        left, right = blocks[:k], blocks[k:]
        lp = [p for _, ps in left for p in ps]
        rp = [p for _, ps in right for p in ps]
        if max(lp) < min(rp):
            a, b = _separable(left), _separable(right)
            return None if a is None or b is None else _tensor([a, b])
        if min(lp) > max(rp):
            a, b = _separable(left), _separable(right)
            return None if a is None or b is None else Twist(a, b)
    return None


def _permutation_layers(current, desired, g) -> list[Expr]:
    """Odd-even transposition sort written as layers of identities and twists."""
    pos = {v: k for k, v in enumerate(desired)}
    seq = list(current)
    layers = []
    parity = 0
    stable = 0
    while stable < 2:
        swaps = [
            k for k in range(parity, len(seq) - 1, 2) if pos[seq[k]] > pos[seq[k + 1]]
        ]
        if swaps:
            stable = 0
            items: list[Expr] = []
            k = 0
            while k < len(seq):
                if k in swaps:
                    a, b = seq[k], seq[k + 1]
                    items.append(Twist(Id(g.label(a), g.color(a)), Id(g.label(b), g.color(b))))
                    seq[k], seq[k + 1] = b, a
                    k += 2
                else:
                    items.append(Id(g.label(seq[k]), g.color(seq[k])))
                    k += 1
            layers.append(_tensor(items))
        else:
            stable += 1
        parity ^= 1
    return layers


# equivalence ------------------------------------------------------------

class _Wiring:
    """The string diagram an expression draws, as a directed graph on wires."""

    def __init__(self):
        self.label: list[str | None] = []
        self.color: list[str] = []
        self.out: list[list[int]] = []
        self.ident: set[tuple[int, int]] = set()
        self.parent: list[int] = []

    def node(self, label, color) -> int:
        self.label.append(label)
        self.color.append(color)
        self.out.append([])
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def touch(self, x: int, label: str):
        x = self.find(x)
        if self.label[x] is None:
            self.label[x] = label

    def run(self, e: Expr, inputs: list[int]) -> list[int]:
        if isinstance(e, Gen):
            (src,) = inputs
            self.touch(src, e.source)
            src = self.find(src)
            label = self.label[src] if e.is_identity else e.target
            dst = self.node(label, e.target_color)
            self.out[src].append(dst)
            if e.is_identity:
                self.ident.add((src, dst))
            return [dst]
        if isinstance(e, Id):
            self.touch(inputs[0], e.label)
            return list(inputs)
        if isinstance(e, Compose):
            for layer in e.layers:
                inputs = self.run(layer, inputs)
            return inputs
        if isinstance(e, Tensor):
            outs: list[int] = []
            k = 0
            for f in e.factors:
                n = len(interface(f)[0])
                outs += self.run(f, inputs[k:k + n])
                k += n
            return outs
        if isinstance(e, Comult):
            return self.run(e.left, inputs) + self.run(e.right, inputs)
        n = len(interface(e.left)[0])
        a = self.run(e.left, inputs[:n])
        b = self.run(e.right, inputs[n:])
        if isinstance(e, Twist):
            return b + a
        # Mult: both branches land on one vertex
        ra, rb = self.find(a[0]), self.find(b[0])
        self.parent[rb] = ra
        return [ra]


def canonical_form(e: Expr):
    """Hashable normal form: the drawn graph with identity edges contracted."""
    w = _Wiring()
    dom, _ = interface(e)
    ins = [w.node(None, c) for c in dom]
    outs = w.run(e, list(ins))
    n = len(w.parent)
    find = w.find
    succ: dict[int, list[int]] = {}
    for u in range(n):
        if find(u) == u:
            succ.setdefault(u, [])
    for u in range(n):
        succ[find(u)].extend(find(v) for v in w.out[u])
    ident = {(find(a), find(b)) for a, b in w.ident}
    outs = [find(x) for x in outs]
    ins = [find(x) for x in ins]

    # an identity edge can be contracted when it is its source's only
    # out-edge or its target's only in-edge; otherwise it separates a
    # comultiplication from a multiplication
    def contractible():
        indeg: dict[int, int] = {u: 0 for u in succ}
        for vs in succ.values():
            for v in vs:
                indeg[v] += 1
        for u, vs in succ.items():
            for v in vs:
                if (u, v) in ident and v != u and (len(vs) == 1 or indeg[v] == 1):
                    return u, v
        return None

    while (hit := contractible()) is not None:
        u, v = hit
        k = succ[u].index(v)
        succ[u] = succ[u][:k] + succ.pop(v) + succ[u][k + 1:]
        for x, vs in succ.items():
            succ[x] = [u if y == v else y for y in vs]
        ident.discard((u, v))
        ident = {(u if a == v else a, u if b == v else b) for a, b in ident}
        outs = [u if x == v else x for x in outs]
        ins = [u if x == v else x for x in ins]

    index: dict[int, int] = {}
    stack = list(reversed(ins))
    while stack:
        u = stack.pop()
        if u in index:
            continue
        index[u] = len(index)
        stack.extend(reversed(succ[u]))
    rows = sorted(
        (index[u], w.label[u], w.color[u], tuple(index[v] for v in succ[u])) for u in index
    )
    return (
        tuple(rows),
        tuple(index[x] for x in ins),
        tuple(index.get(x, -1) for x in outs),
        len(index) == len(succ),
    )


def exprs_equivalent(e1: Expr, e2: Expr) -> bool:
    """Equal up to inserting or contracting identity edges."""
    try:
        return canonical_form(e1) == canonical_form(e2)
    except InterfaceMismatch:
        return False


# substitution -----------------------------------------------------------

class Semantics:
    """Callbacks used by :func:`substitute`.  Override what the target needs."""

    def identity(self, node: Id) -> Any:
        raise NotImplementedError

    def compose(self, payloads: list) -> Any:
        raise NotImplementedError

    def tensor(self, payloads: list, nodes: tuple) -> Any:
        raise NotImplementedError

    def mult(self, node: Mult, left, right) -> Any:
        raise NotImplementedError

    def comult(self, node: Comult, left, right) -> Any:
        raise NotImplementedError

    def twist(self, node: Twist, left, right) -> Any:
        raise NotImplementedError


def substitute(e: Expr, assign: Mapping | Callable, semantics: Semantics):
    """Fold ``e``: generators come from ``assign``, combinators from ``semantics``."""
    lookup = assign if callable(assign) else assign.__getitem__
    interface(e)

    def go(x: Expr):
        if isinstance(x, Gen):
            try:
                return lookup(x.edge)
            except KeyError:
                raise MissingAssignment(f"no value assigned to edge {x.edge}") from None
        if isinstance(x, Id):
            return semantics.identity(x)
        if isinstance(x, Compose):
            return semantics.compose([go(layer) for layer in x.layers])
        if isinstance(x, Tensor):
            return semantics.tensor([go(f) for f in x.factors], x.factors)
        left, right = go(x.left), go(x.right)
        if isinstance(x, Mult):
            return semantics.mult(x, left, right)
        if isinstance(x, Comult):
            return semantics.comult(x, left, right)
        return semantics.twist(x, left, right)

    return go(e)


# printing and serialization ---------------------------------------------

_OPS = {Mult: "∧", Comult: "∨", Twist: "⊠"}


def to_notation(e: Expr, top: bool = True) -> str:
    if isinstance(e, Gen):
        return f"({e.source},{e.target})"
    if isinstance(e, Id):
        return f"id_{e.label}"
    if isinstance(e, Compose):
        if not e.layers:
            return "id"
        text = " ∘ ".join(to_notation(x, False) for x in reversed(e.layers))
        return text if top else f"({text})"
    if isinstance(e, Tensor):
        if not e.factors:
            return "id"
        acc = to_notation(e.factors[0], False)
        for f in e.factors[1:]:
            acc = f"({acc} ⊗ {to_notation(f, False)})"
        return acc
    op = _OPS[type(e)]
    return f"({to_notation(e.left, False)} {op} {to_notation(e.right, False)})"


def to_json(e: Expr) -> dict:
    if isinstance(e, Gen):
        d = {"kind": "gen", "source": e.source, "target": e.target,
             "source_color": e.source_color, "target_color": e.target_color}
        if e.key is not None:
            d["edge"] = list(e.key)
        return d
    if isinstance(e, Id):
        return {"kind": "id", "label": e.label, "color": e.color}
    if isinstance(e, Compose):
        return {"kind": "compose", "layers": [to_json(x) for x in e.layers]}
    if isinstance(e, Tensor):
        return {"kind": "tensor", "factors": [to_json(x) for x in e.factors]}
    kind = {Mult: "mult", Comult: "comult", Twist: "twist"}[type(e)]
    return {"kind": kind, "left": to_json(e.left), "right": to_json(e.right)}


def from_json(d: dict) -> Expr:
    kind = d["kind"]
    if kind == "gen":
        key = tuple(d["edge"]) if "edge" in d else None
        return Gen(d["source"], d["target"], d.get("source_color", BLUE),
                   d.get("target_color", BLUE), key)
    if kind == "id":
        return Id(d["label"], d.get("color", BLUE))
    if kind == "compose":
        return Compose(tuple(from_json(x) for x in d["layers"]))
    if kind == "tensor":
        return Tensor(tuple(from_json(x) for x in d["factors"]))
    cls = {"mult": Mult, "comult": Comult, "twist": Twist}[kind]
    return cls(from_json(d["left"]), from_json(d["right"]))
