"""The worked examples, written out by hand."""
from transportc.composition import TransportGraph
from transportc.expression import Comult, Compose, Gen, Mult, Tensor, Twist
from transportc.graph_model import BLUE, GREEN, ExpressionGraph, Vertex


def g(a, b):
    return Gen(str(a), str(b))


NINE_NOTATION = (
    "((5,8) ⊗ ((6,9) ∧ (7,9))) ∘ (((3,5) ∨ (3,6)) ⊗ (4,7)) ∘ (((3,3) ∧ (3,3)) ⊗ (4,4))"
    " ∘ ((3,3) ⊗ ((4,4) ⊠ (2,3))) ∘ (((1,3) ∨ (1,4)) ⊗ (2,2))"
)

# innermost layer first
NINE_EXPR = Compose((
    Tensor((Comult(g(1, 3), g(1, 4)), g(2, 2))),
    Tensor((g(3, 3), Twist(g(4, 4), g(2, 3)))),
    Tensor((Mult(g(3, 3), g(3, 3)), g(4, 4))),
    Tensor((Comult(g(3, 5), g(3, 6)), g(4, 7))),
    Tensor((g(5, 8), Mult(g(6, 9), g(7, 9)))),
))

# H * G with 8 = 10 and 9 = 11: the glued vertices keep the names 8 and 9
HG_LEVELS = (
    ("1", "2"), ("3", "4"), ("5", "6", "7"), ("8", "9"), ("13", "12"), ("15", "16", "14"),
)


def genus_graph(k):
    """Cup into a blue vertex followed by ``k`` handles (split then merge)."""
    vs = [Vertex("e", "e", GREEN), Vertex("m0", "m0", BLUE)]
    edges = [("e", "m0")]
    outs = {"e": ("m0",)}
    for i in range(1, k + 1):
        a, b, m = f"a{i}", f"b{i}", f"m{i}"
        vs += [Vertex(a, a), Vertex(b, b), Vertex(m, m)]
        edges += [(f"m{i - 1}", a), (f"m{i - 1}", b), (a, m), (b, m)]
        outs.update({f"m{i - 1}": (a, b), a: (m,), b: (m,)})
    return TransportGraph.build(ExpressionGraph(tuple(vs), tuple(edges), ("e",), outs))
