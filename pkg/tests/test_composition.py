import numpy as np
import pytest
from hypothesis import given

from conftest import rng_from, seeds
from graphgen import extend, gluable_pair, random_graph, realize
from worked_examples import HG_LEVELS
from transportc.composition import (
    Multitangle,
    TransportGraph,
    add,
    compose_multitangles,
    disjoint_union,
    glue,
    glue_at,
    pad,
    sources_unit,
    targets_unit,
)
from transportc.errors import NotGluable, SegmentOutOfRange
from transportc.expression import Compose, Tensor, exprs_equivalent, extract_expr
from transportc.graph_model import (
    BLUE,
    GREEN,
    ExpressionGraph,
    Vertex,
    find_expression_iso,
    level_order,
    sources,
    targets,
    validate,
)
from transportc.reduction import reduce
from transportc.transport import ConstantConnection, PathSpec


def exp(g):
    return extract_expr(reduce(g))


def chain(*ids, color=BLUE):
    vs = tuple(Vertex(i, i, color) for i in ids)
    return ExpressionGraph(vs, tuple(zip(ids, ids[1:])), (ids[0],),
                           {a: (b,) for a, b in zip(ids, ids[1:])})


class TestGlue:
    def test_worked_example(self, nine, example_h):
        hg = glue(example_h, nine)
        validate(hg)
        assert len(hg.vertices) == 14
        assert level_order(hg).levels == HG_LEVELS
        # 10 and 11 are gone, 8 and 9 now feed H's edges
        ids = {v.id for v in hg.vertices}
        assert "10" not in ids and "11" not in ids
        assert ("8", "13") in hg.edges and ("9", "12") in hg.edges

    def test_levels_add_minus_one(self, nine, example_h):
        n = lambda g: len(level_order(g).levels)
        assert n(glue(example_h, nine)) == n(nine) + n(example_h) - 1

    def test_worked_example_compositional(self, nine, example_h):
        assert exprs_equivalent(exp(glue(example_h, nine)), Compose((exp(nine), exp(example_h))))

    def test_blue_count_mismatch_names_slots(self, nine):
        h = ExpressionGraph.build([("a", "b")])
        with pytest.raises(NotGluable, match="slot 1"):
            glue(h, nine)

    def test_green_slots_pair_between_blues(self):
        g = ExpressionGraph((Vertex("x", "x"), Vertex("y", "y", GREEN)), (), ("x", "y"), {})
        h = ExpressionGraph((Vertex("p", "p"), Vertex("q", "q", GREEN), Vertex("r", "r")),
                            (("p", "r"), ("q", "r")), ("p", "q"), {"p": ("r",), "q": ("r",)})
        hg = glue(h, g)
        assert ("y", "r") in hg.edges
        assert len(hg.vertices) == 3

    def test_glued_label_follows_earlier_graph(self):
        hg = glue(chain("a", "b"), chain("x", "y"))
        assert {hg.label(v.id) for v in hg.vertices} == {"x", "y", "b"}

    def test_label_clash_is_primed(self):
        # h's second vertex shares a label with g's first
        g = chain("u", "v")
        h = ExpressionGraph((Vertex("s", "s"), Vertex("t", "u")), (("s", "t"),), ("s",), {"s": ("t",)})
        hg = glue(h, g)
        assert sorted(hg.label(v.id) for v in hg.vertices) == ["u", "u'", "v"]

    def test_transport_graphs_side_by_side(self):
        rng = rng_from(4)
        g, h = chain("a", "b"), chain("c", "d")
        tg, th = realize(g, rng, (0, 1, 0, 1)), realize(h, rng, (0, 1, 0, 1))
        t = glue(th, tg)
        assert isinstance(t, TransportGraph)
        assert t.chart == (0, 2, 0, 1)
        moved = t.realization[("b", "d")]
        assert np.allclose(moved.start, th.realization[("c", "d")].start + [1.0, 0.0])


class TestGlueAt:
    def test_middle_segment(self):
        vs = tuple(Vertex(i, i) for i in ("p", "q", "r", "z"))
        h = ExpressionGraph(vs, (("p", "z"), ("q", "z"), ("r", "z")), ("p", "q", "r"),
                            {"p": ("z",), "q": ("z",), "r": ("z",)})
        out = glue_at(h, chain("a", "b"), (1, 2))
        assert sources(out).ids == ("p", "a", "r")
        assert ("b", "z") in out.edges

    def test_out_of_range(self):
        with pytest.raises(SegmentOutOfRange):
            glue_at(chain("a", "b"), chain("c", "d"), (0, 3))

    def test_color_mismatch(self):
        g = ExpressionGraph((Vertex("c", "c", GREEN),), (), ("c",), {})
        with pytest.raises(NotGluable):
            glue_at(chain("a", "b"), g, (0, 1))


class TestUnion:
    def test_boundaries_concatenate(self, nine):
        other = chain("a", "b")
        u = disjoint_union(nine, other)
        assert sources(u).ids[:2] == sources(nine).ids
        assert len(sources(u)) == 3
        assert len(targets(u)) == len(targets(nine)) + 1

    def test_ids_kept_apart(self, nine):
        u = disjoint_union(nine, nine)
        assert len(u.vertices) == 18
        validate(u)

    def test_empty_is_unit(self, nine):
        empty = ExpressionGraph((), (), (), {})
        assert find_expression_iso(disjoint_union(nine, empty), nine) is not None

    @given(seeds)
    def test_expression_is_tensor(self, seed):
        rng = rng_from(seed)
        g, h = random_graph(rng, 8), random_graph(rng, 8, prefix="w")
        u = disjoint_union(g, h)
        assert exprs_equivalent(exp(u), Tensor((exp(g), exp(h))))


class TestUnitsAndAssociativity:
    @given(seeds)
    def test_units(self, seed):
        g = random_graph(rng_from(seed), 10)
        assert find_expression_iso(glue(g, sources_unit(g)), g) is not None
        assert find_expression_iso(glue(targets_unit(g), g), g) is not None

    @given(seeds)
    def test_associative(self, seed):
        rng = rng_from(seed)
        h, g = gluable_pair(rng, 8)
        k = extend(h, rng, prefix="k")
        left = glue(k, glue(h, g))
        right = glue(glue(k, h), g)
        assert find_expression_iso(left, right) is not None

    @given(seeds)
    def test_compositional(self, seed):
        h, g = gluable_pair(rng_from(seed))
        assert exprs_equivalent(exp(glue(h, g)), Compose((exp(g), exp(h))))


def _cyl(name):
    g = chain(name + "0", name + "1")
    return TransportGraph.build(g, {g.edges[0]: PathSpec.straight((0.2, 0.5), (0.8, 0.5))})


class TestMultitangle:
    def test_arity_is_max(self):
        one = _cyl("a")
        two = disjoint_union(_cyl("b"), _cyl("c"))
        m = Multitangle((one, two))
        assert (m.source_arity, m.target_arity) == (2, 2)

    def test_add_concatenates(self):
        z = ConstantConnection.zero(2)
        m = Multitangle((_cyl("a"),), (z,))
        n = Multitangle((_cyl("b"), _cyl("c")), (z, z))
        s = add(m, n)
        assert len(s) == 3 and len(s.connections) == 3

    def test_add_empty_is_unit(self):
        m = Multitangle((_cyl("a"),))
        assert add(Multitangle(), m).summands == m.summands

    def test_connection_count_checked(self):
        with pytest.raises(ValueError):
            Multitangle((_cyl("a"),), ())

    def test_compose_is_bilinear_and_i_major(self):
        m = Multitangle((_cyl("m1"), _cyl("m2"), _cyl("m3")))
        n = Multitangle((_cyl("n1"), _cyl("n2")))
        nm = compose_multitangles(n, m)
        assert len(nm) == 6
        tags = [sorted({v.label[0] + v.label[1] for v in s.graph.vertices}) for s in nm.summands]
        want = [sorted({"n" + j, "m" + i}) for i in "123" for j in "12"]
        assert tags == want

    def test_compose_pads_narrow_side(self):
        wide = disjoint_union(_cyl("a"), _cyl("b"))
        nm = compose_multitangles(Multitangle((wide,)), Multitangle((_cyl("c"),)))
        s = nm.summands[0]
        assert sources(s.graph).blue_count == 2
        assert targets(s.graph).blue_count == 2

    def test_pad_appends_identity_slots(self):
        t = pad(_cyl("a"), 2)
        assert sources(t.graph).blue_count == 3
        assert t.chart[1] > _cyl("a").chart[1]
