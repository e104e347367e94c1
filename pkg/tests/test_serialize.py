import json
import pathlib

import numpy as np
import pytest
from hypothesis import given

from conftest import rng_from, seeds
from graphgen import random_graph, realize
from oracles import random_circuit
from transportc import serialize as js
from transportc.calculus import diagonal_algebra, matrix_algebra
from transportc.circuits import Register, circuit_multitangle
from transportc.composition import TransportGraph
from transportc.errors import SchemaError, SingularInterpolation
from transportc.graph_model import find_expression_iso
from transportc.reduction import reduce
from transportc.transport import (
    Bump,
    ConstantConnection,
    ExpGauge,
    GluedConnection,
    PathSpec,
    ProductGauge,
    PureGaugeConnection,
    SampledConnection,
    ShiftedGauge,
    transport,
)


def through_json(doc, kind):
    doc = json.loads(js.dumps(js.stamp(doc)))
    js.validate_doc(doc, kind)
    return doc


def cm(rng, n=2):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


class TestGraphs:
    @given(seeds)
    def test_graph_round_trip(self, seed):
        g = random_graph(rng_from(seed), 12)
        back = js.graph_from(through_json(js.graph_to(g), "graph"))
        assert back.vertices == g.vertices and back.edges == g.edges
        assert back.source_order == g.source_order
        assert find_expression_iso(back, g) is not None

    def test_transport_graph_round_trip(self):
        rng = rng_from(1)
        t = realize(random_graph(rng, 8), rng)
        back = js.tgraph_from(through_json(js.tgraph_to(t), "graph"))
        assert back.chart == t.chart
        for e, p in t.realization.items():
            assert np.array_equal(back.realization[e].samples, p.samples)

    def test_missing_paths_are_filled(self, nine):
        doc = js.graph_to(nine)
        doc["chart"] = [0, 2, 0, 1]
        t = js.tgraph_from(doc)
        assert isinstance(t, TransportGraph) and len(t.realization) == len(nine.edges)

    def test_reduced_round_trip(self, nine):
        r = reduce(nine)
        back = js.reduced_from(through_json(js.reduced_to(r), "reduced"))
        assert back.edge_origin == r.edge_origin
        assert back.vertex_origin == r.vertex_origin


class TestConnections:
    def test_all_types(self):
        rng = rng_from(2)
        g = ExpGauge(cm(rng) * 0.3, cm(rng) * 0.3)
        xs = np.linspace(0, 1, 3)
        sampled = SampledConnection(xs, xs, np.broadcast_to(cm(rng), (3, 3, 2, 2)),
                                    np.zeros((3, 3, 2, 2)))
        conns = [
            ConstantConnection(cm(rng), cm(rng)),
            sampled,
            PureGaugeConnection(ProductGauge(g, ShiftedGauge(g, 0.1, 0.2))),
            GluedConnection(ConstantConnection(cm(rng), cm(rng)), sampled.translated(1.0), Bump.at(1.0), 1.0),
        ]
        p = PathSpec.polyline([(0.2, 0.3), (0.6, 0.7)])
        for c in conns:
            back = js.connection_from(through_json(js.connection_to(c), "connection"))
            assert np.allclose(transport(back, p, 50), transport(c, p, 50))

    def test_path_round_trip(self):
        p = PathSpec.polyline([(0, 0), (1, 0.5), (0.3, 0.2)])
        back = js.path_from(through_json(js.path_to(p), "path"))
        assert np.array_equal(back.samples, p.samples)

    def test_family(self):
        f = js.family_from({"type": "exp_ray", "kx": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]],
                            "ky": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]})
        assert np.allclose(f(0.0)(0.3, 0.4), np.eye(2))

    def test_bad_sampled_shape(self):
        doc = {"type": "sampled", "xs": [0, 1], "ys": [0, 1],
               "ax": [[[[[0, 0]]]]], "ay": [[[[[0, 0]]]]]}
        with pytest.raises(SingularInterpolation):
            js.connection_from(doc)


class TestAlgebras:
    def test_named(self):
        assert js.algebra_from({"type": "matrix", "k": 2}).n == 4
        assert js.algebra_from({"type": "diagonal", "n": 3}).n == 3

    def test_custom_round_trip(self):
        a = matrix_algebra(2).with_elements({("a", "b"): np.arange(4.0)})
        back = js.algebra_from(through_json(js.algebra_to(a), "algebra"))
        assert np.allclose(back.mult, a.mult) and np.allclose(back.comult, a.comult)
        assert np.allclose(back.element(("a", "b")), np.arange(4.0))

    def test_custom_bad_shape(self):
        with pytest.raises(SchemaError):
            js.algebra_from({"type": "custom", "mult": [[[1, 0]]], "unit": [[1, 0], [1, 0]],
                             "trace": [[1, 0]]})


class TestMultitangles:
    def test_circuit_multitangle_round_trip(self):
        c = random_circuit(rng_from(3), qubits=2, depth=2)
        mt = circuit_multitangle(c, Register.parse("01"))
        back = js.multitangle_from(through_json(js.multitangle_to(mt), "multitangle"))
        assert len(back) == len(mt)
        assert (back.source_arity, back.target_arity) == (mt.source_arity, mt.target_arity)

    def test_connection_count(self):
        with pytest.raises(SchemaError):
            js.multitangle_from({"summands": [], "connections": [{"type": "constant"}]})

    def test_circuit_round_trip(self):
        c = random_circuit(rng_from(4))
        assert js.circuit_from(through_json(js.circuit_to(c), "circuit")) == c


class TestSchema:
    def test_schema_stamp_required(self, nine):
        with pytest.raises(SchemaError, match="schema"):
            js.validate_doc(js.graph_to(nine), "graph")

    def test_wrong_version(self, nine):
        doc = js.stamp(js.graph_to(nine))
        doc["schema"] = "transportc/v0"
        with pytest.raises(SchemaError):
            js.validate_doc(doc, "graph")

    def test_error_names_location(self):
        doc = js.stamp({"vertices": [{"id": "a", "label": "a", "color": "red"}], "edges": []})
        with pytest.raises(SchemaError, match="vertices/0"):
            js.validate_doc(doc, "graph")

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            js.validate_doc({}, "banana")

    @pytest.mark.parametrize("doc,kind", [
        ({"vertices": []}, "graph"),
        ({"vertex_origin": {}}, "reduced"),
        ({"summands": []}, "multitangle"),
        ({"qubits": 1}, "circuit"),
        ({"amplitudes": []}, "amplitudes"),
        ({"samples": []}, "path"),
        ({"matrix": []}, "matrix_doc"),
        ({"type": "diagonal"}, "algebra"),
        ({"type": "glued"}, "connection"),
        ({"type": "exp_ray"}, "family"),
        ({"kind": "gen"}, "expression"),
    ])
    def test_guess_kind(self, doc, kind):
        assert js.guess_kind(doc) == kind

    def test_guess_fails(self):
        with pytest.raises(SchemaError):
            js.guess_kind({"what": 1})
        with pytest.raises(SchemaError):
            js.guess_kind([1, 2])

    def test_load_errors(self, tmp_path):
        with pytest.raises(SchemaError, match="cannot read"):
            js.load(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(SchemaError, match="invalid JSON"):
            js.load(str(bad))

    def test_dumps_keeps_pairs_on_one_line(self, nine):
        text = js.dumps(js.graph_to(nine))
        assert '["1", "3"]' in text

    def test_complex_numbers(self):
        m = np.array([[1 + 2j, -0.5j]])
        assert np.array_equal(js.cmat_from(js.cmat_to(m)), m)
        assert np.array_equal(js.cvec_from(js.cvec_to(m[0])), m[0])

    def test_data_files_validate(self):
        for f in sorted((pathlib.Path(__file__).parent / "data").glob("*.json")):
            kind, _ = js.load(str(f))
            assert kind in ("graph", "circuit")

    def test_diagonal_json(self):
        assert js.algebra_from({"type": "diagonal", "n": 2}).unit.tolist() == diagonal_algebra(2).unit.tolist()
