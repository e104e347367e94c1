"""JSON documents for every artifact, with jsonschema validation.

Top-level documents carry ``"schema": "transportc/v1"``.  Complex matrices are
row-major nested lists of ``[re, im]`` pairs, vectors are lists of pairs.
"""
from __future__ import annotations

import json
import re
from typing import Any, Callable

import jsonschema
import numpy as np

from .calculus import AlgebraSpec, diagonal_algebra, matrix_algebra
from .circuits import Circuit
from .composition import Multitangle, TransportGraph
from .errors import SchemaError
from .expression import from_json as expr_from_json
from .expression import to_json as expr_to_json
from .graph_model import ExpressionGraph, Vertex
from .reduction import ReducedGraph
from .transport import (
    Bump,
    ConnectionSpec,
    ConstantConnection,
    ConstantGauge,
    ExpGauge,
    GaugeMap,
    GluedConnection,
    PathSpec,
    ProductGauge,
    PureGaugeConnection,
    SampledConnection,
    SampledGauge,
    ShiftedGauge,
)

SCHEMA_VERSION = "transportc/v1"

# schemas ------------------------------------------------------------------

_DEFS: dict[str, Any] = {
    "id": {"type": "string"},
    "complex": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    "cvector": {"type": "array", "items": {"$ref": "#/$defs/complex"}},
    "cmatrix": {"type": "array", "items": {"$ref": "#/$defs/cvector"}, "minItems": 1},
    "cgrid": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/cmatrix"}}},
    "numbers": {"type": "array", "items": {"type": "number"}},
    "chart": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
    "edge": {"type": "array", "items": {"$ref": "#/$defs/id"}, "minItems": 2, "maxItems": 2},
    "vertex": {
        "type": "object",
        "required": ["id", "label", "color"],
        "properties": {
            "id": {"$ref": "#/$defs/id"},
            "label": {"type": "string"},
            "color": {"enum": ["blue", "green"]},
        },
    },
    "path": {
        "type": "object",
        "required": ["samples"],
        "properties": {
            "samples": {
                "type": "array", "minItems": 1,
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
            }
        },
    },
    "graph": {
        "type": "object",
        "required": ["vertices", "edges"],
        "properties": {
            "vertices": {"type": "array", "items": {"$ref": "#/$defs/vertex"}},
            "edges": {"type": "array", "items": {"$ref": "#/$defs/edge"}},
            "source_order": {"type": "array", "items": {"$ref": "#/$defs/id"}},
            "out_orders": {"type": "object", "additionalProperties": {
                "type": "array", "items": {"$ref": "#/$defs/id"}}},
            "chart": {"$ref": "#/$defs/chart"},
            "realization": {"type": "array", "items": {
                "type": "object", "required": ["edge", "path"],
                "properties": {"edge": {"$ref": "#/$defs/edge"}, "path": {"$ref": "#/$defs/path"}},
            }},
        },
    },
    "gauge": {
        "type": "object",
        "required": ["type"],
        "oneOf": [
            {"properties": {"type": {"const": "constant"}, "matrix": {"$ref": "#/$defs/cmatrix"}},
             "required": ["matrix"]},
            {"properties": {"type": {"const": "exp"}, "kx": {"$ref": "#/$defs/cmatrix"},
                            "ky": {"$ref": "#/$defs/cmatrix"}}, "required": ["kx", "ky"]},
            {"properties": {"type": {"const": "product"}, "outer": {"$ref": "#/$defs/gauge"},
                            "inner": {"$ref": "#/$defs/gauge"}}, "required": ["outer", "inner"]},
            {"properties": {"type": {"const": "shifted"}, "base": {"$ref": "#/$defs/gauge"},
                            "dx": {"type": "number"}, "dy": {"type": "number"}},
             "required": ["base"]},
            {"properties": {"type": {"const": "sampled"}, "xs": {"$ref": "#/$defs/numbers"},
                            "ys": {"$ref": "#/$defs/numbers"}, "values": {"$ref": "#/$defs/cgrid"}},
             "required": ["xs", "ys", "values"]},
        ],
    },
    "connection": {
        "type": "object",
        "required": ["type"],
        "oneOf": [
            {"properties": {"type": {"const": "constant"}, "ax": {"$ref": "#/$defs/cmatrix"},
                            "ay": {"$ref": "#/$defs/cmatrix"}}, "required": ["ax", "ay"]},
            {"properties": {"type": {"const": "sampled"}, "xs": {"$ref": "#/$defs/numbers"},
                            "ys": {"$ref": "#/$defs/numbers"}, "ax": {"$ref": "#/$defs/cgrid"},
                            "ay": {"$ref": "#/$defs/cgrid"}}, "required": ["xs", "ys", "ax", "ay"]},
            {"properties": {"type": {"const": "pure_gauge"}, "gauge": {"$ref": "#/$defs/gauge"}},
             "required": ["gauge"]},
            {"properties": {"type": {"const": "glued"}, "left": {"$ref": "#/$defs/connection"},
                            "right": {"$ref": "#/$defs/connection"}, "seam": {"type": "number"},
                            "bump": {"type": "object", "required": ["a", "b"], "properties": {
                                "a": {"type": "number"}, "b": {"type": "number"}}}},
             "required": ["left", "right", "seam", "bump"]},
        ],
    },
    "algebra": {
        "type": "object",
        "required": ["type"],
        "properties": {
            "elements": {"type": "array", "items": {
                "type": "object", "required": ["edge", "value"],
                "properties": {"edge": {"$ref": "#/$defs/edge"}, "value": {"$ref": "#/$defs/cvector"}},
            }},
        },
        "oneOf": [
            {"properties": {"type": {"const": "matrix"}, "k": {"type": "integer", "minimum": 1}},
             "required": ["k"]},
            {"properties": {"type": {"const": "diagonal"}, "n": {"type": "integer", "minimum": 1}},
             "required": ["n"]},
            {"properties": {"type": {"const": "custom"}, "mult": {"$ref": "#/$defs/cmatrix"},
                            "unit": {"$ref": "#/$defs/cvector"}, "trace": {"$ref": "#/$defs/cvector"},
                            "comult": {"$ref": "#/$defs/cmatrix"}},
             "required": ["mult", "unit", "trace"]},
        ],
    },
    "multitangle": {
        "type": "object",
        "required": ["summands"],
        "properties": {
            "summands": {"type": "array", "items": {"$ref": "#/$defs/graph"}},
            "connections": {"type": "array", "items": {"$ref": "#/$defs/connection"}},
            "source_arity": {"type": "integer", "minimum": 0},
            "target_arity": {"type": "integer", "minimum": 0},
        },
    },
    "circuit": {
        "type": "object",
        "required": ["qubits", "layers"],
        "properties": {
            "qubits": {"type": "integer", "minimum": 1},
            "layers": {"type": "array", "items": {"type": "array", "items": {
                "type": "object", "required": ["gate", "wires"],
                "properties": {"gate": {"type": "string"},
                               "wires": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                         "minItems": 1}},
            }}},
        },
    },
    "family": {
        "type": "object",
        "required": ["type", "kx", "ky"],
        "properties": {
            "type": {"const": "exp_ray"},
            "kx": {"$ref": "#/$defs/cmatrix"},
            "ky": {"$ref": "#/$defs/cmatrix"},
            "grid": {"type": "integer", "minimum": 3},
        },
    },
    "matrix_doc": {
        "type": "object",
        "anyOf": [{"required": ["matrix"]}, {"required": ["matrices"]}],
        "properties": {
            "matrix": {"$ref": "#/$defs/cmatrix"},
            "matrices": {"type": "array", "items": {"$ref": "#/$defs/cmatrix"}},
            "ts": {"$ref": "#/$defs/numbers"},
            "domain_dim": {"type": "integer"},
            "codomain_dim": {"type": "integer"},
        },
    },
    "amplitudes": {
        "type": "object",
        "required": ["qubits", "amplitudes"],
        "properties": {"qubits": {"type": "integer"}, "amplitudes": {"$ref": "#/$defs/cvector"}},
    },
    "reduced": {
        "type": "object",
        "required": ["graph", "vertex_origin", "edge_origin"],
        "properties": {
            "graph": {"$ref": "#/$defs/graph"},
            "vertex_origin": {"type": "object", "additionalProperties": {"type": "string"}},
            "edge_origin": {"type": "array", "items": {
                "type": "object", "required": ["edge", "origin"],
                "properties": {"edge": {"$ref": "#/$defs/edge"},
                               "origin": {"oneOf": [{"$ref": "#/$defs/edge"}, {"type": "null"}]}},
            }},
        },
    },
    "expression": {"type": "object", "required": ["kind"]},
}

KINDS = ("graph", "reduced", "multitangle", "connection", "path", "algebra", "circuit",
         "family", "gauge", "matrix_doc", "amplitudes", "expression")


def schema_for(kind: str) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$defs": _DEFS,
        "allOf": [
            {"$ref": f"#/$defs/{kind}"},
            {"type": "object", "required": ["schema"],
             "properties": {"schema": {"const": SCHEMA_VERSION}}},
        ],
    }


_VALIDATORS: dict[str, jsonschema.Draft202012Validator] = {}


def validate_doc(doc: Any, kind: str) -> None:
    if kind not in KINDS:
        raise SchemaError(f"unknown document kind {kind!r}")
    v = _VALIDATORS.get(kind)
    if v is None:
        v = _VALIDATORS[kind] = jsonschema.Draft202012Validator(schema_for(kind))
    err = jsonschema.exceptions.best_match(v.iter_errors(doc))
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{kind} document invalid at {where}: {err.message}")


def guess_kind(doc: Any) -> str:
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    if "vertex_origin" in doc:
        return "reduced"
    if "vertices" in doc:
        return "graph"
    if "summands" in doc:
        return "multitangle"
    if "amplitudes" in doc:
        return "amplitudes"
    if "qubits" in doc:
        return "circuit"
    if "samples" in doc:
        return "path"
    if ("matrix" in doc or "matrices" in doc) and "type" not in doc:
        return "matrix_doc"
    t = doc.get("type")
    if t in ("matrix", "diagonal", "custom"):
        return "algebra"
    if t == "exp_ray":
        return "family"
    if t in ("constant", "sampled", "pure_gauge", "glued"):
        return "connection"
    if "kind" in doc:
        return "expression"
    raise SchemaError("cannot tell what kind of document this is")


def stamp(doc: dict) -> dict:
    return {"schema": SCHEMA_VERSION, **doc}


def load(path: str, kind: str | None = None) -> tuple[str, Any]:
    """Read, parse and schema-check a file; returns (kind, document)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    kind = kind or guess_kind(doc)
    try:
        validate_doc(doc, kind)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    return kind, doc


_FLAT_LIST = re.compile(r"\[\s+([^\[\]{}]*?)\s+\]")


def dumps(doc: dict) -> str:
    """Indented JSON with innermost arrays (numbers, id pairs) kept on one line."""
    text = json.dumps(doc, indent=2, ensure_ascii=False)
    return _FLAT_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)


# numbers ------------------------------------------------------------------

def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def cvec_to(v) -> list:
    return [_c(z) for z in np.asarray(v).reshape(-1)]


def cmat_to(m) -> list:
    m = np.atleast_2d(np.asarray(m))
    return [[_c(z) for z in row] for row in m]


def cvec_from(d) -> np.ndarray:
    a = np.asarray(d, dtype=float).reshape(-1, 2)
    return a[:, 0] + 1j * a[:, 1]


def cmat_from(d) -> np.ndarray:
    a = np.asarray(d, dtype=float)
    if a.ndim < 3 or a.shape[-1] != 2:
        raise SchemaError("matrix entries must be [re, im] pairs in rectangular rows")
    return a[..., 0] + 1j * a[..., 1]


def _grid_to(a) -> list:
    a = np.asarray(a)
    return [[cmat_to(a[i, j]) for j in range(a.shape[1])] for i in range(a.shape[0])]


# graphs -------------------------------------------------------------------

def graph_to(g: ExpressionGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "label": v.label, "color": v.color} for v in g.vertices],
        "edges": [list(e) for e in g.edges],
        "source_order": list(g.source_order),
        "out_orders": {u: list(ws) for u, ws in g.out_orders.items() if ws},
    }


def graph_from(d: dict) -> ExpressionGraph:
    vs = [(v["id"], v["label"], v["color"]) for v in d["vertices"]]
    return ExpressionGraph.build(
        [tuple(e) for e in d["edges"]],
        vertices=[Vertex(*v) for v in vs],
        source_order=d.get("source_order"),
        out_orders=d.get("out_orders"),
    )


def path_to(p: PathSpec) -> dict:
    return {"samples": p.samples.tolist()}


def path_from(d: dict) -> PathSpec:
    try:
        return PathSpec(d["samples"])
    except ValueError as exc:
        raise SchemaError(f"path: {exc}") from None


def tgraph_to(t: TransportGraph) -> dict:
    d = graph_to(t.graph)
    d["chart"] = list(t.chart)
    d["realization"] = [{"edge": list(e), "path": path_to(p)} for e, p in t.realization.items()]
    return d


def tgraph_from(d: dict) -> TransportGraph:
    g = graph_from(d)
    real = {tuple(r["edge"]): path_from(r["path"]) for r in d.get("realization", ())}
    chart = tuple(d.get("chart", (0.0, 1.0, 0.0, 1.0)))
    return TransportGraph.build(g, real, chart)


def reduced_to(r: ReducedGraph) -> dict:
    return {
        "graph": graph_to(r.graph),
        "vertex_origin": dict(r.vertex_origin),
        "edge_origin": [{"edge": list(e), "origin": None if o is None else list(o)}
                        for e, o in r.edge_origin.items()],
    }


def reduced_from(d: dict) -> ReducedGraph:
    eo = {tuple(x["edge"]): None if x["origin"] is None else tuple(x["origin"])
          for x in d["edge_origin"]}
    return ReducedGraph(graph_from(d["graph"]), dict(d["vertex_origin"]), eo)


expression_to = expr_to_json
expression_from = expr_from_json


# gauges and connections ---------------------------------------------------

def gauge_to(g: GaugeMap) -> dict:
    if isinstance(g, ConstantGauge):
        return {"type": "constant", "matrix": cmat_to(g.matrix)}
    if isinstance(g, ExpGauge):
        return {"type": "exp", "kx": cmat_to(g.kx), "ky": cmat_to(g.ky)}
    if isinstance(g, ProductGauge):
        return {"type": "product", "outer": gauge_to(g.outer), "inner": gauge_to(g.inner)}
    if isinstance(g, ShiftedGauge):
        return {"type": "shifted", "base": gauge_to(g.base), "dx": g.dx, "dy": g.dy}
    if isinstance(g, SampledGauge):
        return {"type": "sampled", "xs": g.xs.tolist(), "ys": g.ys.tolist(),
                "values": _grid_to(g.grid_values)}
    raise SchemaError(f"no JSON form for {type(g).__name__}")


def gauge_from(d: dict) -> GaugeMap:
    t = d["type"]
    if t == "constant":
        return ConstantGauge(cmat_from(d["matrix"]))
    if t == "exp":
        return ExpGauge(cmat_from(d["kx"]), cmat_from(d["ky"]))
    if t == "product":
        return ProductGauge(gauge_from(d["outer"]), gauge_from(d["inner"]))
    if t == "shifted":
        return ShiftedGauge(gauge_from(d["base"]), float(d.get("dx", 0.0)), float(d.get("dy", 0.0)))
    return SampledGauge(d["xs"], d["ys"], cmat_from(d["values"]))


def connection_to(c: ConnectionSpec) -> dict:
    if isinstance(c, ConstantConnection):
        return {"type": "constant", "ax": cmat_to(c.cx), "ay": cmat_to(c.cy)}
    if isinstance(c, SampledConnection):
        return {"type": "sampled", "xs": c.xs.tolist(), "ys": c.ys.tolist(),
                "ax": _grid_to(c.ax), "ay": _grid_to(c.ay)}
    if isinstance(c, PureGaugeConnection):
        return {"type": "pure_gauge", "gauge": gauge_to(c.gauge)}
    if isinstance(c, GluedConnection):
        return {"type": "glued", "left": connection_to(c.left), "right": connection_to(c.right),
                "bump": {"a": c.bump.a, "b": c.bump.b}, "seam": c.seam}
    raise SchemaError(f"no JSON form for {type(c).__name__}")


def connection_from(d: dict) -> ConnectionSpec:
    t = d["type"]
    try:
        if t == "constant":
            return ConstantConnection(cmat_from(d["ax"]), cmat_from(d["ay"]))
        if t == "sampled":
            return SampledConnection(np.asarray(d["xs"], float), np.asarray(d["ys"], float),
                                     cmat_from(d["ax"]), cmat_from(d["ay"]))
        if t == "pure_gauge":
            return PureGaugeConnection(gauge_from(d["gauge"]))
        return GluedConnection(connection_from(d["left"]), connection_from(d["right"]),
                               Bump(float(d["bump"]["a"]), float(d["bump"]["b"])), float(d["seam"]))
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{t} connection: {exc}") from None


def family_from(d: dict) -> Callable[[float], GaugeMap]:
    """``t -> expm(t x Kx) expm(t y Ky)``: a path of gauges from the identity."""
    kx, ky = cmat_from(d["kx"]), cmat_from(d["ky"])
    return lambda t: ExpGauge(t * kx, t * ky)


# algebras -----------------------------------------------------------------

def algebra_to(a: AlgebraSpec) -> dict:
    d = {"type": "custom", "mult": cmat_to(a.mult), "unit": cvec_to(a.unit),
         "trace": cvec_to(a.trace), "comult": cmat_to(a.comult)}
    if a.elements:
        d["elements"] = [{"edge": list(e), "value": cvec_to(v)} for e, v in a.elements.items()]
    return d


def algebra_from(d: dict) -> AlgebraSpec:
    t = d["type"]
    if t == "matrix":
        a = matrix_algebra(int(d["k"]))
    elif t == "diagonal":
        a = diagonal_algebra(int(d["n"]))
    else:
        try:
            a = AlgebraSpec.from_mult(
                cmat_from(d["mult"]), cvec_from(d["unit"]), cvec_from(d["trace"]),
                cmat_from(d["comult"]) if "comult" in d else None,
            )
        except ValueError as exc:
            raise SchemaError(f"custom algebra: {exc}") from None
    if d.get("elements"):
        a = a.with_elements({tuple(x["edge"]): cvec_from(x["value"]) for x in d["elements"]})
    return a


# multitangles and circuits ---------------------------------------------------

def multitangle_to(mt: Multitangle) -> dict:
    d: dict = {"summands": [tgraph_to(t) for t in mt.summands],
               "source_arity": mt.source_arity, "target_arity": mt.target_arity}
    if mt.connections is not None:
        d["connections"] = [connection_to(c) for c in mt.connections]
    return d


def multitangle_from(d: dict) -> Multitangle:
    conns = d.get("connections")
    if conns is not None and len(conns) != len(d["summands"]):
        raise SchemaError("multitangle needs one connection per summand")
    return Multitangle(
        tuple(tgraph_from(s) for s in d["summands"]),
        None if conns is None else tuple(connection_from(c) for c in conns),
        int(d.get("source_arity", 0)), int(d.get("target_arity", 0)),
    )


def circuit_to(c: Circuit) -> dict:
    return c.to_json()


def circuit_from(d: dict) -> Circuit:
    return Circuit.from_json(d)
