"""Command line driver.

Exit status: 0 on success, 1 when the input is well formed but the operation
is impossible (not gluable, cyclic graph, ...), 2 on unreadable files and
schema violations.  Errors are one line on stderr, never a traceback.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialize as js
from .calculus import eval_2morphism_family, eval_graph, eval_multitangle
from .circuits import (
    Register,
    apply_circuit,
    circuit_multitangle,
    layer_multitangle,
    standard_gates,
)
from .composition import Multitangle, add, compose_multitangles, disjoint_union, glue, glue_at
from .dot import render_dot
from .errors import SchemaError, TransportcError
from .expression import extract_expr, to_notation
from .graph_model import validate
from .reduction import ReducedGraph, reduce
from .transport import Grid, transport

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(f"{self.prog}: {message}")


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def _emit_doc(args, doc: dict) -> None:
    _emit(args, js.dumps(js.stamp(doc)) + "\n")


def _has_geometry(doc: dict) -> bool:
    return "realization" in doc or "chart" in doc


def _load_graph(path: str):
    """Graph or reduced-graph document as (ExpressionGraph | ReducedGraph)."""
    kind, doc = js.load(path)
    if kind == "graph":
        return validate(js.graph_from(doc))
    if kind == "reduced":
        r = js.reduced_from(doc)
        validate(r.graph)
        return r
    raise SchemaError(f"{path}: expected a graph document, found {kind}")


def _load_operands(paths):
    docs = [js.load(p, "graph")[1] for p in paths]
    if any(_has_geometry(d) for d in docs):
        return [js.tgraph_from(d) for d in docs]
    return [validate(js.graph_from(d)) for d in docs]


def _graph_doc(x) -> dict:
    return js.graph_to(x) if not hasattr(x, "realization") else js.tgraph_to(x)


def _load_multitangle(path: str) -> Multitangle:
    kind, doc = js.load(path)
    if kind == "multitangle":
        return js.multitangle_from(doc)
    if kind == "graph":
        return Multitangle((js.tgraph_from(doc),))
    raise SchemaError(f"{path}: expected a multitangle or graph document, found {kind}")


def _matrix_doc(m) -> dict:
    m = np.atleast_2d(m)
    return {"matrix": js.cmat_to(m), "domain_dim": int(m.shape[1]), "codomain_dim": int(m.shape[0])}


# commands -----------------------------------------------------------------

def cmd_validate(args) -> None:
    kind, doc = js.load(args.file, args.kind)
    if kind == "graph":
        validate(js.graph_from(doc))
        if _has_geometry(doc):
            js.tgraph_from(doc)
    elif kind == "reduced":
        validate(js.reduced_from(doc).graph)
    elif kind == "multitangle":
        for t in js.multitangle_from(doc).summands:
            validate(t.graph)
    elif kind == "connection":
        js.connection_from(doc)
    elif kind == "path":
        js.path_from(doc)
    elif kind == "algebra":
        js.algebra_from(doc)
    elif kind == "circuit":
        c = js.circuit_from(doc)
        lib = standard_gates()
        for layer in c.layers:
            layer_multitangle(layer, c.qubits, lib)
    sys.stdout.write(f"ok: {args.file} is a valid {kind} document\n")


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise SchemaError(f"cannot write {path}: {exc.strerror}") from None


def cmd_reduce(args) -> None:
    g = _load_graph(args.graph)
    r = reduce(g)
    if args.dot:
        _write(args.dot, render_dot(g))
    if args.dot_reduced:
        _write(args.dot_reduced, render_dot(r))
    _emit_doc(args, js.reduced_to(r))


def cmd_expr(args) -> None:
    g = _load_graph(args.graph)
    e = extract_expr(g if isinstance(g, ReducedGraph) else reduce(g))
    if args.json:
        _emit_doc(args, js.expression_to(e))
    else:
        _emit(args, to_notation(e) + "\n")


def cmd_glue(args) -> None:
    h, g = _load_operands([args.h, args.g])
    out = glue_at(h, g, tuple(args.segment)) if args.segment else glue(h, g)
    _emit_doc(args, _graph_doc(out))


def cmd_union(args) -> None:
    g, h = _load_operands([args.g, args.h])
    _emit_doc(args, _graph_doc(disjoint_union(g, h)))


def cmd_add(args) -> None:
    m, n = _load_multitangle(args.m), _load_multitangle(args.n)
    _emit_doc(args, js.multitangle_to(add(m, n)))


def cmd_mtcompose(args) -> None:
    n, m = _load_multitangle(args.n), _load_multitangle(args.m)
    _emit_doc(args, js.multitangle_to(compose_multitangles(n, m)))


def cmd_transport(args) -> None:
    conn = js.connection_from(js.load(args.conn, "connection")[1])
    path = js.path_from(js.load(args.path, "path")[1])
    _emit_doc(args, _matrix_doc(transport(conn, path, args.steps)))


def cmd_eval(args) -> None:
    kind, doc = js.load(args.graph)
    if kind not in ("graph", "multitangle"):
        raise SchemaError(f"{args.graph}: expected a graph or multitangle document, found {kind}")
    conn = js.connection_from(js.load(args.conn, "connection")[1]) if args.conn else None
    alg = js.algebra_from(js.load(args.algebra, "algebra")[1])
    if kind == "multitangle":
        if args.family:
            raise SchemaError("--family applies to a single graph, not a multitangle")
        mt = js.multitangle_from(doc)
        if conn is None and mt.connections is None:
            raise SchemaError("multitangle has no connections; pass --conn")
        r = eval_multitangle(mt, conn, alg, args.steps)
        _emit_doc(args, _matrix_doc(r.matrix))
        return
    if conn is None:
        raise SchemaError("eval of a graph needs --conn")
    tg = js.tgraph_from(doc)
    validate(tg.graph)
    if args.family:
        fam = js.load(args.family, "family")[1]
        grid = Grid.over(tg.chart, fam.get("grid", 201))
        ms = eval_2morphism_family(tg, conn, js.family_from(fam), args.samples, alg,
                                   args.steps, grid)
        ts = np.linspace(0.0, 1.0, args.samples) if args.samples > 1 else np.zeros(1)
        _emit_doc(args, {"matrices": [js.cmat_to(m) for m in ms], "ts": ts.tolist()})
        return
    _emit_doc(args, _matrix_doc(eval_graph(tg, conn, alg, args.steps).matrix))


def _circuit_inputs(args):
    path = args.circuit or args.circuit_file
    if not path:
        raise SchemaError("circuit: pass a circuit file")
    c = js.circuit_from(js.load(path, "circuit")[1])
    bits = args.input or "0" * c.qubits
    if set(bits) - {"0", "1"}:
        raise SchemaError(f"--input must be a bit string, got {bits!r}")
    return c, Register.parse(bits)


def cmd_circuit_run(args) -> None:
    c, r = _circuit_inputs(args)
    amps = apply_circuit(c, r, glued=args.glued, steps=args.steps)
    _emit_doc(args, {"qubits": c.qubits, "amplitudes": js.cvec_to(amps)})


def cmd_circuit_lower(args) -> None:
    c, r = _circuit_inputs(args)
    _emit_doc(args, js.multitangle_to(circuit_multitangle(c, r)))


def cmd_render(args) -> None:
    _emit(args, render_dot(_load_graph(args.graph)))


# parser -------------------------------------------------------------------

def _steps(p):
    p.add_argument("--steps", type=int, default=None,
                   help="RK4 steps per path (default 1000 or $TRANSPORTC_STEPS)")


def _out(p):
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="transportc", description="Reduce expression graphs and evaluate "
                 "transport graphs to matrices.  Exit status 0 ok, 1 domain error, 2 bad input.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a JSON document against its schema and invariants")
    p.add_argument("file", help="JSON document")
    p.add_argument("--kind", choices=js.KINDS, help="document kind (guessed when omitted)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reduce", help="reduce a graph; prints the reduced graph with provenance")
    p.add_argument("graph", help="graph JSON")
    p.add_argument("--dot", help="also write a DOT rendering of the input graph here")
    p.add_argument("--dot-reduced", help="also write a DOT rendering of the reduced graph here")
    _out(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("expr", help="extract the cobordism expression of a graph")
    p.add_argument("graph", help="graph or reduced-graph JSON")
    p.add_argument("--json", action="store_true", help="print the JSON syntax tree instead")
    _out(p)
    p.set_defaults(func=cmd_expr)

    p = sub.add_parser("glue", help="glue H onto G (sources of H to targets of G)")
    p.add_argument("h", help="later graph")
    p.add_argument("g", help="earlier graph")
    p.add_argument("--segment", type=int, nargs=2, metavar=("START", "STOP"),
                   help="glue into source slots START..STOP-1 of H only")
    _out(p)
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("union", help="disjoint union, G then H")
    p.add_argument("g")
    p.add_argument("h")
    _out(p)
    p.set_defaults(func=cmd_union)

    p = sub.add_parser("add", help="formal sum of two multitangles")
    p.add_argument("m")
    p.add_argument("n")
    _out(p)
    p.set_defaults(func=cmd_add)

    p = sub.add_parser("mtcompose", help="bilinear composite N after M of two multitangles")
    p.add_argument("n", help="outer multitangle")
    p.add_argument("m", help="inner multitangle")
    _out(p)
    p.set_defaults(func=cmd_mtcompose)

    p = sub.add_parser("transport", help="parallel transport along a path")
    p.add_argument("--conn", required=True, help="connection JSON")
    p.add_argument("--path", required=True, help="path JSON")
    _steps(p)
    _out(p)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("eval", help="evaluate a transport graph or multitangle to a matrix")
    p.add_argument("--graph", required=True, help="transport graph or multitangle JSON")
    p.add_argument("--conn", help="connection JSON (optional for multitangles that carry their own)")
    p.add_argument("--algebra", required=True, help="algebra JSON")
    p.add_argument("--family", help="gauge family JSON; prints the sampled family instead")
    p.add_argument("--samples", type=int, default=5, help="number of family samples (default 5)")
    _steps(p)
    _out(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("circuit", help="quantum circuits")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func, text in (("run", cmd_circuit_run, "print the output amplitudes"),
                             ("lower", cmd_circuit_lower, "print the multitangle that is evaluated")):
        q = csub.add_parser(name, help=text)
        q.add_argument("circuit_file", nargs="?", help="circuit JSON")
        q.add_argument("--circuit", help="circuit JSON (alternative to the positional argument)")
        q.add_argument("--input", help="input bit string, wire 0 first (default all zeros)")
        if name == "run":
            q.add_argument("--glued", action="store_true",
                           help="evaluate the fully glued multitangle instead of layer by layer")
            _steps(q)
        _out(q)
        q.set_defaults(func=func)

    p = sub.add_parser("render", help="DOT rendering of a graph, one column per level")
    p.add_argument("graph", help="graph or reduced-graph JSON")
    _out(p)
    p.set_defaults(func=cmd_render)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "steps", None) is not None and args.steps < 1:
            raise SchemaError("--steps must be positive")
        args.func(args)
    except SchemaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except TransportcError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())
