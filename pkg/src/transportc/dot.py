"""Graphviz DOT text for expression graphs, one column per level."""
from __future__ import annotations

import json

from .graph_model import BLUE, ExpressionGraph, is_identity_edge, level_order
from .reduction import ReducedGraph

FILL = {BLUE: "#8fb8ff", "green": "#8fd98f"}


def _q(s: str) -> str:
    # json string escaping is valid DOT quoting
    return json.dumps(s, ensure_ascii=False)


def render_dot(g: ExpressionGraph | ReducedGraph, name: str = "G") -> str:
    inserted = set()
    if isinstance(g, ReducedGraph):
        inserted = {e for e, o in g.edge_origin.items() if o is None}
        g = g.graph
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;",
             "  node [shape=circle, style=filled];"]
    if g.vertices:
        levels = level_order(g).levels
        for k, level in enumerate(levels, 1):
            lines.append(f"  subgraph level{k} {{")
            lines.append("    rank=same;")
            for vid in level:
                lines.append(f"    {_q(vid)} [label={_q(g.label(vid))}, fillcolor={_q(FILL[g.color(vid)])}];")
            lines.append("  }")
        for e in g.edges:
            dashed = e in inserted or is_identity_edge(g, e)
            style = " [style=dashed]" if dashed else ""
            lines.append(f"  {_q(e[0])} -> {_q(e[1])}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
