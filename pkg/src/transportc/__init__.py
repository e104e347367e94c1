"""Expression graphs, their cobordism expressions, and evaluation by parallel transport."""
from .calculus import (
    AlgebraSpec,
    EvalResult,
    diagonal_algebra,
    eval_2morphism_family,
    eval_edge,
    eval_graph,
    eval_multitangle,
    eval_object,
    matrix_algebra,
)
from .circuits import Circuit, Register, apply_circuit, standard_gates
from .composition import (
    Multitangle,
    TransportGraph,
    add,
    compose_multitangles,
    disjoint_union,
    glue,
    glue_at,
)
from .dot import render_dot
from .errors import SchemaError, TransportcError
from .expression import (
    canonical_form,
    exprs_equivalent,
    extract_expr,
    substitute,
    to_notation,
)
from .graph_model import (
    BLUE,
    GREEN,
    ExpressionGraph,
    Vertex,
    in_edge_order,
    level_order,
    sources,
    targets,
    validate,
)
from .reduction import ReducedGraph, is_reduced, reduce
from .transport import (
    ConstantConnection,
    GluedConnection,
    PathSpec,
    PureGaugeConnection,
    SampledConnection,
    affine_combine,
    gauge_act,
    glue_connections,
    synthesize_gate,
    transport,
)

__version__ = "0.1.0"
