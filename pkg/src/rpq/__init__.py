"""Two-way regular path queries over edge-labelled graphs, evaluated as
simultaneous BFS over the graph and a query automaton in sparse Boolean
linear algebra."""

from .engine import (
    EngineOptions,
    EvalResult,
    QueryTimeout,
    eval_plan,
    eval_sdr,
    eval_ssr,
    eval_ssr_hybrid,
    eval_ssr_masked,
    eval_ssr_no_mask,
    step_update,
)
from .graph_store import GraphFormatError, LabeledGraph, load_graph
from .oracle import ast_matches, oracle_ssr, oracle_words
from .query_compiler import (
    QueryParseError,
    TwoNfa,
    accepts,
    compile,
    parse_query,
    reverse,
    reverse_ast,
)
from .sparse_bool import (
    SparseBoolMatrix,
    bool_matmul,
    identity,
    mask,
    mask_complement,
    or_sum,
    transpose,
    zero,
)

__all__ = [
    "EngineOptions",
    "EvalResult",
    "GraphFormatError",
    "LabeledGraph",
    "QueryParseError",
    "QueryTimeout",
    "SparseBoolMatrix",
    "TwoNfa",
    "accepts",
    "ast_matches",
    "bool_matmul",
    "compile",
    "eval_plan",
    "eval_sdr",
    "eval_ssr",
    "eval_ssr_hybrid",
    "eval_ssr_masked",
    "eval_ssr_no_mask",
    "identity",
    "load_graph",
    "mask",
    "mask_complement",
    "oracle_ssr",
    "oracle_words",
    "or_sum",
    "parse_query",
    "reverse",
    "reverse_ast",
    "step_update",
    "transpose",
    "zero",
]
