"""Query evaluation: simultaneous BFS over graph and automaton as sparse
Boolean matrix operations.

Two iteration schemes are provided. The masked scheme keeps a frontier
matrix M (states x vertices) disjoint from the visited matrix P and stops
when the frontier empties; the mask-free scheme folds everything into P and
stops at the fixpoint. The hybrid starts mask-free and switches to the
masked scheme once P passes a nonzero-count threshold, which favours cheap
simple queries without giving up on answer-heavy ones. A plan evaluator
computes the same result bottom-up from the regex AST as matrix expressions,
restricted to a row vector when an endpoint is bound.
"""

import dataclasses
import time
from dataclasses import dataclass

from .graph_store import LabeledGraph
from .query_compiler import (
    Alt,
    Concat,
    Label,
    Opt,
    Plus,
    RegexAst,
    Star,
    TwoNfa,
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

ALGORITHMS = ("masked", "no_mask", "hybrid", "plan")


class QueryTimeout(RuntimeError):
    """Evaluation exceeded the wall-clock budget."""

    def __init__(self, elapsed: float, iterations: int):
        super().__init__(f"query timed out after {elapsed:.3f}s ({iterations} iterations)")
        self.elapsed = elapsed
        self.iterations = iterations


@dataclass
class EngineOptions:
    algorithm: str = "hybrid"
    switch_threshold: float = 100  # nnz(P) above which hybrid goes masked
    product_order: str = "left"  # "left": (N^T x M) x G; "right": N^T x (M x G)
    timeout: float = 60.0  # seconds, wall clock
    debug_checks: bool = False  # assert frontier/visited invariants per step

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.product_order not in ("left", "right"):
            raise ValueError(f"unknown product order {self.product_order!r}")
        if self.switch_threshold < 0:
            raise ValueError("switch threshold must be >= 0")


@dataclass
class EvalResult:
    reachable: set[int]
    iterations: int
    elapsed: float
    algorithm: str


class _Clock:
    def __init__(self, timeout: float):
        self.t0 = time.monotonic()
        self.deadline = self.t0 + timeout

    def elapsed(self) -> float:
        return time.monotonic() - self.t0

    def check(self, iterations: int) -> None:
        if time.monotonic() > self.deadline:
            raise QueryTimeout(self.elapsed(), iterations)


def _label_pairs(g: LabeledGraph, n: TwoNfa) -> list[tuple[SparseBoolMatrix, SparseBoolMatrix]]:
    """(transposed transition matrix, graph adjacency) per usable symbol.

    Symbols whose label the graph never interned are skipped outright: their
    adjacency is all-zero so they contribute nothing to the step sum.
    """
    pairs = []
    for idx, inverted in sorted(n.alphabet):
        if not g.has_label_index(idx):
            continue
        pairs.append((transpose(n.transitions[(idx, inverted)]), g.adjacency(idx, inverted)))
    return pairs


def _seed(n: TwoNfa, num_vertices: int, vertex: int) -> SparseBoolMatrix:
    return SparseBoolMatrix.from_pairs(
        n.nstates, num_vertices, [(q, vertex) for q in sorted(n.start_set)]
    )


def _project_finals(n: TwoNfa, p: SparseBoolMatrix) -> set[int]:
    """Answer vertices: columns of F x P (rows of P at final states)."""
    return set(bool_matmul(n.finals, p).indices.tolist())


def _step_sum(pairs, m: SparseBoolMatrix, product_order: str) -> SparseBoolMatrix:
    acc = zero(m.nrows, m.ncols)
    for nt, ga in pairs:
        if product_order == "left":
            acc = or_sum(acc, bool_matmul(bool_matmul(nt, m), ga))
        else:
            acc = or_sum(acc, bool_matmul(nt, bool_matmul(m, ga)))
    return acc


def step_update(
    m: SparseBoolMatrix,
    p: SparseBoolMatrix,
    g: LabeledGraph,
    n: TwoNfa,
    opts: EngineOptions,
) -> SparseBoolMatrix:
    """One traversal step: sum the per-symbol products of the frontier and
    drop everything already visited."""
    if m.shape != p.shape:
        raise ValueError(f"step_update: frontier {m.shape} vs visited {p.shape}")
    return mask_complement(_step_sum(_label_pairs(g, n), m, opts.product_order), p)


def _check_vertex(g: LabeledGraph, vertex: int) -> None:
    if not 0 <= vertex < g.num_vertices:
        raise IndexError(f"vertex index {vertex} out of range")


def eval_ssr_masked(g: LabeledGraph, n: TwoNfa, source: int, opts: EngineOptions) -> EvalResult:
    """Frontier/visited iteration; terminates when the frontier empties."""
    opts.validate()
    _check_vertex(g, source)
    clock = _Clock(opts.timeout)
    pairs = _label_pairs(g, n)
    bound = n.nstates * g.num_vertices

    m = _seed(n, g.num_vertices, source)
    p = m
    iterations = 0
    while m.nnz:
        clock.check(iterations)
        m = mask_complement(_step_sum(pairs, m, opts.product_order), p)
        iterations += 1
        if opts.debug_checks:
            assert mask(m, p).nnz == 0, "frontier overlaps visited"
            assert iterations <= bound, "exceeded |Q|*|V| iterations"
        before = p.nnz
        p = or_sum(p, m)
        if opts.debug_checks:
            # visited grows by exactly the (disjoint) frontier
            assert p.nnz == before + m.nnz, "visited set shrank or overlapped"
    if opts.debug_checks:
        assert m.nnz == 0, "masked loop exited with a non-empty frontier"
    return EvalResult(_project_finals(n, p), iterations, clock.elapsed(), "masked")


def eval_ssr_no_mask(g: LabeledGraph, n: TwoNfa, source: int, opts: EngineOptions) -> EvalResult:
    """Single-accumulator iteration; terminates at the fixpoint of P."""
    opts.validate()
    _check_vertex(g, source)
    clock = _Clock(opts.timeout)
    pairs = _label_pairs(g, n)
    bound = n.nstates * g.num_vertices

    p = _seed(n, g.num_vertices, source)
    iterations = 0
    while True:
        clock.check(iterations)
        new = or_sum(p, _step_sum(pairs, p, opts.product_order))
        iterations += 1
        if opts.debug_checks:
            assert iterations <= bound, "exceeded |Q|*|V| iterations"
            assert mask(p, new).nnz == p.nnz, "accumulator lost positions"
        if new.nnz == p.nnz:  # monotone, so equal counts mean equal matrices
            break
        p = new
    return EvalResult(_project_finals(n, p), iterations, clock.elapsed(), "no_mask")


def eval_ssr_hybrid(g: LabeledGraph, n: TwoNfa, source: int, opts: EngineOptions) -> EvalResult:
    """Mask-free until nnz(P) exceeds the switch threshold, masked after."""
    opts.validate()
    _check_vertex(g, source)
    clock = _Clock(opts.timeout)
    pairs = _label_pairs(g, n)
    bound = n.nstates * g.num_vertices

    p = _seed(n, g.num_vertices, source)
    prev = zero(p.nrows, p.ncols)
    m = None  # frontier, once switched
    iterations = 0
    while True:
        clock.check(iterations)
        if m is None and p.nnz > opts.switch_threshold:
            m = mask_complement(p, prev)  # fresh part of P is the frontier
        if m is None:
            new = or_sum(p, _step_sum(pairs, p, opts.product_order))
            iterations += 1
            if new.nnz == p.nnz:
                break
            prev, p = p, new
        else:
            m = mask_complement(_step_sum(pairs, m, opts.product_order), p)
            iterations += 1
            if opts.debug_checks:
                assert mask(m, p).nnz == 0, "frontier overlaps visited"
            if m.nnz == 0:
                break
            before = p.nnz
            p = or_sum(p, m)
            if opts.debug_checks:
                assert p.nnz == before + m.nnz, "visited set shrank or overlapped"
        if opts.debug_checks:
            assert iterations <= bound, "exceeded |Q|*|V| iterations"
    return EvalResult(_project_finals(n, p), iterations, clock.elapsed(), "hybrid")


_SSR_EVALUATORS = {
    "masked": eval_ssr_masked,
    "no_mask": eval_ssr_no_mask,
    "hybrid": eval_ssr_hybrid,
}


def eval_ssr(g: LabeledGraph, n: TwoNfa, source: int, opts: EngineOptions) -> EvalResult:
    """Dispatch on ``opts.algorithm`` (one of masked, no_mask, hybrid)."""
    opts.validate()
    try:
        evaluator = _SSR_EVALUATORS[opts.algorithm]
    except KeyError:
        raise ValueError(
            f"algorithm {opts.algorithm!r} does not evaluate compiled automata"
        ) from None
    return evaluator(g, n, source, opts)


def eval_sdr(
    g: LabeledGraph,
    n: TwoNfa,
    target: int,
    opts: EngineOptions,
    algorithm: str | None = None,
) -> EvalResult:
    """Single-destination reachability: run SSR from the target over the
    reversed automaton."""
    _check_vertex(g, target)
    if algorithm is not None:
        opts = dataclasses.replace(opts, algorithm=algorithm)
    return eval_ssr(g, reverse(n), target, opts)


# ---------------------------------------------------------------------------
# Plan evaluation (regex AST as matrix expressions)
# ---------------------------------------------------------------------------


class _PlanState:
    def __init__(self, g: LabeledGraph, clock: _Clock):
        self.g = g
        self.clock = clock
        self.iterations = 0  # closure rounds, all fixpoint loops combined

    def tick(self):
        self.iterations += 1
        self.clock.check(self.iterations)


def _plan_adjacency(state: _PlanState, node: Label) -> SparseBoolMatrix:
    g = state.g
    if node.name not in g.label_ids:
        return zero(g.num_vertices, g.num_vertices)
    return g.adjacency(g.label_ids[node.name], node.inverted)


def _transitive_closure(state: _PlanState, a: SparseBoolMatrix) -> SparseBoolMatrix:
    """A+ as repeated squaring-style accumulation until fixpoint."""
    c = a
    while True:
        state.tick()
        new = or_sum(c, bool_matmul(c, c))
        if new.nnz == c.nnz:
            return c
        c = new


def _plan_matrix(state: _PlanState, node: RegexAst) -> SparseBoolMatrix:
    """Full |V| x |V| matrix of an AST node (no endpoint restriction)."""
    if isinstance(node, Label):
        return _plan_adjacency(state, node)
    if isinstance(node, Concat):
        acc = _plan_matrix(state, node.children[0])
        for child in node.children[1:]:
            acc = bool_matmul(acc, _plan_matrix(state, child))
        return acc
    if isinstance(node, Alt):
        acc = _plan_matrix(state, node.children[0])
        for child in node.children[1:]:
            acc = or_sum(acc, _plan_matrix(state, child))
        return acc
    if isinstance(node, Star):
        closure = _transitive_closure(state, _plan_matrix(state, node.child))
        return or_sum(closure, identity(state.g.num_vertices))
    if isinstance(node, Plus):
        return _transitive_closure(state, _plan_matrix(state, node.child))
    if isinstance(node, Opt):
        return or_sum(_plan_matrix(state, node.child), identity(state.g.num_vertices))
    raise TypeError(f"not a regex node: {node!r}")


def _vec_closure(state: _PlanState, vec: SparseBoolMatrix, child: RegexAst) -> SparseBoolMatrix:
    """vec x child* without materialising the closure matrix itself."""
    acc = vec
    frontier = vec
    while frontier.nnz:
        state.tick()
        frontier = mask_complement(_plan_vector(state, child, frontier), acc)
        acc = or_sum(acc, frontier)
    return acc


def _plan_vector(state: _PlanState, node: RegexAst, vec: SparseBoolMatrix) -> SparseBoolMatrix:
    """Propagate a 1 x |V| row vector through a node on the bound chain."""
    state.clock.check(state.iterations)
    if vec.nnz == 0:
        return vec
    if isinstance(node, Label):
        return bool_matmul(vec, _plan_adjacency(state, node))
    if isinstance(node, Concat):
        for child in node.children:
            vec = _plan_vector(state, child, vec)
        return vec
    if isinstance(node, Alt):
        acc = _plan_vector(state, node.children[0], vec)
        for child in node.children[1:]:
            acc = or_sum(acc, _plan_vector(state, child, vec))
        return acc
    if isinstance(node, Star):
        return _vec_closure(state, vec, node.child)
    if isinstance(node, Plus):
        return _vec_closure(state, _plan_vector(state, node.child, vec), node.child)
    if isinstance(node, Opt):
        return or_sum(vec, _plan_vector(state, node.child, vec))
    raise TypeError(f"not a regex node: {node!r}")


def eval_plan(
    g: LabeledGraph,
    ast: RegexAst,
    endpoint: tuple[str, int],
    opts: EngineOptions,
) -> EvalResult:
    """Evaluate the AST bottom-up as matrix expressions.

    ``endpoint`` is ("source", v) or ("destination", v). The bound endpoint
    restricts evaluation to a row vector walked along the outermost chain, so
    no full reachability closure is materialised there; a destination binding
    is handled by walking the reversed AST, whose label leaves resolve to the
    cached transposed adjacencies.
    """
    opts.validate()
    mode, vertex = endpoint
    if mode == "destination":
        ast = reverse_ast(ast)
    elif mode != "source":
        raise ValueError(f"endpoint mode must be source or destination, got {mode!r}")
    _check_vertex(g, vertex)

    clock = _Clock(opts.timeout)
    state = _PlanState(g, clock)
    start = SparseBoolMatrix.from_pairs(1, g.num_vertices, [(0, vertex)])
    result = _plan_vector(state, ast, start)
    return EvalResult(
        set(result.indices.tolist()), state.iterations, clock.elapsed(), "plan"
    )
