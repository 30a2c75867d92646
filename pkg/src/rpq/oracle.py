"""Brute-force references used to verify the matrix-based machinery.

Everything here works on plain Python sets and dicts: the reachability
check walks the product of the automaton and the graph state by state, and
the language utilities enumerate or match words directly on the automaton
or the AST. None of it calls the sparse kernels, which is the point.
Intended for small instances (up to roughly a thousand product states).
"""

import itertools
from collections import deque

from .graph_store import LabeledGraph
from .query_compiler import Alt, Concat, Label, Opt, Plus, RegexAst, Star, Symbol, TwoNfa


def _matrix_pairs(m) -> list[tuple[int, int]]:
    return m.pairs()


def oracle_ssr(g: LabeledGraph, n: TwoNfa, source: int) -> set[int]:
    """Vertices reachable from ``source`` along paths whose label word the
    automaton accepts, by BFS over (state, vertex) pairs."""
    if not 0 <= source < g.num_vertices:
        raise IndexError(f"vertex index {source} out of range")

    # adjacency dicts per symbol, for the automaton and for the graph
    aut_step: dict[tuple[int, bool], dict[int, list[int]]] = {}
    graph_step: dict[tuple[int, bool], dict[int, list[int]]] = {}
    for key, matrix in n.transitions.items():
        idx, inverted = key
        if not g.has_label_index(idx):
            continue
        steps: dict[int, list[int]] = {}
        for q, q2 in _matrix_pairs(matrix):
            steps.setdefault(q, []).append(q2)
        aut_step[key] = steps
        moves: dict[int, list[int]] = {}
        for u, v in _matrix_pairs(g.forward[idx]):
            if inverted:
                moves.setdefault(v, []).append(u)
            else:
                moves.setdefault(u, []).append(v)
        graph_step[key] = moves

    start_pairs = [(q, source) for q in sorted(n.start_set)]
    visited = set(start_pairs)
    queue = deque(start_pairs)
    while queue:
        q, v = queue.popleft()
        for key, steps in aut_step.items():
            for q2 in steps.get(q, ()):
                for v2 in graph_step[key].get(v, ()):
                    if (q2, v2) not in visited:
                        visited.add((q2, v2))
                        queue.append((q2, v2))
    assert len(visited) <= n.nstates * g.num_vertices
    finals = n.final_set
    return {v for q, v in visited if q in finals}


def oracle_words(n: TwoNfa, max_len: int, *, limit: int = 500_000) -> set[tuple[Symbol, ...]]:
    """All words of length <= max_len the automaton accepts, by exhaustive
    enumeration over its alphabet."""
    symbols: list[Symbol] = sorted(
        (n.label_names[idx], inverted) for idx, inverted in n.alphabet
    )
    total = sum(len(symbols) ** k for k in range(max_len + 1))
    if total > limit:
        raise ValueError(
            f"alphabet of {len(symbols)} symbols up to length {max_len} "
            f"needs {total} words, over the {limit} cap"
        )

    step: dict[Symbol, dict[int, set[int]]] = {}
    for (idx, inverted), matrix in n.transitions.items():
        moves: dict[int, set[int]] = {}
        for q, q2 in _matrix_pairs(matrix):
            moves.setdefault(q, set()).add(q2)
        step[(n.label_names[idx], inverted)] = moves

    finals = n.final_set
    accepted: set[tuple[Symbol, ...]] = set()
    # walk the prefix tree, pruning once the state set dies
    frontier: list[tuple[tuple[Symbol, ...], set[int]]] = [((), n.start_set)]
    if n.start_set & finals:
        accepted.add(())
    for _ in range(max_len):
        nxt = []
        for word, states in frontier:
            for symbol in symbols:
                moves = step.get(symbol)
                if moves is None:
                    continue
                reached = set().union(*(moves.get(q, set()) for q in states))
                if not reached:
                    continue
                extended = word + (symbol,)
                if reached & finals:
                    accepted.add(extended)
                nxt.append((extended, reached))
        frontier = nxt
    return accepted


def ast_matches(ast: RegexAst, word) -> bool:
    """Recursive membership check of a word of (label, inverted) symbols
    against the AST itself, independent of any automaton."""
    word = tuple(tuple(s) for s in word)
    memo: dict[tuple[int, int, int], bool] = {}

    def match(node, i, j) -> bool:
        key = (id(node), i, j)
        if key in memo:
            return memo[key]
        if isinstance(node, Label):
            result = j == i + 1 and word[i] == (node.name, node.inverted)
        elif isinstance(node, Concat):
            result = match_seq(node.children, i, j)
        elif isinstance(node, Alt):
            result = any(match(c, i, j) for c in node.children)
        elif isinstance(node, Star):
            result = i == j or any(
                match(node.child, i, k) and match(node, k, j)
                for k in range(i + 1, j + 1)
            )
        elif isinstance(node, Plus):
            if i == j:
                # one repetition of a child that matches the empty span
                result = match(node.child, i, j)
            else:
                result = any(
                    match(node.child, i, k) and (k == j or match(node, k, j))
                    for k in range(i + 1, j + 1)
                )
        elif isinstance(node, Opt):
            result = i == j or match(node.child, i, j)
        else:
            raise TypeError(f"not a regex node: {node!r}")
        memo[key] = result
        return result

    def match_seq(children, i, j) -> bool:
        if len(children) == 1:
            return match(children[0], i, j)
        head, rest = children[0], children[1:]
        return any(
            match(head, i, k) and match_seq(rest, k, j) for k in range(i, j + 1)
        )

    return match(ast, 0, len(word))


def language_sample(ast: RegexAst, rng, max_repeat: int = 3) -> tuple[Symbol, ...]:
    """One random word from the AST's language (for positive test samples)."""
    if isinstance(ast, Label):
        return ((ast.name, ast.inverted),)
    if isinstance(ast, Concat):
        return tuple(itertools.chain.from_iterable(
            language_sample(c, rng, max_repeat) for c in ast.children
        ))
    if isinstance(ast, Alt):
        return language_sample(rng.choice(ast.children), rng, max_repeat)
    if isinstance(ast, Star):
        reps = rng.randint(0, max_repeat)
    elif isinstance(ast, Plus):
        reps = rng.randint(1, max_repeat)
    elif isinstance(ast, Opt):
        reps = rng.randint(0, 1)
    else:
        raise TypeError(f"not a regex node: {ast!r}")
    return tuple(itertools.chain.from_iterable(
        language_sample(ast.child, rng, max_repeat) for _ in range(reps)
    ))
