"""Shared generators for randomized tests: small graphs, regex ASTs, words."""

import io
import random

from rpq.graph_store import LabeledGraph, load_graph
from rpq.query_compiler import Alt, Concat, Label, Opt, Plus, RegexAst, Star


def load_text(text: str) -> LabeledGraph:
    return load_graph(io.StringIO(text))


def random_graph(rng: random.Random, max_vertices=50, max_labels=4, max_edges=300) -> LabeledGraph:
    nv = rng.randint(1, max_vertices)
    labels = list("abcd")[: rng.randint(1, max_labels)]
    nedges = rng.randint(0, max_edges)
    lines = [
        f"{rng.randrange(nv)}\t{rng.choice(labels)}\t{rng.randrange(nv)}"
        for _ in range(nedges)
    ]
    # mention every vertex so |V| is exactly nv even with few edges
    lines += [f"{v}\t{labels[0]}\t{v}" for v in range(nv) if rng.random() < 0.05]
    lines.append(f"{nv - 1}\t{labels[0]}\t{nv - 1}")
    return load_text("\n".join(lines) + "\n")


def random_ast(rng: random.Random, labels="abcd", max_depth=4, unknown_label=None) -> RegexAst:
    """Random AST using every node kind, inverse labels included."""

    def leaf():
        pool = list(labels)
        if unknown_label and rng.random() < 0.15:
            pool = [unknown_label]
        return Label(rng.choice(pool), inverted=rng.random() < 0.3)

    def build(depth):
        if depth <= 1 or rng.random() < 0.3:
            return leaf()
        kind = rng.choice(("concat", "alt", "star", "plus", "opt", "leaf"))
        if kind == "leaf":
            return leaf()
        if kind in ("concat", "alt"):
            children = tuple(build(depth - 1) for _ in range(rng.randint(2, 3)))
            return Concat(children) if kind == "concat" else Alt(children)
        child = build(depth - 1)
        return {"star": Star, "plus": Plus, "opt": Opt}[kind](child)

    return build(max_depth)


def random_word(rng: random.Random, symbols, max_len=6):
    return tuple(rng.choice(symbols) for _ in range(rng.randint(0, max_len)))
