"""Edge-labelled graph storage.

Loads tab-separated edge lists, interns vertex and label identifiers into
dense indices, and keeps one Boolean adjacency matrix per label together
with its precomputed transpose (both traversal directions are needed at
every evaluation step, so recomputing transposes per query would be waste).
"""

import io
import os
from typing import IO, Union

import numpy as np

from .sparse_bool import SparseBoolMatrix, transpose

GraphSource = Union[str, os.PathLike, IO]


class GraphFormatError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class LabeledGraph:
    """Immutable edge-labelled graph as per-label Boolean adjacency matrices.

    Vertex and label names are interned to dense indices in first-appearance
    order; ``forward[a]`` holds the label-a edges and ``backward[a]`` its
    transpose (the adjacency of the inverse label).
    """

    def __init__(self, vertices: list[str], labels: list[str], forward: list[SparseBoolMatrix]):
        n = len(vertices)
        if len(forward) != len(labels):
            raise ValueError("one adjacency matrix per label required")
        for m in forward:
            if m.shape != (n, n):
                raise ValueError(f"adjacency must be {n}x{n}, got {m.shape}")
        self.vertices = list(vertices)
        self.labels = list(labels)
        self.vertex_ids = {name: i for i, name in enumerate(self.vertices)}
        self.label_ids = {name: i for i, name in enumerate(self.labels)}
        if len(self.vertex_ids) != n:
            raise ValueError("duplicate vertex names")
        if len(self.label_ids) != len(self.labels):
            raise ValueError("duplicate label names")
        self.forward = list(forward)
        self.backward = [transpose(m) for m in forward]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        """Distinct (source, label, destination) triples."""
        return sum(m.nnz for m in self.forward)

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertex_ids[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def vertex_name(self, index: int) -> str:
        if not 0 <= index < len(self.vertices):
            raise IndexError(f"vertex index {index} out of range")
        return self.vertices[index]

    def label_index(self, name: str) -> int:
        try:
            return self.label_ids[name]
        except KeyError:
            raise KeyError(f"unknown label {name!r}") from None

    def has_label_index(self, index: int) -> bool:
        return 0 <= index < len(self.labels)

    def adjacency(self, label: int, inverted: bool = False) -> SparseBoolMatrix:
        """Adjacency matrix of a label; the transpose when inverted."""
        if not self.has_label_index(label):
            raise ValueError(f"unknown label index {label}")
        return self.backward[label] if inverted else self.forward[label]

    def to_edge_list(self) -> str:
        """Serialise back to the edge-list format (label-major order)."""
        lines = []
        for li, label in enumerate(self.labels):
            for u, v in self.forward[li].pairs():
                lines.append(f"{self.vertices[u]}\t{label}\t{self.vertices[v]}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return (
            f"LabeledGraph(|V|={self.num_vertices}, |L|={self.num_labels}, "
            f"edges={self.num_edges})"
        )


def _iter_lines(source: GraphSource):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif isinstance(source, io.TextIOBase):
        yield from source
    else:
        for raw in source:
            yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def load_graph(source: GraphSource) -> LabeledGraph:
    """Load an edge-labelled graph from a path or an open stream.

    Format: one ``source<TAB>label<TAB>destination`` edge per line, UTF-8;
    identifiers are arbitrary non-empty strings without tabs or newlines;
    lines starting with ``#`` (and blank lines) are ignored. Duplicate edges
    collapse. Vertex and label indices follow first appearance.
    """
    vertex_ids: dict[str, int] = {}
    label_ids: dict[str, int] = {}
    vertices: list[str] = []
    labels: list[str] = []
    srcs: list[int] = []
    labs: list[int] = []
    dsts: list[int] = []

    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(line_no, f"expected 3 tab-separated fields, got {len(parts)}")
        u, label, v = parts
        if not u or not label or not v:
            raise GraphFormatError(line_no, "empty identifier")
        for name in (u, v):
            if name not in vertex_ids:
                vertex_ids[name] = len(vertices)
                vertices.append(name)
        if label not in label_ids:
            label_ids[label] = len(labels)
            labels.append(label)
        srcs.append(vertex_ids[u])
        labs.append(label_ids[label])
        dsts.append(vertex_ids[v])

    n = len(vertices)
    nl = len(labels)
    if nl and n * n * nl > 2**62:
        raise ValueError("graph too large for 64-bit edge keys")

    forward = []
    if srcs:
        # Dedup all triples at once: label-major keys sort edges by label,
        # so each label's slice is already in canonical row-major order.
        keys = np.unique(
            np.asarray(labs, dtype=np.int64) * (n * n)
            + np.asarray(srcs, dtype=np.int64) * n
            + np.asarray(dsts, dtype=np.int64)
        )
        edge_labels = keys // (n * n)
        rows = (keys % (n * n)) // n
        cols = keys % n
        bounds = np.searchsorted(edge_labels, np.arange(nl + 1))
        for li in range(nl):
            lo, hi = bounds[li], bounds[li + 1]
            forward.append(SparseBoolMatrix.from_coo(n, n, rows[lo:hi], cols[lo:hi]))
    return LabeledGraph(vertices, labels, forward)
