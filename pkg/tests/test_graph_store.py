"""Graph loading, interning, and adjacency decomposition."""

import io
import random

import pytest

from rpq.graph_store import GraphFormatError, LabeledGraph, load_graph
from rpq.sparse_bool import transpose

SAMPLE = "3\ta\t4\n4\ta\t3\n3\tb\t5\n"


def load_text(text):
    return load_graph(io.StringIO(text))


def test_load_sample_counts():
    g = load_text(SAMPLE)
    assert g.num_vertices == 3
    assert set(g.labels) == {"a", "b"}
    assert g.forward[g.label_index("a")].nnz == 2
    assert g.forward[g.label_index("b")].nnz == 1


def test_load_deduplicates():
    g1 = load_text(SAMPLE)
    g2 = load_text(SAMPLE + SAMPLE)
    assert g1.num_edges == g2.num_edges == 3
    assert g1.to_edge_list() == g2.to_edge_list()


def test_load_empty():
    g = load_text("")
    assert g.num_vertices == 0
    assert g.num_labels == 0
    assert g.num_edges == 0


def test_load_comments_and_blank_lines():
    g = load_text("# header\n\n3\ta\t4\n")
    assert g.num_edges == 1


def test_load_missing_trailing_newline():
    g = load_text("3\ta\t4")
    assert g.num_edges == 1


def test_load_from_byte_stream():
    g = load_graph(io.BytesIO(SAMPLE.encode("utf-8")))
    assert g.num_edges == 3
    assert g.vertices == ["3", "4", "5"]


def test_malformed_line_reports_line_number():
    with pytest.raises(GraphFormatError) as exc:
        load_text("3\ta\t4\n4\ta\n")
    assert exc.value.line_no == 2
    with pytest.raises(GraphFormatError):
        load_text("3\t\t4\n")


def test_identifiers_may_contain_spaces():
    g = load_text("node one\thas part\tnode two\n")
    assert g.num_vertices == 2
    assert g.vertex_index("node one") == 0
    assert g.labels == ["has part"]


def test_first_appearance_order():
    g = load_text(SAMPLE)
    assert g.vertices == ["3", "4", "5"]
    assert g.labels == ["a", "b"]


def test_adjacency_positions():
    g = load_text(SAMPLE)
    a = g.adjacency(g.label_index("a"))
    i3, i4 = g.vertex_index("3"), g.vertex_index("4")
    assert set(a.pairs()) == {(i3, i4), (i4, i3)}


def test_adjacency_inverted_is_transpose():
    g = load_text(SAMPLE)
    for li in range(g.num_labels):
        assert g.adjacency(li, inverted=True) == transpose(g.adjacency(li))


def test_adjacency_unknown_label_errors():
    g = load_text(SAMPLE)
    with pytest.raises(ValueError):
        g.adjacency(99)
    with pytest.raises(ValueError):
        g.adjacency(-1)


def test_vertex_bijection():
    g = load_text(SAMPLE)
    for name in ("3", "4", "5"):
        assert g.vertex_name(g.vertex_index(name)) == name
    assert sorted(g.vertex_index(v) for v in g.vertices) == [0, 1, 2]
    with pytest.raises(KeyError):
        g.vertex_index("99")
    with pytest.raises(IndexError):
        g.vertex_name(3)


def test_edge_count_matches_distinct_triples():
    rng = random.Random(11)
    triples = {
        (str(rng.randint(0, 9)), rng.choice("ab"), str(rng.randint(0, 9)))
        for _ in range(60)
    }
    lines = [f"{u}\t{l}\t{v}" for u, l, v in triples for _ in range(rng.randint(1, 3))]
    rng.shuffle(lines)
    g = load_text("\n".join(lines) + "\n")
    assert g.num_edges == len(triples)


def test_round_trip_serialisation():
    rng = random.Random(5)
    lines = [
        f"{rng.randint(0, 15)}\t{rng.choice('abc')}\t{rng.randint(0, 15)}"
        for _ in range(80)
    ]
    g = load_text("\n".join(lines) + "\n")
    g2 = load_text(g.to_edge_list())

    assert set(g.vertices) == set(g2.vertices)
    assert set(g.labels) == set(g2.labels)
    # isomorphic: identical matrices once indices are mapped through names
    for label in g.labels:
        original = {
            (g.vertices[u], g.vertices[v])
            for u, v in g.forward[g.label_index(label)].pairs()
        }
        reloaded = {
            (g2.vertices[u], g2.vertices[v])
            for u, v in g2.forward[g2.label_index(label)].pairs()
        }
        assert original == reloaded


def test_backward_never_stale():
    g = load_text(SAMPLE)
    li = g.label_index("b")
    assert g.backward[li] == transpose(g.forward[li])
