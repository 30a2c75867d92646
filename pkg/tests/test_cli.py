"""CLI behaviour: output shapes, exit codes, CSV schema, generator."""

import csv
import io

import pytest

from rpq.cli import (
    BENCH_HEADER,
    main,
    parse_workload,
    run_bench,
    WorkloadFormatError,
)
from rpq.engine import EngineOptions
from rpq.graph_store import load_graph

TRIANGLE = "3\ta\t4\n4\ta\t3\n3\tb\t5\n"


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_text(TRIANGLE)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------


def test_query_ssr_count_and_listing(graph_file, capsys):
    code, out, _ = run_cli(capsys, "query", graph_file, "a* b", "--ssr", "3", "--list-vertices")
    assert code == 0
    assert out.splitlines() == ["count=1", "5"]


def test_query_star_count_at_least_one(graph_file, capsys):
    for vertex in ("3", "4", "5"):
        code, out, _ = run_cli(capsys, "query", graph_file, "a*", "--ssr", vertex)
        assert code == 0
        count = int(out.splitlines()[0].split("=")[1])
        assert count >= 1


def test_query_sdr(graph_file, capsys):
    code, out, _ = run_cli(capsys, "query", graph_file, "b", "--sdr", "5", "--list-vertices")
    assert code == 0
    assert out.splitlines() == ["count=1", "3"]


def test_query_each_algorithm(graph_file, capsys):
    for algorithm in ("masked", "no_mask", "hybrid", "plan"):
        code, out, _ = run_cli(
            capsys, "query", graph_file, "a* b", "--ssr", "3", "--algorithm", algorithm
        )
        assert code == 0
        assert out.splitlines()[0] == "count=1"


def test_query_malformed_pattern_exit_2(graph_file, capsys):
    code, _, err = run_cli(capsys, "query", graph_file, "a )b", "--ssr", "3")
    assert code == 2
    assert "column 3" in err


def test_query_unknown_vertex_exit_2(graph_file, capsys):
    code, _, err = run_cli(capsys, "query", graph_file, "a", "--ssr", "99")
    assert code == 2
    assert "99" in err


def test_query_timeout_exit_3(tmp_path, capsys):
    path = tmp_path / "chain.tsv"
    path.write_text("".join(f"{i}\ta\t{i + 1}\n" for i in range(3000)))
    code, _, err = run_cli(
        capsys, "query", str(path), "a*", "--ssr", "0", "--timeout-ms", "0"
    )
    assert code == 3
    assert "timed out" in err


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def make_workload(tmp_path, lines):
    path = tmp_path / "w.tsv"
    path.write_text("".join(line + "\n" for line in lines))
    return str(path)


def test_bench_csv_shape(graph_file, tmp_path, capsys):
    workload = make_workload(
        tmp_path,
        [
            "q1\tssr\t3\ta* b",
            "q2\tsdr\t5\tb",
            "q3\tssr\t4\ta+",
        ],
    )
    code, out, _ = run_cli(capsys, "bench", graph_file, workload)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == BENCH_HEADER
    assert len(rows) == 4
    by_id = {row[0]: row for row in rows[1:]}
    assert by_id["q1"][3] == "1"  # a* b from 3 reaches exactly vertex 5
    assert all(row[6] == "ok" for row in rows[1:])


def test_bench_error_status_keeps_running(graph_file, tmp_path, capsys):
    workload = make_workload(
        tmp_path,
        [
            "bad-vertex\tssr\t42\ta",
            "bad-pattern\tssr\t3\ta )b",
            "good\tssr\t3\tb",
        ],
    )
    code, out, _ = run_cli(capsys, "bench", graph_file, workload)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert [row[6] for row in rows] == ["error", "error", "ok"]


def test_bench_timeout_status(tmp_path, capsys):
    path = tmp_path / "chain.tsv"
    path.write_text("".join(f"{i}\ta\t{i + 1}\n" for i in range(3000)))
    workload = make_workload(tmp_path, ["slow\tssr\t0\ta*"])
    code, out, _ = run_cli(
        capsys, "bench", str(path), workload, "--timeout-ms", "1"
    )
    assert code == 0
    row = list(csv.reader(io.StringIO(out)))[1]
    assert row[6] == "timeout"
    assert float(row[5]) == 1.0  # reported as the full budget


def test_bench_repeat_and_parallel(graph_file, tmp_path, capsys):
    workload = make_workload(
        tmp_path, [f"q{i}\tssr\t3\ta* b" for i in range(4)]
    )
    code, out, _ = run_cli(
        capsys, "bench", graph_file, workload, "--repeat", "3", "--parallel", "2"
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert [row[0] for row in rows] == ["q0", "q1", "q2", "q3"]  # input order kept
    assert all(row[3] == "1" for row in rows)


def test_workload_parse_errors():
    with pytest.raises(WorkloadFormatError):
        parse_workload(io.StringIO("only\tthree\tfields\n"))
    with pytest.raises(WorkloadFormatError):
        parse_workload(io.StringIO("q\tboth\t3\ta\n"))
    with pytest.raises(WorkloadFormatError):
        parse_workload(io.StringIO("q\tssr\t3\ta\nq\tssr\t3\tb\n"))


def test_run_bench_matches_engine_api(graph_file):
    g = load_graph(graph_file)
    entries = parse_workload(io.StringIO("q\tssr\t3\ta* b\n"))
    rows = run_bench(g, entries, EngineOptions(), repeat=1)
    assert rows[0]["result_count"] == 1
    assert rows[0]["status"] == "ok"


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def test_gen_counts_and_determinism(capsys):
    code, out1, _ = run_cli(capsys, "gen", "100", "a:50", "--seed", "7")
    assert code == 0
    lines = out1.strip().splitlines()
    assert len(lines) == 50
    assert all(line.split("\t")[1] == "a" for line in lines)
    code, out2, _ = run_cli(capsys, "gen", "100", "a:50", "--seed", "7")
    assert out1 == out2
    code, out3, _ = run_cli(capsys, "gen", "100", "a:50", "--seed", "8")
    assert out1 != out3


def test_gen_skewed_counts_load(capsys):
    code, out, _ = run_cli(capsys, "gen", "200", "a:1000", "b:10", "c:1", "--seed", "1")
    assert code == 0
    g = load_graph(io.StringIO(out))
    na = g.forward[g.label_index("a")].nnz
    nb = g.forward[g.label_index("b")].nnz
    nc = g.forward[g.label_index("c")].nnz
    assert nc == 1 and nb <= 10 and na <= 1000
    assert na > nb > nc  # skew survives dedup


def test_gen_invalid_parameters(capsys):
    assert run_cli(capsys, "gen", "0", "a:5")[0] == 2
    assert run_cli(capsys, "gen", "10", "a:-1")[0] == 2
    assert run_cli(capsys, "gen", "10", "nocount")[0] == 2


# ---------------------------------------------------------------------------
# compile
# ---------------------------------------------------------------------------


def test_compile_prints_transition_list(graph_file, capsys):
    code, out, _ = run_cli(capsys, "compile", graph_file, "a* b")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "states: 2"
    assert lines[1] == "start: 0"
    assert lines[2] == "final: 1"
    assert "0\ta\t0" in lines and "0\tb\t1" in lines


def test_compile_inverse_label_rendering(graph_file, capsys):
    code, out, _ = run_cli(capsys, "compile", graph_file, "^b")
    assert code == 0
    assert "0\t^b\t1" in out.splitlines()
