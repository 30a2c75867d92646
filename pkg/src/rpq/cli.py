"""Command-line front end: run queries, benchmark workloads, generate graphs.

Exit codes: 0 success, 2 usage/input errors (unknown vertex, parse error,
malformed files), 3 query timeout.
"""

import argparse
import csv
import random
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .engine import (
    ALGORITHMS,
    EngineOptions,
    EvalResult,
    QueryTimeout,
    eval_plan,
    eval_sdr,
    eval_ssr,
)
from .graph_store import GraphFormatError, LabeledGraph, load_graph
from .query_compiler import QueryParseError, compile, parse_query, reverse
from .sparse_bool import kernel_thread_cap

BENCH_HEADER = ["id", "mode", "algorithm", "result_count", "iterations", "time_ms", "status"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


@dataclass
class WorkloadEntry:
    id: str
    mode: str  # "ssr" | "sdr"
    endpoint: str  # external vertex id
    pattern: str


class WorkloadFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_workload(stream) -> list[WorkloadEntry]:
    """TSV workload: ``id<TAB>mode<TAB>endpoint<TAB>pattern`` per line,
    ``#`` comments allowed, ids unique."""
    entries = []
    seen = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise WorkloadFormatError(line_no, f"expected 4 tab-separated fields, got {len(parts)}")
        entry = WorkloadEntry(*parts)
        if entry.mode not in ("ssr", "sdr"):
            raise WorkloadFormatError(line_no, f"mode must be ssr or sdr, got {entry.mode!r}")
        if entry.id in seen:
            raise WorkloadFormatError(line_no, f"duplicate id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    return entries


def _evaluate(g: LabeledGraph, mode: str, pattern: str, vertex: int, opts: EngineOptions) -> EvalResult:
    """One evaluation with precompiled inputs handled by the caller's timer."""
    if opts.algorithm == "plan":
        endpoint = ("source" if mode == "ssr" else "destination", vertex)
        return eval_plan(g, parse_query(pattern), endpoint, opts)
    n = compile(parse_query(pattern), g.label_ids)
    if mode == "ssr":
        return eval_ssr(g, n, vertex, opts)
    return eval_sdr(g, n, vertex, opts)


def run_entry(g: LabeledGraph, entry: WorkloadEntry, opts: EngineOptions, repeat: int) -> dict:
    """Run one workload entry; timing covers evaluation only (parsing and
    automaton compilation happen outside the timer), first run discarded as
    warm-up when repeat >= 2."""
    row = {
        "id": entry.id,
        "mode": entry.mode,
        "algorithm": opts.algorithm,
        "result_count": 0,
        "iterations": 0,
        "time_ms": 0.0,
        "status": "ok",
    }
    try:
        vertex = g.vertex_index(entry.endpoint)
        ast = parse_query(entry.pattern)
        if opts.algorithm == "plan":
            endpoint = ("source" if entry.mode == "ssr" else "destination", vertex)
            run = lambda: eval_plan(g, ast, endpoint, opts)
        else:
            # compilation (reversal included for sdr) stays outside the timer
            n = compile(ast, g.label_ids)
            if entry.mode == "sdr":
                n = reverse(n)
            run = lambda: eval_ssr(g, n, vertex, opts)

        times = []
        result = None
        for _ in range(max(1, repeat)):
            t0 = time.perf_counter()
            result = run()
            times.append((time.perf_counter() - t0) * 1000.0)
        if len(times) >= 2:
            times = times[1:]
        row["result_count"] = len(result.reachable)
        row["iterations"] = result.iterations
        row["time_ms"] = statistics.median(times)
    except QueryTimeout:
        row["status"] = "timeout"
        row["time_ms"] = opts.timeout * 1000.0
    except (KeyError, ValueError, IndexError):
        row["status"] = "error"
    return row


def run_bench(
    g: LabeledGraph,
    entries: list[WorkloadEntry],
    opts: EngineOptions,
    repeat: int = 1,
    workers: int = 1,
) -> list[dict]:
    """All workload entries, sequential by default; rows keep input order."""
    if workers <= 1:
        return [run_entry(g, entry, opts, repeat) for entry in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda e: run_entry(g, e, opts, repeat), entries))


def write_csv(rows: list[dict], out) -> None:
    writer = csv.writer(out)
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow(
            [
                row["id"],
                row["mode"],
                row["algorithm"],
                row["result_count"],
                row["iterations"],
                f"{row['time_ms']:.3f}",
                row["status"],
            ]
        )


def generate_edges(num_vertices: int, label_counts: list[tuple[str, int]], seed: int, out) -> None:
    """Uniform random edges per label, deterministic for a fixed seed."""
    rng = random.Random(seed)
    for label, count in label_counts:
        for _ in range(count):
            u = rng.randrange(num_vertices)
            v = rng.randrange(num_vertices)
            out.write(f"{u}\t{label}\t{v}\n")


def format_automaton(n) -> str:
    """Transition list of a compiled automaton, for inspection."""
    lines = [
        f"states: {n.nstates}",
        f"start: {' '.join(str(q) for q in sorted(n.start_set))}",
        f"final: {' '.join(str(q) for q in sorted(n.final_set))}",
    ]
    for idx, inverted in sorted(n.alphabet):
        name = n.label_names[idx]
        symbol = f"^{name}" if inverted else name
        for src, dst in n.transitions[(idx, inverted)].pairs():
            lines.append(f"{src}\t{symbol}\t{dst}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algorithm", choices=ALGORITHMS, default="hybrid")
    parser.add_argument(
        "--threshold", type=int, default=100, metavar="NNZ",
        help="hybrid switch threshold on visited nonzeros (default 100)",
    )
    parser.add_argument("--product-order", choices=("left", "right"), default="left")
    parser.add_argument(
        "--timeout-ms", type=float, default=60_000.0, metavar="MS",
        help="per-query wall-clock budget (default 60000)",
    )


def _engine_options(args) -> EngineOptions:
    return EngineOptions(
        algorithm=args.algorithm,
        switch_threshold=args.threshold,
        product_order=args.product_order,
        timeout=args.timeout_ms / 1000.0,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpq",
        description="Two-way regular path queries over edge-labelled graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("query", help="evaluate one query against a graph")
    q.add_argument("graph", help="edge-list file (source<TAB>label<TAB>destination)")
    q.add_argument("pattern", help="query pattern, e.g. 'a* b' or '^b c+'")
    endpoint = q.add_mutually_exclusive_group(required=True)
    endpoint.add_argument("--ssr", metavar="VERTEX", help="single-source: fix the start vertex")
    endpoint.add_argument("--sdr", metavar="VERTEX", help="single-destination: fix the end vertex")
    q.add_argument("--list-vertices", action="store_true", help="print the reachable vertex ids")
    _add_engine_flags(q)

    b = sub.add_parser("bench", help="run a workload file, print CSV timings")
    b.add_argument("graph")
    b.add_argument("workload", help="TSV: id<TAB>ssr|sdr<TAB>vertex<TAB>pattern")
    b.add_argument("--repeat", type=int, default=1, help="runs per entry; first is warm-up when >= 2")
    b.add_argument("--parallel", type=int, default=1, metavar="N", help="run entries over N threads")
    _add_engine_flags(b)

    g = sub.add_parser("gen", help="emit a random edge list on stdout")
    g.add_argument("vertices", type=int)
    g.add_argument("labels", nargs="+", metavar="LABEL:COUNT", help="edges to draw per label")
    g.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("compile", help="print the minimized query automaton")
    c.add_argument("graph")
    c.add_argument("pattern")

    return parser


def cmd_query(args) -> int:
    opts = _engine_options(args)
    try:
        g = load_graph(args.graph)
    except (OSError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    mode = "ssr" if args.ssr is not None else "sdr"
    endpoint_id = args.ssr if args.ssr is not None else args.sdr
    try:
        vertex = g.vertex_index(endpoint_id)
        result = _evaluate(g, mode, args.pattern, vertex, opts)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except QueryParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QueryTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    print(f"count={len(result.reachable)}")
    if args.list_vertices:
        for name in sorted(g.vertex_name(v) for v in result.reachable):
            print(name)
    return EXIT_OK


def cmd_bench(args) -> int:
    opts = _engine_options(args)
    try:
        g = load_graph(args.graph)
        with open(args.workload, "r", encoding="utf-8") as fh:
            entries = parse_workload(fh)
    except (OSError, GraphFormatError, WorkloadFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = run_bench(g, entries, opts, repeat=args.repeat, workers=args.parallel)
    write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.vertices < 1:
        print("error: vertex count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    label_counts = []
    for item in args.labels:
        label, sep, count = item.rpartition(":")
        if not sep or not label:
            print(f"error: expected LABEL:COUNT, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        try:
            count = int(count)
        except ValueError:
            print(f"error: bad count in {item!r}", file=sys.stderr)
            return EXIT_USAGE
        if count < 0:
            print(f"error: count must be >= 0 in {item!r}", file=sys.stderr)
            return EXIT_USAGE
        label_counts.append((label, count))
    generate_edges(args.vertices, label_counts, args.seed, sys.stdout)
    return EXIT_OK


def cmd_compile(args) -> int:
    try:
        g = load_graph(args.graph)
        n = compile(parse_query(args.pattern), g.label_ids)
    except (OSError, GraphFormatError, QueryParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(format_automaton(n))
    return EXIT_OK


def main(argv=None) -> int:
    kernel_thread_cap()  # fail fast on a malformed RPQ_THREADS
    args = build_parser().parse_args(argv)
    handler = {
        "query": cmd_query,
        "bench": cmd_bench,
        "gen": cmd_gen,
        "compile": cmd_compile,
    }[args.command]
    return handler(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
