"""Command-line front end.

Subcommands::

    branchlab gen N M [SEED] [--out PATH]
    branchlab run (--graph PATH | --gen N,M[,SEED]) --algo {cc,bfs}
                  [--variant {based,avoiding,both}] [--root R]
                  [--init-state {snt,wnt,wt,st}] [--format {csv,json}] [--out PATH]
    branchlab verify-lemmas
    branchlab correlate REPORT [REPORT ...] [--variant based] [--format csv|json]

``BRANCHLAB_SEED`` supplies the generator seed when none is given.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import analysis, bfs, cc
from .graph import Graph, GraphFormatError, generate_random, load_edge_list, load_metis, to_csr
from .lemmas import verify_all
from .predictor import PredictorState
from .tracer import IterationStats, TraceRecorder

RUN_FORMAT = "branchlab-run"
RUN_VERSION = 1
CSV_COLUMNS = ("algo", "variant", "index", "wall_time", "ops", "branches", "mispredictions",
               "loads", "stores", "cmovs", "edges_traversed", "time_ratio", "branch_ratio",
               "misprediction_ratio", "store_ratio")
# host-dependent fields, excluded from determinism guarantees
TIMING_FIELDS = frozenset({"wall_time", "time_ratio", "time_ratio_based", "time_ratio_avoiding",
                           "time_based", "time_avoiding", "speedup"})

ALGORITHMS = {
    ("cc", "based"): cc.sv_branch_based,
    ("cc", "avoiding"): cc.sv_branch_avoiding,
    ("bfs", "based"): bfs.bfs_branch_based,
    ("bfs", "avoiding"): bfs.bfs_branch_avoiding,
}


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    algo: str
    variant: str
    graph_path: str | None = None
    gen: tuple[int, int, int] | None = None
    graph_format: str = "metis"
    root: int | None = None
    init_state: str = "wnt"
    format: str = "json"
    out: str | None = None
    repeats: int = 5

    def __post_init__(self):
        if (self.graph_path is None) == (self.gen is None):
            raise CliError("exactly one of --graph and --gen is required")
        if self.algo == "bfs" and self.root is None:
            raise CliError("--algo bfs requires --root")
        if self.repeats < 1:
            raise CliError("--repeats must be >= 1")


def _default_seed() -> int:
    raw = os.environ.get("BRANCHLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"BRANCHLAB_SEED must be an integer, got {raw!r}") from None


def parse_gen_spec(spec: str) -> tuple[int, int, int]:
    try:
        parts = [int(x) for x in spec.split(",")]
    except ValueError:
        raise CliError(f"--gen expects N,M[,SEED], got {spec!r}") from None
    if len(parts) == 2:
        parts.append(_default_seed())
    if len(parts) != 3:
        raise CliError(f"--gen expects N,M[,SEED], got {spec!r}")
    return parts[0], parts[1], parts[2]


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as f:
            f.write(text)


def load_graph(cfg: RunConfig) -> Graph:
    if cfg.gen is not None:
        try:
            return generate_random(*cfg.gen)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    try:
        with open(cfg.graph_path) as f:
            if cfg.graph_format == "metis":
                return load_metis(f)
            text = f.read()
    except OSError as exc:
        raise CliError(f"cannot read {cfg.graph_path}: {exc}") from None
    except GraphFormatError as exc:
        raise CliError(f"{cfg.graph_path}: {exc}") from None
    ids = [int(t) for line in text.splitlines()
           if line.strip() and not line.lstrip().startswith("#")
           for t in line.split() if t.lstrip("-").isdigit()]
    try:
        return to_csr(load_edge_list(text, max(ids, default=-1) + 1), symmetrize=True)
    except GraphFormatError as exc:
        raise CliError(f"{cfg.graph_path}: {exc}") from None


def _digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, dtype="<i8").tobytes()).hexdigest()


def _run_one(cfg: RunConfig, graph: Graph, variant: str) -> tuple[dict, object, list]:
    fn = ALGORITHMS[(cfg.algo, variant)]
    args = (graph,) if cfg.algo == "cc" else (graph, cfg.root)
    rec = TraceRecorder(PredictorState.from_short(cfg.init_state))
    result = fn(*args, recorder=rec)
    snap = rec.report()
    times = analysis.timed_iterations(fn, *args, repeats=cfg.repeats)
    if cfg.algo == "cc":
        stats = analysis.with_wall_times(result.per_iteration, times)
        bounds = analysis.sv_bounds(result, graph, f"sv-{variant}")
        extra = {"iterations": result.iterations,
                 "components": cc.count_components(result.labels),
                 "labels_sha256": _digest(result.labels),
                 "changes_per_iteration": list(result.changes_per_iteration)}
    else:
        stats = analysis.with_wall_times(result.per_level, times)
        bounds = analysis.bfs_bounds(result, f"bfs-{variant}")
        extra = {"levels": result.levels,
                 "reached": result.reached,
                 "edges_traversed": result.edges_traversed,
                 "distances_sha256": _digest(result.distances),
                 "queue_sha256": _digest(result.queue)}
    block = {"algo": cfg.algo, "variant": variant, **extra,
             "counters": snap.to_dict(),
             "bounds": bounds.to_dict(),
             "per_iteration": [asdict(s) for s in stats]}
    return block, result, stats


def execute_run(cfg: RunConfig) -> tuple[dict, bool]:
    """Run the configured algorithm(s); return the report document and equivalence."""
    graph = load_graph(cfg)
    if cfg.root is not None and not 0 <= cfg.root < graph.num_vertices:
        raise CliError(f"--root {cfg.root} out of range for {graph.num_vertices} vertices")
    variants = ("based", "avoiding") if cfg.variant == "both" else (cfg.variant,)
    blocks, results, stats = [], [], []
    for variant in variants:
        block, result, st = _run_one(cfg, graph, variant)
        blocks.append(block)
        results.append(result)
        stats.append(st)
    doc = {
        "format": RUN_FORMAT,
        "version": RUN_VERSION,
        "config": {"algo": cfg.algo, "variant": cfg.variant, "root": cfg.root,
                   "init_state": cfg.init_state,
                   "graph": cfg.graph_path if cfg.gen is None else "gen:%d,%d,%d" % cfg.gen},
        "graph": {"num_vertices": graph.num_vertices, "num_edges": graph.num_edges},
        "results": blocks,
    }
    equivalent = True
    if len(results) == 2:
        a, b = results
        if cfg.algo == "cc":
            equivalent = bool(np.array_equal(a.labels, b.labels) and a.iterations == b.iterations)
        else:
            equivalent = bool(np.array_equal(a.distances, b.distances)
                              and np.array_equal(np.sort(a.queue), np.sort(b.queue)))
        doc["equivalent"] = equivalent
        try:
            table = analysis.iteration_ratio_table(*stats)
        except ValueError as exc:
            doc["ratio_table"] = {"error": str(exc)}
        else:
            doc["ratio_table"] = {"rows": table.to_dicts(), "totals": table.totals,
                                  "speedup": table.speedup}
    return doc, equivalent


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_doc_to_csv(doc: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# {RUN_FORMAT} v{RUN_VERSION} columns: {','.join(CSV_COLUMNS)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    ratio_rows = {r["index"]: r for r in doc.get("ratio_table", {}).get("rows", [])}
    for block in doc["results"]:
        for s in block["per_iteration"]:
            r = ratio_rows.get(s["index"])
            time_ratio = None
            if r is not None:
                time_ratio = r["time_ratio_based" if block["variant"] == "based"
                               else "time_ratio_avoiding"]
            w.writerow([_fmt(v) for v in (
                block["algo"], block["variant"], s["index"], s["wall_time"], s["ops"],
                s["branches"], s["mispredictions"], s["loads"], s["stores"], s["cmovs"],
                s["edges_traversed"], time_ratio,
                r and r["branch_ratio"], r and r["misprediction_ratio"],
                r and r["store_ratio"])])
    for block in doc["results"]:
        for label, site in block["counters"]["sites"].items():
            buf.write(f"# site {block['variant']} {label} evaluations={site['evaluations']} "
                      f"taken={site['taken']} mispredictions={site['mispredictions']}\n")
        b = block["bounds"]
        buf.write(f"# bounds {b['algorithm']} measured={b['measured_mispredictions']} "
                  f"lower={b['lower_bound']} upper={_fmt(b['upper_bound'])} "
                  f"ratio={b['ratio_to_lower']!r}\n")
    if "equivalent" in doc:
        buf.write(f"# equivalent={str(doc['equivalent']).lower()}\n")
    if "speedup" in doc.get("ratio_table", {}):
        buf.write(f"# speedup={doc['ratio_table']['speedup']!r}\n")
    return buf.getvalue()


def strip_timing(obj):
    """Copy of a run document (or part of one) without host-dependent timing fields."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_FIELDS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        graph = generate_random(args.n, args.m, seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    try:
        _write(graph.to_metis(), args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}") from None
    return 0


def cmd_run(args) -> int:
    cfg = RunConfig(
        algo=args.algo, variant=args.variant, graph_path=args.graph,
        gen=parse_gen_spec(args.gen) if args.gen else None, graph_format=args.graph_format,
        root=args.root, init_state=args.init_state, format=args.format, out=args.out,
        repeats=args.repeats)
    doc, equivalent = execute_run(cfg)
    text = json.dumps(doc, indent=2) + "\n" if cfg.format == "json" else run_doc_to_csv(doc)
    try:
        _write(text, cfg.out)
    except OSError as exc:
        raise CliError(f"cannot write {cfg.out}: {exc}") from None
    if not equivalent:
        print("error: branch-based and branch-avoiding results differ", file=sys.stderr)
        return 1
    return 0


def cmd_verify_lemmas(args) -> int:
    checks = verify_all()
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  max_dev   detail"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  "
                     f"{c.max_deviation:<8.2g}  {c.detail}")
    print("\n".join(lines))
    return 0 if all(c.passed for c in checks) else 1


def read_samples(path: str, variant: str | None = "based",
                 algo: str | None = None) -> list[IterationStats]:
    """Per-iteration samples from a ``run`` report (JSON or CSV)."""
    with open(path) as f:
        text = f.read()
    rows = []
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if doc.get("format") != RUN_FORMAT:
            raise CliError(f"{path}: not a {RUN_FORMAT} document")
        for block in doc["results"]:
            rows += [dict(s, algo=block["algo"], variant=block["variant"])
                     for s in block["per_iteration"]]
    else:
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
    samples = []
    for r in rows:
        if variant is not None and r["variant"] != variant:
            continue
        if algo is not None and r["algo"] != algo:
            continue
        samples.append(IterationStats(
            int(r["index"]), float(r["wall_time"]), int(r["ops"]), int(r["branches"]),
            int(r["mispredictions"]), int(r["loads"]), int(r["stores"]),
            int(r["edges_traversed"]), int(r.get("cmovs") or 0)))
    return samples


def cmd_correlate(args) -> int:
    samples = []
    for path in args.reports:
        try:
            samples += read_samples(path, None if args.variant == "all" else args.variant,
                                    args.algo)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise CliError(f"cannot read report {path}: {exc}") from None
    samples = [s for s in samples if s.edges_traversed > 0]
    try:
        matrix = analysis.correlate(samples)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.format == "json":
        text = json.dumps(matrix.to_dict(), indent=2) + "\n"
    else:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(matrix.csv_rows())
        text = buf.getvalue()
    _write(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branchlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random G(n, m) graph in METIS format")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("seed", type=int, nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run instrumented algorithms and emit per-iteration stats")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph file path")
    src.add_argument("--gen", help="generator spec N,M[,SEED]")
    p.add_argument("--graph-format", choices=("metis", "edges"), default="metis")
    p.add_argument("--algo", choices=("cc", "bfs"), required=True)
    p.add_argument("--variant", choices=("based", "avoiding", "both"), default="both")
    p.add_argument("--root", type=int)
    p.add_argument("--init-state", choices=("snt", "wnt", "wt", "st"), default="wnt")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out")
    p.add_argument("--repeats", type=int, default=5, help="timing repetitions (median)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-lemmas", help="exhaustively check the predictor lemmas")
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("correlate", help="correlation matrix over per-iteration samples")
    p.add_argument("reports", nargs="+")
    p.add_argument("--variant", choices=("based", "avoiding", "all"), default="based")
    p.add_argument("--algo", choices=("cc", "bfs"))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
