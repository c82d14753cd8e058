"""Command-line interface: ``commsig <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.  Every output file
starts with a ``#`` line holding the run configuration as JSON.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .binomial import EXACT_THRESHOLD
from .detect import OBJECTIVES, extract_level, louvain
from .evaluate import (CSV_COLUMNS, DEFAULT_METHODS, METHODS, evaluate_candidates,
                       filter_groups, overlap_scores, run_experiment, score_groups)
from .graph import WEIGHT_MODES, Graph, GraphFormatError, load_graph, read_groups, write_groups
from .groupgraph import build_group_graph, group_graph_records, write_group_graph
from .membership import aggregate, membership_scores
from .scoring import COLUMNS, MODELS, RANKABLE, score_vector
from .synth import NOISE_SWEEP, SyntheticSpec, generate, preset

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _size_range(text: str) -> tuple[int, int | None]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected LO:HI")
    try:
        return int(lo) if lo else 1, int(hi) if hi else None
    except ValueError:
        raise argparse.ArgumentTypeError("expected integers LO:HI") from None


def _sweep(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        lo, hi, step = (float(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI:STEP") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("need STEP > 0 and HI >= LO")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def _threshold(text: str) -> int | None:
    if text.lower() in ("none", "inf", "exact"):
        return None
    return int(text)


def _common(p, graph=True, groups=False, refs=False):
    if graph:
        p.add_argument("--graph", help="edge list file")
        p.add_argument("--weight-mode", choices=WEIGHT_MODES, default="unweighted")
        p.add_argument("--allow-self-loops", action="store_true")
    if groups:
        p.add_argument("--groups", help="group file (JSON Lines or TSV)")
    if refs:
        p.add_argument("--refs", help="reference group file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="commsig", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"commsig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a planted-partition graph")
    _common(p, graph=False)
    p.add_argument("--preset", choices=("syn1", "syn2", "syn3"), default="syn1")
    p.add_argument("--sizes", help="comma-separated group sizes (overrides preset)")
    p.add_argument("--probs", help="comma-separated internal probabilities")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")

    for name, help_ in (("score", "score groups"), ("rank", "rank groups by one model")):
        p = sub.add_parser(name, help=help_)
        _common(p, groups=True)
        p.add_argument("--model", choices=RANKABLE if name == "rank" else MODELS, default="node")
        p.add_argument("--exact-threshold", type=_threshold, default=EXACT_THRESHOLD)
        p.add_argument("--min-size", type=int, default=1 if name == "score" else 3)
        p.add_argument("--size-range", type=_size_range)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--jsonl", action="store_true", help="write JSON Lines instead of CSV")

    p = sub.add_parser("eval", help="evaluate rankings against reference groups")
    _common(p, groups=True, refs=True)
    p.add_argument("--scores", help="CSV with an 'id' column and one column per method")
    p.add_argument("--methods", default=",".join(DEFAULT_METHODS))
    p.add_argument("--preset", choices=("syn1", "syn2", "syn3"),
                   help="run a synthetic sweep instead of evaluating files")
    p.add_argument("--noise-sweep", type=_sweep, default=NOISE_SWEEP)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--undefined", choices=("exclude", "zero"), default="exclude")
    p.add_argument("--min-size", type=int, default=3)
    p.add_argument("--size-range", type=_size_range)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("detect", help="Louvain candidate groups")
    _common(p)
    p.add_argument("--objective", choices=("edge", "node"), default="edge")
    p.add_argument("--level", type=int, default=-1)
    p.add_argument("--all-levels", action="store_true",
                   help="write one file per level, OUT.level<K>.jsonl")
    p.add_argument("--min-size", type=int, default=3)
    p.add_argument("--size-range", type=_size_range)

    p = sub.add_parser("membership", help="per-node membership scores")
    _common(p, groups=True)
    p.add_argument("--aggregator", choices=("median", "mean", "quantile"), default="median")
    p.add_argument("--quantile", type=float)
    p.add_argument("--exact-threshold", type=_threshold, default=EXACT_THRESHOLD)

    p = sub.add_parser("edges", help="significance of edges between groups")
    _common(p, groups=True)
    p.add_argument("--trials-mode", choices=("outgoing", "total"), default="outgoing")
    p.add_argument("--exact-threshold", type=_threshold, default=EXACT_THRESHOLD)
    return parser


# -- helpers -----------------------------------------------------------------

def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["version"] = __version__
    return cfg


def _header(args) -> str:
    return f"# commsig {args.command} " + json.dumps(_config(args), sort_keys=True, default=list) + "\n"


@contextmanager
def _output(args):
    buf = io.StringIO()
    buf.write(_header(args))
    yield buf
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if not getattr(args, n, None)]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s) {', '.join(missing)}")


def _open(path):
    try:
        return open(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(args) -> Graph:
    _need(args, "graph")
    with _open(args.graph) as fh:
        return load_graph(fh, args.weight_mode, args.allow_self_loops)


def _load_groups(path, graph):
    with _open(path) as fh:
        return read_groups(fh, graph)


def _size_filter(args, groups):
    lo, hi = args.size_range if args.size_range else (args.min_size, None)
    return filter_groups(groups, lo, hi)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def _write_rows(fh, columns, rows, jsonl=False):
    if jsonl:
        for r in rows:
            fh.write(json.dumps({c: r[c] for c in columns}) + "\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])


# -- subcommands -------------------------------------------------------------

def cmd_synth(args) -> None:
    if args.sizes or args.probs:
        _need(args, "sizes", "probs")
        sizes = [int(x) for x in args.sizes.split(",")]
        probs = [float(x) for x in args.probs.split(",")]
        spec = SyntheticSpec(sizes, probs, args.noise, args.seed)
    else:
        spec = preset(args.preset, args.noise, args.seed)
    graph, groups = generate(spec)
    _need(args, "out")
    header = _header(args)
    with open(args.out + ".edges", "w") as fh:
        fh.write(header)
        graph.write_edge_list(fh)
    with open(args.out + ".groups." + args.format, "w") as fh:
        fh.write(header)
        write_groups(fh, groups, graph, args.format)


def _score_all(args, graph, groups):
    def one(g):
        return score_vector(graph, g, args.model if args.model in MODELS else "node",
                            args.exact_threshold)
    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            return list(pool.map(one, groups))
    return [one(g) for g in groups]


def cmd_score(args) -> None:
    _need(args, "groups")
    graph = _load_graph(args)
    groups = _size_filter(args, _load_groups(args.groups, graph))
    vectors = _score_all(args, graph, groups)
    with _output(args) as fh:
        _write_rows(fh, COLUMNS, [v.as_row() for v in vectors], args.jsonl)


def cmd_rank(args) -> None:
    _need(args, "groups")
    graph = _load_graph(args)
    groups = _size_filter(args, _load_groups(args.groups, graph))
    vectors = _score_all(args, graph, groups)
    sign = 1.0 if args.model == "conductance" else -1.0
    order = sorted(range(len(vectors)), key=lambda i: (sign * vectors[i].value(args.model), i))
    rows = []
    for rank, i in enumerate(order, 1):
        v = vectors[i]
        s = v.value(args.model)
        rows.append({"rank": rank, "id": v.id, "size": v.size, "model": args.model, "score": s,
                     "label": v.label if args.model in MODELS else "",
                     "rel_error": v.rel_error if args.model in MODELS else None})
    with _output(args) as fh:
        _write_rows(fh, ("rank", "id", "size", "model", "score", "label", "rel_error"), rows,
                    args.jsonl)


def _read_scores(path, candidates):
    with _open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if not reader.fieldnames or "id" not in reader.fieldnames:
        raise GraphFormatError("scores file needs an 'id' column")
    table = {row["id"]: row for row in reader}
    methods = [c for c in reader.fieldnames if c != "id"]
    out = {}
    for m in methods:
        try:
            out[m] = np.array([float(table[c.id][m]) for c in candidates])
        except KeyError as exc:
            raise GraphFormatError(f"no scores for candidate {exc.args[0]!r}") from None
        except ValueError:
            raise GraphFormatError(f"non-numeric score in column {m!r}") from None
    return out


def cmd_eval(args) -> None:
    methods = [m for m in args.methods.split(",") if m]
    if args.preset:
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise UsageError(f"unknown methods {unknown}")
        lo, hi = args.size_range if args.size_range else (args.min_size, None)
        rows = []
        for noise in args.noise_sweep:
            rep = run_experiment(preset(args.preset, noise), methods, args.trials, args.seed,
                                 undefined=args.undefined, workers=args.threads,
                                 min_size=lo, max_size=hi)
            rows += rep.rows(noise)
        with _output(args) as fh:
            _write_rows(fh, CSV_COLUMNS, rows)
        return
    _need(args, "groups", "refs")
    graph = _load_graph(args) if args.graph else None
    cands = _size_filter(args, _load_groups(args.groups, graph))
    refs = filter_groups(_load_groups(args.refs, graph), args.min_size)
    if not refs:
        raise GraphFormatError("no reference groups after size filtering")
    if args.scores:
        scores = _read_scores(args.scores, cands)
    elif graph is not None:
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise UsageError(f"unknown methods {unknown}")
        scores = score_groups(graph, cands, methods)
    else:
        raise UsageError("eval needs --scores or --graph")
    result = evaluate_candidates(cands, refs, scores)
    ov = overlap_scores(cands, refs)
    with _output(args) as fh:
        fh.write("# overlaps\n")
        _write_rows(fh, ("id", "best_reference", "recall", "precision", "overlap"),
                    [{"id": o.candidate, "best_reference": o.best_reference, "recall": o.recall,
                      "precision": o.precision, "overlap": o.score} for o in ov])
        fh.write(f"# avgPR {_fmt(result.avg_pr)}\n# methods\n")
        _write_rows(fh, ("method", "spr", "topPR", "top5PR", "top_size"),
                    [{"method": m, "spr": result.spr[m], "topPR": result.top_pr[m],
                      "top5PR": result.top5_pr[m], "top_size": result.top_size[m]}
                     for m in scores])


def cmd_detect(args) -> None:
    graph = _load_graph(args)
    objective = "edge_modularity" if args.objective == "edge" else "node_modularity"
    part = louvain(graph, objective, seed=args.seed)
    lo, hi = args.size_range if args.size_range else (args.min_size, None)
    if args.all_levels:
        _need(args, "out")
        header = _header(args)
        for k in range(len(part.levels)):
            with open(f"{args.out}.level{k}.jsonl", "w") as fh:
                fh.write(header)
                write_groups(fh, extract_level(part, k, (lo, hi)), graph)
        return
    try:
        groups = extract_level(part, args.level, (lo, hi))
    except IndexError as exc:
        raise UsageError(str(exc)) from None
    with _output(args) as fh:
        write_groups(fh, groups, graph)


def cmd_membership(args) -> None:
    _need(args, "groups")
    graph = _load_graph(args)
    rows = []
    for g in _load_groups(args.groups, graph):
        ms = membership_scores(graph, g, args.exact_threshold)
        gscore = aggregate([s.score for s in ms], args.aggregator, args.quantile)
        for s in ms:
            rows.append({"group": g.id, "node": graph.labels[s.node], "deg_node": s.deg_node,
                         "din_node": s.din_node, "p": s.p, "score": s.score,
                         "group_score": gscore})
    with _output(args) as fh:
        _write_rows(fh, ("group", "node", "deg_node", "din_node", "p", "score", "group_score"), rows)


def cmd_edges(args) -> None:
    _need(args, "groups")
    graph = _load_graph(args)
    gg = build_group_graph(graph, _load_groups(args.groups, graph))
    records = group_graph_records(graph, gg, trials_mode=args.trials_mode,
                                  exact_threshold=args.exact_threshold)
    with _output(args) as fh:
        write_group_graph(fh, records)


COMMANDS = {"synth": cmd_synth, "score": cmd_score, "rank": cmd_rank, "eval": cmd_eval,
            "detect": cmd_detect, "membership": cmd_membership, "edges": cmd_edges}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"commsig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, ValueError) as exc:
        print(f"commsig: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
