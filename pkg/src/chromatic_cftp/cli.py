"""``chromatic-cftp`` command line.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
3 promise violation, 4 failed statistical test.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from .bounding import BoundingList, is_compatible
from .errors import GraphParseError, PromiseViolation
from .graph import generate, load_graph
from .oracle import enumerate_colorings, marginal_test, uniformity_report
from .rng import make_rng
from .sampler import is_proper, run_perfect_sampler, sample_many
from .seedset import SeedingSet, build_seeding_set, verify_seeding_set

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PROMISE, EXIT_STAT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _graph(path: str):
    try:
        return load_graph(_read(path))
    except GraphParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _seeding(path: str | None, graph):
    if path is None:
        return None
    try:
        seeding = SeedingSet.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad seeding set: {exc}") from None
    if any(not 0 <= v < graph.n for v in seeding.members):
        raise InputError(f"{path}: seeding set names vertices outside the graph")
    if not verify_seeding_set(graph, seeding.members, seeding.eta):
        raise InputError(f"{path}: seeding set violates its bounds on this graph")
    return seeding


def _params(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        try:
            out[key] = int(value)
        except ValueError:
            raise UsageError(f"parameter {key} must be an integer, got {value!r}") from None
    return out


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        graph = generate(args.kind, make_rng(args.rng_seed, "gen"), **_params(args.params))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = graph.to_json() + "\n" if args.format == "json" else graph.to_edge_list()
    _write(args.out, text)
    return EXIT_OK


def cmd_seed_set(args) -> int:
    graph = _graph(args.graph)
    seeding = build_seeding_set(graph, make_rng(args.rng_seed, "seeding"), eta=args.eta)
    if not seeding.members and graph.n:
        print("note: no seeding set found; writing the empty set", file=sys.stderr)
    _write(args.out, seeding.to_json() + "\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    graph = _graph(args.graph)
    seeding = _seeding(args.seed_set, graph)
    if seeding is None:
        seeding = build_seeding_set(graph, make_rng(args.rng_seed, "seeding"))
    if args.colors < graph.max_degree + 2:
        raise UsageError(f"--colors must be at least max degree + 2 = {graph.max_degree + 2}")
    if args.trace:
        samples = []
        for i in range(args.samples):
            res = run_perfect_sampler(graph, args.colors, make_rng(args.rng_seed, "sample", i),
                                      seeding, trace=True)
            for b, phases in enumerate(res.traces):
                for entry in phases:
                    row = {key: entry[key] for key in ("phase", "updates", "seeded_sizes", "all_sizes")}
                    print(json.dumps({"sample": i, "block": b, **row}, sort_keys=True), file=sys.stderr)
            samples.append(tuple(res.coloring))
    else:
        samples = sample_many(graph, args.colors, args.samples, args.rng_seed, seeding)
    for chi in samples:
        if not is_proper(graph, chi):
            raise AssertionError(f"sampler emitted an improper coloring {chi}")
    if args.format == "json":
        _write(None, _dumps({"n": graph.n, "k": args.colors, "samples": [list(c) for c in samples]}))
    else:
        _write(None, "".join(" ".join(map(str, chi)) + "\n" for chi in samples))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    graph = _graph(args.graph)
    try:
        colorings = enumerate_colorings(graph, args.colors)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        body = {"n_cells": len(colorings)}
        if args.list:
            body["colorings"] = [list(c) for c in colorings]
        _write(None, _dumps(body))
    else:
        lines = [str(len(colorings))]
        if args.list:
            lines.extend(" ".join(map(str, c)) for c in colorings)
        _write(None, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_uniformity(args) -> int:
    graph = _graph(args.graph)
    if args.colors < graph.max_degree + 2:
        raise UsageError(f"--colors must be at least max degree + 2 = {graph.max_degree + 2}")
    try:
        enumerate_colorings(graph, args.colors, limit=10**7)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    samples = sample_many(graph, args.colors, args.samples, args.rng_seed, workers=args.workers)
    try:
        report = uniformity_report(samples, graph, args.colors)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(None, _dumps(report))
    failed = report["p_value"] <= args.alpha
    if args.max_tv is not None and report["tv"] >= args.max_tv:
        failed = True
    return EXIT_STAT if failed else EXIT_OK


def cmd_update_test(args) -> int:
    cfg = _read_json(args.config)
    try:
        graph = load_graph(json.dumps(cfg["graph"]))
        L = BoundingList.from_lists(cfg["k"], cfg["lists"])
        v = int(cfg["v"])
        chi = [int(c) for c in cfg["chi"]]
        A = cfg.get("A")
        scope = cfg.get("pair_scope", "neighborhood")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.config}: bad update config: {exc}") from None
    if len(L) != graph.n or len(chi) != graph.n or not 0 <= v < graph.n:
        raise InputError(f"{args.config}: lists, chi and v must match the graph's {graph.n} vertices")
    if not is_compatible(chi, L):
        raise InputError(f"{args.config}: chi is not contained in the bounding lists")
    if args.kind == "compress" and A is None:
        raise InputError(f"{args.config}: compress needs an 'A' entry")
    res = marginal_test(args.kind, graph, L, v, chi, args.trials, make_rng(args.rng_seed, "update-test"),
                        A=A, pair_scope=scope)
    report = {
        "kind": args.kind,
        "trials": res.trials,
        "frequencies": {str(c): f for c, f in res.frequencies().items()},
        "expected": {str(c): float(p) for c, p in sorted(res.expected.items())},
        "worst_z": res.worst_z,
        "passed": res.passed,
    }
    _write(None, _dumps(report))
    return EXIT_OK if res.passed else EXIT_STAT


def cmd_bench(args) -> int:
    graph = _graph(args.graph)
    n, delta, k = graph.n, graph.max_degree, args.colors
    if k < delta + 2:
        raise UsageError(f"--colors must be at least max degree + 2 = {delta + 2}")
    t0 = time.perf_counter()
    seeding = build_seeding_set(graph, make_rng(args.rng_seed, "seeding"))
    seed_seconds = time.perf_counter() - t0
    runs = []
    for i in range(args.reps):
        t0 = time.perf_counter()
        res = run_perfect_sampler(graph, k, make_rng(args.rng_seed, "sample", i), seeding)
        runs.append({"seconds": time.perf_counter() - t0, "blocks": res.blocks, "updates": res.updates})
    mean = {key: sum(r[key] for r in runs) / len(runs) for key in ("seconds", "blocks", "updates")}
    # the claimed running time is O~(n delta^2 log k); report the ratio to that scale
    scale = n * max(delta, 1) ** 2 * math.log(max(k, 2))
    report = {
        "n": n,
        "delta": delta,
        "k": k,
        "reps": args.reps,
        "seeding_size": len(seeding),
        "seeding_seconds": seed_seconds,
        "mean_seconds": mean["seconds"],
        "mean_blocks": mean["blocks"],
        "mean_updates": mean["updates"],
        "updates_per_n_ln_n": mean["updates"] / (n * math.log(n)) if n > 1 else None,
        "seconds_per_n_delta2_ln_k": mean["seconds"] / scale,
        "runs": runs,
    }
    _write(None, _dumps(report))
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chromatic-cftp",
                     description="Perfectly uniform proper k-colorings by coupling from the past.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a graph")
    p.add_argument("--kind", required=True, help="empty, path, cycle, clique, grid or random_regular")
    p.add_argument("--params", nargs="*", default=[], metavar="KEY=INT", help="e.g. n=500 d=100")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--format", choices=("edges", "json"), default="edges")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("seed-set", help="find a seeding set")
    p.add_argument("--graph", required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_seed_set)

    p = sub.add_parser("sample", help="draw perfect samples")
    p.add_argument("--graph", required=True)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--seed-set")
    p.add_argument("--trace", action="store_true", help="per-phase list sizes on stderr")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="count proper colorings exhaustively")
    p.add_argument("--graph", required=True)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("uniformity", help="chi-squared and TV of sampler output")
    p.add_argument("--graph", required=True)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--max-tv", type=float)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_uniformity)

    p = sub.add_parser("update-test", help="marginal test of one update")
    p.add_argument("--kind", choices=("compress", "seeding", "disjoint"), required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_update_test)

    p = sub.add_parser("bench", help="time perfect sampling")
    p.add_argument("--graph", required=True)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for name in ("samples", "trials", "reps"):
            if getattr(args, name, 1) < 1:
                raise UsageError(f"--{name} must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PromiseViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROMISE


if __name__ == "__main__":
    sys.exit(main())
