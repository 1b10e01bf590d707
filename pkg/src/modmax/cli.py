"""Command-line interface: ``modmax <command> ...``.

Exit codes:

    0  success (exact commands: certified OPTIMAL)
    1  other runtime error (unreadable file, unwritable output, ...)
    2  usage error: bad flag, bad gamma, unknown algorithm
    3  input parse error (the message carries the line number)
    4  exact search stopped at the time limit
    5  exact search stopped at the node limit
    6  inconsistent certificate (a heuristic beat the claimed optimum)

Exact commands print a human-readable summary line followed by one line of
``key=value`` pairs; the other commands print the ``key=value`` line only.  Files written
with ``--out`` are byte-identical across reruns; run timings go to a
``*.meta.json`` sidecar.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .bench import (
    CORPUS_ENV,
    ManifestError,
    emit_report,
    load_corpus,
    read_manifest,
    read_records,
    run_benchmark,
    summarize,
)
from .exact import Budget, Mode, Status, build_model, enumerate_all_optima, solve_exact
from .graph import (
    GraphError,
    ModularityParams,
    ParseError,
    barabasi_albert,
    erdos_renyi,
    read_edge_list,
    write_edge_list,
    write_partition,
)
from .heuristics import ALGORITHMS, EXTERNAL, UnknownAlgorithm, resolve, run_heuristic
from .partition import CertificateError, gop, max_ami_vs_optima, pairwise_ami

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_TIME_LIMIT = 4
EXIT_NODE_LIMIT = 5
EXIT_CERTIFICATE = 6

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.TIME_LIMIT: EXIT_TIME_LIMIT,
    Status.NODE_LIMIT: EXIT_NODE_LIMIT,
}

log = logging.getLogger("modmax")


class UsageError(Exception):
    pass


def _num(x):
    return f"{float(x):.7g}"


def _rational(v):
    return f"{v.numerator}/{v.scale}"


def _params(text):
    try:
        return ModularityParams.parse(text)
    except GraphError as exc:
        raise UsageError(str(exc)) from exc


def _budget(args):
    return Budget(args.time_limit, args.node_limit)


def _write_json(path, d):
    Path(path).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")


def _write_meta(out, stem, cert):
    _write_json(Path(out) / f"{stem}.meta.json", {
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "wall_time": cert.wall_time,
        "version": __version__,
    })


def _certificate_dict(cert):
    d = cert.to_dict()
    d.pop("wall_time")
    return d


def _exact_summary(prefix, optima, k):
    cert = optima.certificate
    q = optima.q_star
    if cert.status is Status.OPTIMAL:
        return f"{prefix}Q* = {_num(q)} (exact {_rational(q)}), k = {k}, status {cert.status.value}"
    return (f"{prefix}Q best = {_num(q)} (exact {_rational(q)}), k = {k}, "
            f"bound = {_num(cert.q_bound)} (exact {_rational(cert.q_bound)}), "
            f"status {cert.status.value}")


def _exact_kv(optima, k, extra=""):
    cert = optima.certificate
    return (f"status={cert.status.value} q={_num(optima.q_star)} q_exact={_rational(optima.q_star)} "
            f"bound={_num(cert.q_bound)} bound_exact={_rational(cert.q_bound)} k={k} "
            f"nodes={cert.nodes}{extra}")


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args):
    g = read_edge_list(args.graph)
    params = _params(args.gamma)
    model = build_model(g, params, Mode(args.mode))
    res = solve_exact(model, _budget(args), bound=args.bound)
    part = res.best
    print(_exact_summary("", res, part.k))
    print(_exact_kv(res, part.k))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_partition(g, part, out / "partition.tsv")
        _write_json(out / "certificate.json", _certificate_dict(res.certificate))
        _write_meta(out, "certificate", res.certificate)
    return _STATUS_EXIT[res.certificate.status]


def cmd_enumerate(args):
    g = read_edge_list(args.graph)
    params = _params(args.gamma)
    model = build_model(g, params, Mode(args.mode))
    res = enumerate_all_optima(model, _budget(args), bound=args.bound)
    ks = ",".join(str(p.k) for p in res.partitions)
    print(_exact_summary(f"multiplicity = {res.multiplicity}, ", res, ks))
    amis = pairwise_ami(res.partitions)
    min_ami = min(amis.values()) if amis else 1.0
    print(_exact_kv(res, ks, f" multiplicity={res.multiplicity} min_pairwise_ami={min_ami:.6f}"))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, p in enumerate(res.partitions):
            write_partition(g, p, out / f"optimum_{i:03d}.tsv")
        d = _certificate_dict(res.certificate)
        d["multiplicity"] = res.multiplicity
        d["pairwise_ami"] = {f"{i},{j}": v for (i, j), v in sorted(amis.items())}
        _write_json(out / "certificate.json", d)
        _write_meta(out, "certificate", res.certificate)
    return _STATUS_EXIT[res.certificate.status]


def _resolve_algorithm(name):
    try:
        return resolve(name)
    except UnknownAlgorithm as exc:
        raise UsageError(exc.args[0]) from exc


def cmd_heuristic(args):
    key = _resolve_algorithm(args.algorithm)
    g = read_edge_list(args.graph)
    params = _params(args.gamma)
    if key in EXTERNAL and not args.partition_file:
        raise UsageError(f"{key} needs --partition-file")
    res = run_heuristic(key, g, params, seed=args.seed, partition_file=args.partition_file)
    print(f"algorithm={key} q={_num(res.q)} q_exact={_rational(res.q)} k={res.k} seed={args.seed}")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_partition(g, res.partition, args.out)
    return EXIT_OK


def _parse_external(items):
    out = {}
    for item in items or []:
        name, sep, path = item.partition("=")
        if not sep or not path:
            raise UsageError(f"--external expects NAME=PATH, got {item!r}")
        out[_resolve_algorithm(name)] = path
    return out


def cmd_compare(args):
    g = read_edge_list(args.graph)
    params = _params(args.gamma)
    external = _parse_external(args.external)
    names = [_resolve_algorithm(a) for a in args.algorithms.split(",")] if args.algorithms else list(ALGORITHMS)
    names += [k for k in external if k not in names]
    for k in names:
        if k in EXTERNAL and k not in external:
            raise UsageError(f"{k} needs --external {k}=PATH")
    optima = enumerate_all_optima(build_model(g, params, Mode(args.mode)), _budget(args))
    cert = optima.certificate
    certified = cert.status is Status.OPTIMAL
    print(_exact_summary("exact: ", optima, optima.best.k))
    code = _STATUS_EXIT[cert.status]
    for k in names:
        res = run_heuristic(k, g, params, seed=args.seed, partition_file=external.get(k))
        if certified:
            try:
                ratio = gop(res.q, optima.q_star)
            except CertificateError as exc:
                print(f"algorithm={k} error={exc}", file=sys.stderr)
                return EXIT_CERTIFICATE
            gop_txt = f"gop={ratio:.6f}"
            ami_txt = f"max_ami={max_ami_vs_optima(res.partition, optima):.6f}"
        else:
            upper = gop(res.q, max(res.q, optima.q_star))
            gop_txt = f"gop<={upper:.6f}"
            ami_txt = "max_ami=n/a"
        print(f"algorithm={k} q={_num(res.q)} q_exact={_rational(res.q)} k={res.k} {gop_txt} {ami_txt}")
    return code


def cmd_bench(args):
    if args.corpus_root:
        os.environ[CORPUS_ENV] = args.corpus_root
    try:
        manifest = read_manifest(args.manifest)
    except ManifestError as exc:
        raise ParseError(str(exc)) from exc
    params = _params(args.gamma) if args.gamma else manifest.params
    mode = Mode(args.mode) if args.mode else manifest.mode
    budget = Budget(
        args.time_limit if args.time_limit is not None else manifest.budget.time_limit,
        args.node_limit if args.node_limit is not None else manifest.budget.node_limit)
    seed = args.seed if args.seed is not None else manifest.seed
    if args.algorithms:
        algs = [_resolve_algorithm(a) for a in args.algorithms.split(",")]
    else:
        algs = [_resolve_algorithm(a) for a in manifest.algorithms] or list(ALGORITHMS)
    graphs, failures = load_corpus(manifest)
    for f in failures:
        print(f"instance={f.name} status=FAILED reason={f.reason!r}", file=sys.stderr)
    out = Path(args.out)
    cache = Path(args.cache) if args.cache else out / "cache"
    stats = {}
    records = run_benchmark(graphs, algs, params, mode, budget, seed, cache_dir=cache,
                            jobs=args.jobs, failures=failures, stats=stats)
    summary = summarize(records)
    emit_report(records, summary, out, extra={"load_failures": [f.name for f in failures]})
    print(f"records={len(records)} instances={len(graphs)} load_failures={len(failures)} "
          f"exact_solved={stats['exact_solved']} exact_cached={stats['exact_cached']}")
    _print_summary(summary)
    return EXIT_OK


def _print_summary(summary):
    def fmt(x):
        return "n/a" if x is None else f"{x:.4f}"

    for alg, s in summary.items():
        print(f"algorithm={alg} runs={s.runs} evaluated={s.evaluated} "
              f"success_rate={fmt(s.success_rate)} mean_gop={fmt(s.mean_gop)} "
              f"mean_ami={fmt(s.mean_ami)} above_diagonal={fmt(s.above_diagonal)}")


def cmd_report(args):
    try:
        records = read_records(args.records)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad records file: {exc}") from exc
    summary = summarize(records)
    emit_report(records, summary, args.out)
    print(f"records={len(records)} out={args.out}")
    _print_summary(summary)
    return EXIT_OK


def cmd_generate(args):
    if args.model == "er":
        if args.m is None:
            raise UsageError("er needs --m")
        g = erdos_renyi(args.n, args.m, args.seed)
    else:
        if args.attach is None:
            raise UsageError("ba needs --attach")
        g = barabasi_albert(args.n, args.attach, args.seed)
    write_edge_list(g, args.out)
    print(f"model={args.model} n={g.n} m={g.m} seed={args.seed} out={args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_gamma(p, default="1"):
    p.add_argument("--gamma", default=default,
                   help="resolution as 'p/q' or a decimal (default: %(default)s)")


def _add_exact(p):
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.REDUCED.value,
                   help="triangle constraint set (default: %(default)s)")
    p.add_argument("--time-limit", type=float, default=None, metavar="SEC")
    p.add_argument("--node-limit", type=int, default=None, metavar="N")
    p.add_argument("--bound", choices=["lp", "combinatorial"], default="lp",
                   help="bounding method of the branch and bound (default: %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modmax", description="Exact and heuristic modularity maximization.")
    parser.add_argument("--version", action="version", version=f"modmax {__version__}")
    parser.add_argument("--config", metavar="JSON",
                        help="file of flag defaults, e.g. {\"gamma\": \"1/2\", \"time_limit\": 60}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="certified maximum-modularity partition")
    p.add_argument("graph")
    _add_gamma(p)
    _add_exact(p)
    p.add_argument("--out", metavar="DIR", help="write partition.tsv and certificate.json here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="all optimal partitions")
    p.add_argument("graph")
    _add_gamma(p)
    _add_exact(p)
    p.add_argument("--out", metavar="DIR", help="write optimum_NNN.tsv and certificate.json here")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("heuristic", help="run one heuristic")
    p.add_argument("algorithm", help=f"one of {', '.join(list(ALGORITHMS) + list(EXTERNAL))}")
    p.add_argument("graph")
    _add_gamma(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--partition-file", help="partition to ingest for external algorithms")
    p.add_argument("--out", metavar="FILE", help="write the partition here")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("compare", help="heuristics against the certified optima")
    p.add_argument("graph")
    p.add_argument("--algorithms", help="comma-separated list (default: all built-in)")
    p.add_argument("--external", action="append", metavar="NAME=PATH",
                   help="add an externally computed partition, e.g. belief=part.tsv")
    _add_gamma(p)
    _add_exact(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="run a corpus manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--algorithms", help="comma-separated list (default: manifest, else all)")
    p.add_argument("--gamma", default=None, help="override the manifest resolution")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--time-limit", type=float, default=None, metavar="SEC")
    p.add_argument("--node-limit", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")
    p.add_argument("--cache", metavar="DIR", help="exact-result cache (default: OUT/cache)")
    p.add_argument("--corpus-root", metavar="DIR", help=f"overrides ${CORPUS_ENV}")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="summary and plots from a records file")
    p.add_argument("records", help="records.jsonl, records.csv or a report directory")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("generate", help="write a random graph")
    p.add_argument("model", choices=["er", "ba"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, help="edge count (er)")
    p.add_argument("--attach", type=int, help="edges per new node (ba)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_generate)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        defaults = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in defaults.items() if k in dests})


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"modmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"modmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"modmax: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CertificateError as exc:
        print(f"modmax: certificate error: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except (OSError, GraphError, ValueError) as exc:
        print(f"modmax: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
