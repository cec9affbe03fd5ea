"""Command-line front end.

Exit codes: 0 when everything passes, 1 on a conformance failure, 2 on
usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from phh.actions import Policy
from phh.conformance import Verdict, check
from phh.corpus import bench, corpus_stats
from phh.diagnostics import PHHError
from phh.document import Style, parse_document, serialize_document
from phh.engine import Strictness, replay

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _read_all(paths: Sequence[str]) -> Optional[list[tuple[str, bytes]]]:
    out = []
    for path in paths:
        try:
            out.append((path, _read(path)))
        except OSError as exc:
            print(f"{path}: {exc.strerror or exc}", file=sys.stderr)
            return None
    return out


def _policy(args) -> Policy:
    return Policy.LENIENT if args.lenient else Policy.STRICT


def cmd_validate(args) -> int:
    code = EXIT_OK
    policy = _policy(args)
    io_failed = False
    items = []
    for path in args.paths:
        try:
            items.append((path, _read(path)))
        except OSError as exc:
            print(f"{path}: {exc.strerror or exc}", file=sys.stderr)
            io_failed = True
    workers = max(1, args.parallel)
    with ThreadPoolExecutor(workers) as pool:
        reports = list(pool.map(lambda item: check(item[1], item[0], policy), items))
    for report in reports:
        print(report.to_json() if args.json else report.to_text())
        allowed = {Verdict.PASS, Verdict.PASS_WITH_WARNINGS} if policy is Policy.LENIENT else {Verdict.PASS}
        if report.verdict not in allowed:
            code = EXIT_FAIL
    return EXIT_USAGE if io_failed else code


def _fmt_money(value) -> str:
    return "null" if value is None else str(value)


def cmd_replay(args) -> int:
    try:
        data = _read(args.path)
    except OSError as exc:
        print(f"{args.path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    report = check(data, args.path, Policy.LENIENT)
    if report.verdict is Verdict.FAIL:
        print(report.to_text(), file=sys.stderr)
        return EXIT_FAIL
    doc = parse_document(data, Policy.LENIENT).document
    try:
        result = replay(doc, Strictness(args.strictness))
    except PHHError as exc:
        print(f"{args.path}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for d in result.diagnostics:
        print(f"{args.path}: {d}", file=sys.stderr)
    if args.snapshots:
        print(result.dumps())
        return EXIT_OK
    try:
        stacks = result.finishing_stacks()
    except PHHError as exc:
        print(f"{args.path}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        print(json.dumps({"file": args.path, "finishing_stacks": [None if s is None else str(s) for s in stacks]}))
    else:
        print(" ".join(_fmt_money(s) for s in stacks))
    return EXIT_OK


def cmd_stats(args) -> int:
    items = _read_all(args.paths)
    if items is None:
        return EXIT_USAGE
    stats = corpus_stats(items)
    if args.json:
        print(json.dumps(stats.to_dict(), sort_keys=True))
    else:
        print("file\tnewlines\twords\tbytes")
        for c in stats.per_file:
            print(f"{c.name}\t{c.newlines}\t{c.words}\t{c.bytes}")
        print(f"average({stats.files})\t{float(stats.newlines):.3f}\t{float(stats.words):.3f}"
              f"\t{float(stats.bytes):.3f}")
    if args.figure:
        from phh.report import stats_figure
        stats_figure(stats, args.figure)
    return EXIT_OK


def cmd_bench(args) -> int:
    items = _read_all(args.paths)
    if items is None:
        return EXIT_USAGE
    bad = [name for name, data in items if check(data, name).verdict is Verdict.FAIL]
    if bad:
        for name in bad:
            print(f"{name}: invalid, refusing to benchmark", file=sys.stderr)
        return EXIT_FAIL
    corpus = [data for _, data in items] * max(1, args.copies)
    result = bench(corpus, args.repeat, args.with_replay, args.parallel)
    if args.json:
        print(json.dumps(result.to_dict(), sort_keys=True))
    else:
        header = ["hands", "seconds", "hands_per_s", "ms_per_hand"]
        row = [str(result.hands), f"{result.seconds:.6f}", f"{result.throughput:.2f}", f"{result.ms_per_hand:.4f}"]
        if result.replay_seconds is not None:
            header.append("replay_seconds")
            row.append(f"{result.replay_seconds:.6f}")
        print("\t".join(header))
        print("\t".join(row))
    if args.figure:
        from phh.report import bench_figure
        bench_figure(result, args.figure)
    return EXIT_OK


def cmd_canon(args) -> int:
    try:
        data = _read(args.path)
    except OSError as exc:
        print(f"{args.path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    parsed = parse_document(data, _policy(args))
    if not parsed.ok:
        for d in parsed.diagnostics:
            print(f"{args.path}: {d}", file=sys.stderr)
        return EXIT_FAIL
    out = serialize_document(parsed.document, Style.CANONICAL)
    if args.in_place:
        if args.path == "-":
            print("--in-place needs a file path", file=sys.stderr)
            return EXIT_USAGE
        if out != data:
            Path(args.path).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phh", description="Poker hand history tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def policy_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--strict", action="store_true", help="treat rule problems as errors (default)")
        group.add_argument("--lenient", action="store_true", help="downgrade recoverable problems to warnings")

    p = sub.add_parser("validate", help="check files for conformance")
    p.add_argument("paths", nargs="+")
    policy_flags(p)
    p.add_argument("--json", action="store_true", help="one JSON record per file")
    p.add_argument("--parallel", type=int, default=1, metavar="N")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("replay", help="replay a hand")
    p.add_argument("path")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--snapshots", action="store_true", help="one JSON record per step")
    mode.add_argument("--final", action="store_true", help="finishing stacks (default)")
    p.add_argument("--strictness", choices=[s.value for s in Strictness], default="warn")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stats", help="newline, word and byte counts per hand")
    p.add_argument("paths", nargs="+")
    p.add_argument("--json", action="store_true")
    p.add_argument("--figure", metavar="PATH", help="also write a chart of the counts")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="parser throughput over in-memory copies")
    p.add_argument("paths", nargs="+")
    p.add_argument("--repeat", type=int, default=1, metavar="N")
    p.add_argument("--copies", type=int, default=1, metavar="N", help="replicate the corpus N times")
    p.add_argument("--with-replay", action="store_true", help="also time the engine, reported separately")
    p.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes (default 1)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--figure", metavar="PATH", help="also write a chart of per-round throughput")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("canon", help="print the canonical form of a file")
    p.add_argument("path")
    p.add_argument("--in-place", action="store_true")
    policy_flags(p)
    p.set_defaults(func=cmd_canon)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
