"""Command line entry point: ``weblogmine preprocess|mine|gen|bench|stats``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, TextIO

from . import bench
from .baselines import brute_force_mine, gsp_mine
from .logparse import DEFAULT_EXCLUDED_EXTENSIONS, FORMATS, LogParseError, SessionConfig, log_stats, parse_log, sessionize
from .mining import mine_database
from .synth import GenSpec, generate
from .wasd import WasDatabase, WasdFormatError, load_wasd, parse_support, write_patterns, write_wasd

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _support(text: str) -> Fraction:
    try:
        return parse_support(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _support_list(text: str) -> List[Fraction]:
    return [_support(part) for part in text.split(",") if part.strip()]


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from None


@contextlib.contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _load_db(path: str) -> WasDatabase:
    try:
        return load_wasd(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (WasdFormatError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_log_lines(paths: Sequence[str]) -> List[str]:
    lines: List[str] = []
    for path in paths:
        try:
            with open(path, encoding="utf-8", errors="replace") as fh:
                lines.extend(fh)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return lines


def _parse_logs(paths: Sequence[str], fmt: str, strict: bool):
    try:
        report = parse_log(_read_log_lines(paths), fmt, strict=strict)
    except LogParseError as exc:
        raise InputError(str(exc)) from None
    return report


def _add_gen_flags(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--n", type=int, required=required, help="number of sequences")
    p.add_argument("--alphabet", type=int, required=required, help="number of distinct events")
    p.add_argument("--mean-len", type=float, required=required, help="mean sequence length")
    p.add_argument("--zipf", type=float, default=1.0, help="Zipf exponent, 0 for uniform (default 1.0)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weblogmine", description="Web access pattern mining over a linked prefix tree.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("preprocess", help="sessionize web server logs into a WASD file")
    p.add_argument("--format", choices=FORMATS, default="clf")
    p.add_argument("--session-timeout", type=float, default=1800, metavar="SECS")
    p.add_argument("--no-strip-query", action="store_true")
    p.add_argument("--exclude-ext", default=",".join(sorted(DEFAULT_EXCLUDED_EXTENSIONS)), metavar="LIST")
    p.add_argument("--status-min", type=int, default=200)
    p.add_argument("--status-max", type=int, default=399)
    p.add_argument("--key", choices=("host", "host+agent"), default="host+agent")
    p.add_argument("--strict", action="store_true", help="abort on the first unparseable line")
    p.add_argument("-o", "--output")
    p.add_argument("logs", nargs="+", metavar="LOGFILE")

    p = sub.add_parser("mine", help="mine access patterns from a WASD file")
    p.add_argument("--algo", choices=("wap", "gsp", "brute"), default="wap")
    p.add_argument("--support", type=_support, required=True)
    p.add_argument("--min-len", type=int, default=1)
    p.add_argument("--max-len", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("db", metavar="DB.wasd")

    p = sub.add_parser("gen", help="generate a synthetic WASD file")
    _add_gen_flags(p, required=True)
    p.add_argument("-o", "--output")

    p = sub.add_parser("bench", help="time miners over a support or size sweep")
    p.add_argument("--algos", default="wap,gsp")
    p.add_argument("--supports", type=_support_list)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--timeout", type=float, default=bench.DEFAULT_TIMEOUT, metavar="SECS")
    p.add_argument("--repeats", type=int, default=1, help="timed runs per cell, median reported")
    p.add_argument("--no-warmup", action="store_true")
    p.add_argument("--verify", action="store_true", help="re-count every mined pattern")
    p.add_argument("-o", "--output")
    _add_gen_flags(p, required=False)
    p.add_argument("db", nargs="?", metavar="DB.wasd")

    p = sub.add_parser("stats", help="summarize a WASD file or a raw log")
    p.add_argument("--log", nargs="+", metavar="LOGFILE")
    p.add_argument("--format", choices=FORMATS, default="clf")
    p.add_argument("db", nargs="?", metavar="DB.wasd")
    return parser


def cmd_preprocess(args) -> int:
    if args.status_min > args.status_max:
        raise UsageError("--status-min must not exceed --status-max")
    if args.session_timeout <= 0:
        raise UsageError("--session-timeout must be positive")
    config = SessionConfig(
        timeout=args.session_timeout,
        key_mode=args.key,
        strip_query=not args.no_strip_query,
        exclude_extensions=frozenset(x.strip() for x in args.exclude_ext.split(",") if x.strip()),
        status_range=(args.status_min, args.status_max),
    )
    report = _parse_logs(args.logs, args.format, args.strict)
    db = sessionize(report.records, config)
    with _output(args.output) as out:
        write_wasd(db, out)
    print(f"lines\t{report.lines}", file=sys.stderr)
    print(f"parse_errors\t{len(report.errors)}", file=sys.stderr)
    print(f"sessions\t{db.m}", file=sys.stderr)
    return EXIT_OK


def cmd_mine(args) -> int:
    if args.min_len < 1 or (args.max_len is not None and args.max_len < args.min_len):
        raise UsageError("length bounds must satisfy 1 <= min-len <= max-len")
    db = _load_db(args.db)
    if args.algo == "wap":
        patterns = mine_database(db, args.support)
    elif args.algo == "gsp":
        patterns = gsp_mine(db, args.support)
    else:
        patterns = brute_force_mine(db, args.support, max_len=args.max_len)
    patterns = patterns.filter_length(args.min_len, args.max_len)
    with _output(args.output) as out:
        write_patterns(patterns, db.dictionary, out)
    return EXIT_OK


def _gen_spec(args) -> GenSpec:
    try:
        return GenSpec(args.n, args.alphabet, args.mean_len, args.zipf, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gen(args) -> int:
    db = generate(_gen_spec(args))
    with _output(args.output) as out:
        write_wasd(db, out)
    return EXIT_OK


def cmd_bench(args) -> int:
    gen_given = any(v is not None for v in (args.n, args.alphabet, args.mean_len))
    if (args.db is None) == (not gen_given):
        raise UsageError("give either DB.wasd or --n/--alphabet/--mean-len")
    if gen_given:
        if None in (args.n, args.alphabet, args.mean_len):
            raise UsageError("--n, --alphabet and --mean-len are all required to generate")
        db = generate(_gen_spec(args))
    else:
        db = _load_db(args.db)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos or set(algos) - set(bench.ALGORITHMS):
        raise UsageError(f"--algos must be a subset of {','.join(bench.ALGORITHMS)}")
    supports = args.supports
    if supports is None:
        supports = [bench.DEFAULT_SIZE_SUPPORT] if args.sizes else list(bench.DEFAULT_SUPPORTS)
    if args.sizes and any(not 1 <= n <= db.m for n in args.sizes):
        raise UsageError(f"--sizes must lie within 1..{db.m}")
    if args.repeats < 1:
        raise UsageError("--repeats must be positive")
    with _output(args.output) as out:
        results = bench.run_benchmark(
            db, algos, supports, args.sizes,
            repeats=args.repeats, warmup=not args.no_warmup, timeout=args.timeout, verify=args.verify,
        )
        bench.write_csv(results, out)
    return EXIT_OK


def cmd_stats(args) -> int:
    if (args.db is None) == (args.log is None):
        raise UsageError("give either DB.wasd or --log LOGFILE")
    if args.log is not None:
        report = _parse_logs(args.log, args.format, strict=False)
        lines = log_stats(report.records).lines() + [f"parse_errors\t{len(report.errors)}"]
    else:
        db = _load_db(args.db)
        lengths = [len(s) for s in db.sequences]
        total = sum(lengths)
        mean = Fraction(total, db.m) if db.m else Fraction(0)
        lines = [
            f"sequences\t{db.m}",
            f"events\t{len(db.dictionary)}",
            f"total_length\t{total}",
            f"mean_length\t{float(mean):.4f}",
            f"max_length\t{max(lengths, default=0)}",
        ]
    print("\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "preprocess": cmd_preprocess,
    "mine": cmd_mine,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "stats": cmd_stats,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"weblogmine: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
