"""Command-line entry point: ``cflcheck gen|verify|validate|corpus``.

Exit codes: 0 success or valid, 1 invalid message or oracle disagreement,
2 usage, I/O or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from functools import lru_cache
from pathlib import Path

from cflcheck.abnf import AbnfError
from cflcheck.compose import ProfileError
from cflcheck.grammar import GrammarSyntaxError, format_grammar, grammar_size
from cflcheck.idioms import generate

EXIT_OK, EXIT_INVALID, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="latin-1")
    else:
        sys.stdout.write(text)


# -- gen -------------------------------------------------------------------------


def _gen_spec(args) -> list[dict]:
    if args.idiom in ("len", "chunk"):
        kind = args.idiom
        if args.idiom == "len" and args.delimited:
            kind = "len-delim"
        return [{"idiom": kind, "n": args.n, "base": args.base, "body": args.body_alphabet,
                 "msd_first": args.msd_first}]
    positions = [args.i] if args.i else list(range(1, args.n + 1))
    spec = {"idiom": args.idiom, "n": args.n}
    if args.idiom == "leq":
        spec["alphabet"] = args.order
    else:
        spec["alphabet"] = args.alphabet
    if args.idiom == "general-eq":
        spec.update(fm=args.fm.split(","), mm=args.mm.split(","), lm=args.lm.split(","))
    return [dict(spec, i=i) for i in positions]


def cmd_gen(args) -> int:
    chunks = []
    for spec in _gen_spec(args):
        try:
            g = generate(spec)
        except (ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from None
        header = f"# {len(g.rules)} rules, size {grammar_size(g)}\n"
        chunks.append(header + format_grammar(g))
    _emit("\n".join(chunks), args.output)
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    from cflcheck.oracle import desk_matrix, run_matrix, run_residuals

    cases = desk_matrix()
    if args.only:
        cases = [c for c in cases if c.label.startswith(args.only)]
        if not cases:
            raise UsageError(f"no matrix case starts with {args.only!r}")
    summary = run_matrix(cases, budget=args.budget)
    summary["residuals"] = run_residuals()
    ok = summary["agree"] and all(r["ok"] for r in summary["residuals"])
    summary["ok"] = ok
    _emit(json.dumps(summary, indent=2) + "\n", args.output)
    return EXIT_OK if ok else EXIT_INVALID


# -- validate / corpus -------------------------------------------------------------


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _profile(path: str):
    from cflcheck.http.validate import load_http_profile, resolve_profile_path

    if not resolve_profile_path(path).is_file():
        raise UsageError(f"profile not found: {path}")
    return load_http_profile(path)


def cmd_validate(args) -> int:
    from cflcheck.http.validate import validate_bytes

    profile = _profile(args.profile)
    data = _read(args.message)
    response = _read(args.paired) if args.paired else None
    report = validate_bytes(data, profile, response)
    if args.json:
        sys.stdout.write(json.dumps(report.to_json(), indent=2) + "\n")
    else:
        sys.stdout.write(report.render() + "\n")
    return EXIT_OK if report.ok else EXIT_INVALID


def read_labels(path: str) -> list[tuple[str, str]]:
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or row[0].startswith("#"):
                    continue
                if len(row) != 2 or row[1].strip() not in ("valid", "invalid"):
                    raise UsageError(f"{path}:{lineno}: expected 'filename,valid|invalid'")
                rows.append((row[0].strip(), row[1].strip()))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return rows


def run_corpus(directory: str | Path, labels: list[tuple[str, str]], profile) -> dict:
    """Validate every labelled entry; ``a+b`` entries are request/response pairs."""
    from cflcheck.http.validate import validate_bytes

    directory = Path(directory)
    t0 = time.perf_counter()
    disagree = []
    results = {}
    counts = {"valid": {"valid": 0, "invalid": 0}, "invalid": {"valid": 0, "invalid": 0}}
    for name, label in labels:
        parts = name.split("+")
        if len(parts) > 2:
            raise UsageError(f"bad corpus entry {name!r}")
        data = [_read(str(directory / p)) for p in parts]
        report = validate_bytes(data[0], profile, data[1] if len(data) == 2 else None)
        got = "valid" if report.ok else "invalid"
        results[name] = got
        counts[label][got] += 1
        if got != label:
            disagree.append(name)
    return {
        "total": len(labels),
        "agree": len(labels) - len(disagree),
        "disagree": disagree,
        "confusion": {f"labelled {k}": v for k, v in counts.items()},
        "seconds": round(time.perf_counter() - t0, 3),
    }


def cmd_corpus(args) -> int:
    profile = _profile(args.profile)
    labels = read_labels(args.labels)
    summary = run_corpus(args.dir, labels, profile)
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK if not summary["disagree"] else EXIT_INVALID


# -- parser -------------------------------------------------------------------------


@lru_cache(maxsize=1)  # parsers are reusable; repeated in-process calls skip the rebuild
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cflcheck", description="Grammar-based protocol message validation")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit an idiom grammar")
    gen.add_argument("idiom", choices=["len", "chunk", "eq", "leq", "general-eq"])
    gen.add_argument("--n", type=int, required=True, help="field width")
    gen.add_argument("--base", type=int, default=2)
    gen.add_argument("--body-alphabet", default="a", help="body symbols; <dot> etc. name reserved symbols")
    gen.add_argument("--msd-first", action="store_true")
    gen.add_argument("--delimited", action="store_true", help="len only: delimiter after the digits")
    gen.add_argument("--i", type=int, help="component position (default: all components)")
    gen.add_argument("--alphabet", default="ab", help="symbols, or 'printable' / 'digits'")
    gen.add_argument("--order", default="digits", help="leq: symbols least first, or 'digits'")
    gen.add_argument("--fm", default="", help="general-eq: comma-separated filler words")
    gen.add_argument("--mm", default="")
    gen.add_argument("--lm", default="")
    gen.add_argument("--output", "-o")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="exhaustive engine-vs-oracle matrix")
    ver.add_argument("--only", help="run only cases whose label starts with this")
    ver.add_argument("--budget", type=int, default=10**7)
    ver.add_argument("--output", "-o")
    ver.set_defaults(func=cmd_verify)

    val = sub.add_parser("validate", help="validate one message or a request/response pair")
    val.add_argument("--profile", default="http.profile")
    val.add_argument("--message", required=True)
    val.add_argument("--paired", metavar="RESPONSE_FILE")
    val.add_argument("--json", action="store_true")
    val.set_defaults(func=cmd_validate)

    cor = sub.add_parser("corpus", help="batch-validate a labelled corpus")
    cor.add_argument("--dir", required=True)
    cor.add_argument("--labels", required=True)
    cor.add_argument("--profile", default="http.profile")
    cor.set_defaults(func=cmd_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (UsageError, ProfileError, GrammarSyntaxError, AbnfError) as exc:
        print(f"cflcheck: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
