"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (shown even
under output capture) before asserting, so a full run lists every
outcome in order.
"""
from __future__ import annotations

import contextlib
import io
import random
import time

import pytest

from cflcheck.cli import main, read_labels, run_corpus
from cflcheck.grammar import SHARP, grammar_size
from cflcheck.http import HttpSyntaxError, load_http_profile, parse_http_message
from cflcheck.http.extractors import canonical_date
from cflcheck.http.validate import data_dir
from cflcheck.idioms import (
    DIGIT_ORDER,
    LenParams,
    date_compare_validator,
    eq_validator,
    gen_chunk,
    gen_len,
    leq_validator,
)
from cflcheck.oracle import run_matrix, run_residuals

CORPUS = data_dir() / "corpus"


@pytest.fixture
def announce(capsys):
    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number} {title}: {'PASS' if ok else 'FAIL'} ({detail})")

    return emit


def test_criterion_1_rule_counts(announce):
    t0 = time.perf_counter()
    wrong, chunk_wrong = [], []
    for n in range(1, 33):
        rules = len(gen_len(LenParams(n, 2, "abc")).rules)
        if rules != 3 * n + 2 + 3:
            wrong.append((n, rules, 3 * n + 2 + 3))
        chunk = len(gen_chunk(LenParams(n, 2, "abc", delimiter=SHARP)).rules)
        if chunk != rules + 2:
            chunk_wrong.append(n)
    elapsed = time.perf_counter() - t0
    ok = not wrong and not chunk_wrong and elapsed < 1.0
    detail = f"{len(wrong)}/32 widths off the 3n+5 count"
    if wrong:
        n, got, want = wrong[0]
        detail += f", e.g. n={n}: {got} rules vs {want}"
    detail += f"; chunk adds 2: {'yes' if not chunk_wrong else 'no'}; {elapsed:.3f}s"
    announce(1, "rule counts", ok, detail)
    assert not chunk_wrong
    assert elapsed < 1.0
    assert not wrong, detail


def test_criterion_2_oracle_equivalence(announce):
    summary = run_matrix()
    bad = [r["case"] for r in summary["cases"] if not r["agree"]]
    ok = summary["agree"] and summary["seconds"] < 60
    announce(2, "oracle equivalence", ok,
             f"{len(summary['cases'])} cases, {summary['words_checked']} words, "
             f"{len(bad)} disagreeing, {summary['seconds']:.1f}s")
    for row in summary["cases"]:
        assert row["words_checked"] <= 10**7
    assert not bad, bad
    assert summary["seconds"] < 60


def test_criterion_3_dfa_blowup(announce):
    t0 = time.perf_counter()
    rows = run_residuals((1, 2, 3), base=2)
    residual_ok = all(r["residuals"] >= 2 ** r["n"] for r in rows)
    sizes = {n: grammar_size(gen_len(LenParams(n, 2, "abc"))) for n in range(1, 33)}
    slack = 16
    linear = sizes[16] <= 2 * sizes[8] + slack
    steps = {sizes[n + 1] - sizes[n] for n in range(1, 32)}
    elapsed = time.perf_counter() - t0
    ok = residual_ok and linear and len(steps) == 1 and elapsed < 30
    announce(3, "DFA blowup", ok,
             f"residuals {[r['residuals'] for r in rows]}, size(8)={sizes[8]} size(16)={sizes[16]}, "
             f"{elapsed:.2f}s")
    assert residual_ok
    assert linear and len(steps) == 1
    assert elapsed < 30


def _pad_leq(x: str, y: str) -> bool:
    width = max(len(x), len(y))
    return x.rjust(width, "0") <= y.rjust(width, "0")


def test_criterion_4_leq_formula(announce):
    v = leq_validator(2, DIGIT_ORDER)
    mismatches = []
    for k in range(10**4):
        w = f"{k:04d}"
        if v.accepts(w) != _pad_leq(w[:2], w[2:]):
            mismatches.append(w)
    announce(4, "leq formula", not mismatches, f"10000 words, {len(mismatches)} mismatches")
    assert not mismatches


def test_criterion_5_worked_examples(announce):
    checks = {
        "110abc in len(3)": gen_len(LenParams(3, 2, "abc")).accepts("110abc"),
        "05 <= 21": leq_validator(2, DIGIT_ORDER).accepts("05" + "21"),
        "21 <= 05 rejected": not leq_validator(2, DIGIT_ORDER).accepts("21" + "05"),
        "2833 <= 7026": leq_validator(4, DIGIT_ORDER).accepts("2833" + "7026"),
        "h2ch2c equal": eq_validator(3, "ch2").accepts("h2ch2c"),
        "Last-Modified before Date": date_compare_validator().accepts(
            canonical_date("Wed, 24 Feb 2016 15:23:38 GMT") + canonical_date("Tue, 29 Mar 2016 09:05:57 GMT")),
        "Date before Last-Modified rejected": not date_compare_validator().accepts(
            canonical_date("Tue, 29 Mar 2016 09:05:57 GMT") + canonical_date("Wed, 24 Feb 2016 15:23:38 GMT")),
    }
    failed = [k for k, v in checks.items() if not v]
    announce(5, "worked examples", not failed, f"{len(checks) - len(failed)}/{len(checks)} reproduce")
    assert not failed, failed


def test_criterion_6_http_corpus(announce):
    labels = read_labels(str(CORPUS / "labels.csv"))
    profile = load_http_profile()
    summary = run_corpus(CORPUS, labels, profile)
    messages = {p for name, _ in labels for p in name.split("+")}
    required = {"post47.http", "chunked-hex.http", "chunked-decimal-sizes.http", "upgrade-req.http",
                "upgrade-resp.http", "range-2833-7026.http", "not-modified-dated.http", "warning-date-stale.http"}
    ok = (not summary["disagree"] and summary["seconds"] < 10 and len(messages) >= 40
          and required <= messages)
    announce(6, "HTTP corpus", ok,
             f"{summary['agree']}/{summary['total']} entries agree over {len(messages)} messages, "
             f"{summary['seconds']:.2f}s")
    assert required <= messages
    assert len(messages) >= 40
    assert not summary["disagree"], summary["disagree"]
    assert summary["seconds"] < 10


def test_criterion_7_round_trip(announce):
    files = sorted(CORPUS.glob("*.http"))
    differ, unparsed = [], []
    for path in files:
        data = path.read_bytes()
        try:
            m = parse_http_message(data)
        except HttpSyntaxError:
            unparsed.append(path.name)
            continue
        if m.to_bytes() != data:
            differ.append(path.name)
    # only deliberately malformed messages may fail structural parsing
    stray = [n for n in unparsed if not n.startswith("syntax-")]
    ok = not differ and not stray
    announce(7, "round trip", ok,
             f"{len(files) - len(unparsed)} parsed files identical, {len(unparsed)} malformed by design")
    assert not differ, differ
    assert not stray, stray


def _mutate(data: bytes, rng: random.Random) -> bytes:
    buf = bytearray(data)
    for _ in range(rng.randint(1, 4)):
        op = rng.randrange(5)
        pos = rng.randrange(len(buf) + 1)
        if op == 0 and buf:
            buf[min(pos, len(buf) - 1)] = rng.randrange(256)
        elif op == 1:
            buf[pos:pos] = bytes([rng.choice(b"\r\n:; \t0123456789,\"\x00\xff")])
        elif op == 2:
            del buf[pos:pos + rng.randint(1, 8)]
        elif op == 3:
            buf = buf[:pos]
        else:
            seg = buf[pos:pos + rng.randint(1, 16)]
            buf[pos:pos] = seg
    return bytes(buf)


def test_criterion_8_fuzz_smoke(announce, tmp_path):
    seeds = [p.read_bytes() for p in sorted(CORPUS.glob("*.http"))]
    rng = random.Random(8)
    target = tmp_path / "mutant.http"
    codes = {0: 0, 1: 0, 2: 0}
    crashes = []
    runs = 10**5
    t0 = time.perf_counter()
    for k in range(runs):
        target.write_bytes(_mutate(rng.choice(seeds), rng))
        try:
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                code = main(["validate", "--message", str(target)])
        except Exception as exc:  # any escape is a crash
            crashes.append((k, repr(exc)))
            continue
        if code not in codes:
            crashes.append((k, f"exit {code}"))
        else:
            codes[code] += 1
    elapsed = time.perf_counter() - t0
    announce(8, "fuzz smoke", not crashes,
             f"{runs} runs, exits {codes}, {len(crashes)} crashes, {elapsed:.0f}s")
    assert not crashes, crashes[:5]
