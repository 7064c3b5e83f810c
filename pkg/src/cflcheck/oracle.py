"""Reference semantics for the idiom languages, straight from their set
definitions, plus exhaustive engine-versus-oracle comparison.

The membership functions here never touch grammars; they split the word the
way the definition does and check the arithmetic, equality or order
condition directly.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

from cflcheck.compose import AtomRef, Combination, eval_expr
from cflcheck.grammar import SHARP, Grammar, finite_language
from cflcheck.idioms import (GeneralEqParams, LenParams, OrderSpec, digit_alphabet, eq_validator, gen_chunk,
                             gen_len, general_eq_validator, leq_validator)

DEFAULT_BUDGET = 10**7


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class IdiomSpec:
    """Which idiom language, with its parameters.

    ``kind`` is one of ``len``, ``len-delim``, ``chunk``, ``eq``, ``leq``,
    ``general-eq`` or a single component (``eq-component``,
    ``leq-component``, ``general-eq-component``, which use ``i``).  For
    ``leq`` kinds ``alphabet`` lists symbols least first.  Fillers are
    finite languages.
    """

    kind: str
    n: int
    base: int = 2
    body: str = "a"
    msd_first: bool = False
    alphabet: str = ""
    i: int = 0
    fm: frozenset[str] = frozenset({""})
    mm: frozenset[str] = frozenset({""})
    lm: frozenset[str] = frozenset({""})
    delimiter: str = SHARP

    @cached_property
    def symbols(self) -> str:
        """The full alphabet, sorted by code point."""
        if self.kind in ("len", "len-delim", "chunk"):
            syms = set(digit_alphabet(self.base)) | set(self.body)
            if self.kind != "len":
                syms.add(self.delimiter)
        elif self.kind.startswith("general-eq"):
            syms = set(self.alphabet) | {c for lang in (self.fm, self.mm, self.lm) for w in lang for c in w}
        else:
            syms = set(self.alphabet)
        return "".join(sorted(syms))

    @cached_property
    def symbol_set(self) -> frozenset[str]:
        return frozenset(self.symbols)

    @cached_property
    def digits(self) -> str:
        return digit_alphabet(self.base)


# -- definitions ---------------------------------------------------------------------


def _value(x: str, digits: str, base: int, msd_first: bool) -> int:
    vals = [digits.index(c) for c in x]
    if msd_first:
        vals.reverse()
    return sum(v * base**i for i, v in enumerate(vals))


def _in_len(w: str, s: IdiomSpec) -> bool:
    digits = s.digits
    x, rest = w[: s.n], w[s.n :]
    if len(x) < s.n or any(c not in digits for c in x) or any(c not in s.body for c in rest):
        return False
    return len(rest) == _value(x, digits, s.base, s.msd_first)


def _in_len_delim(w: str, s: IdiomSpec) -> bool:
    if len(w) <= s.n or w[s.n] != s.delimiter:
        return False
    return _in_len(w[: s.n] + w[s.n + 1 :], s) and s.delimiter not in w[s.n + 1 :]


def _in_chunk(w: str, s: IdiomSpec) -> bool:
    pieces = w.split(s.delimiter)
    if len(pieces) < 2 or pieces[-1] != "":
        return False
    return all(_in_len(p, s) for p in pieces[:-1])


def _halves(w: str, n: int) -> tuple[str, str] | None:
    if len(w) != 2 * n:
        return None
    return w[:n], w[n:]


def _lex_leq(x: str, y: str, order: str) -> bool:
    for a, b in zip(x, y):
        if a != b:
            return order.index(a) <= order.index(b)
    return True


def _in_general_eq(w: str, s: IdiomSpec, i: int | None) -> bool:
    """``w0 x w1 y1 ... wk yk w_{k+1} z``; with ``i`` set, blocks only need to
    agree at position ``i``."""
    n = s.n
    first = w[:n]
    if len(first) < n or any(c not in s.alphabet for c in first):
        return False

    def same(block: str) -> bool:
        if len(block) != n or any(c not in s.alphabet for c in block):
            return False
        return block == first if i is None else block[i - 1] == first[i - 1]

    @lru_cache(maxsize=None)
    def after_block(p: int) -> bool:
        # the rest is z, or y w (rest)
        if w[p:] in s.lm:
            return True
        return any(w[p:q] in s.mm and same(w[q : q + n]) and after_block(q + n) for q in range(p, len(w) - n + 1))

    return any(w[n:q] in s.fm and same(w[q : q + n]) and after_block(q + n) for q in range(n, len(w) - n + 1))


def oracle_membership(spec: IdiomSpec, w: str) -> bool:
    syms = spec.symbol_set
    if not syms.issuperset(w):
        pos = next(i for i, ch in enumerate(w) if ch not in syms)
        raise ValueError(f"symbol {w[pos]!r} at position {pos} is outside the alphabet")
    kind = spec.kind
    if kind == "len":
        return _in_len(w, spec)
    if kind == "len-delim":
        return _in_len_delim(w, spec)
    if kind == "chunk":
        return _in_chunk(w, spec)
    if kind == "general-eq":
        return _in_general_eq(w, spec, None)
    if kind == "general-eq-component":
        return _in_general_eq(w, spec, spec.i)
    halves = _halves(w, spec.n)
    if halves is None:
        return False
    x, y = halves
    if kind == "eq":
        return x == y
    if kind == "leq":
        return _lex_leq(x, y, spec.alphabet)
    if kind == "eq-component":
        return x[spec.i - 1] == y[spec.i - 1]
    if kind == "leq-component":
        return spec.alphabet.index(x[spec.i - 1]) <= spec.alphabet.index(y[spec.i - 1])
    raise ValueError(f"unknown idiom kind {kind!r}")


# -- exhaustive comparison ------------------------------------------------------------


@dataclass(frozen=True)
class EquivReport:
    agree: bool
    words_checked: int
    max_len: int
    counterexample: str | None = None
    engine: bool | None = None
    oracle: bool | None = None

    def to_json(self) -> dict:
        d = {"agree": self.agree, "words_checked": self.words_checked, "max_len": self.max_len}
        if self.counterexample is not None:
            d.update(counterexample=self.counterexample, engine=self.engine, oracle=self.oracle)
        return d


def word_count(alphabet_size: int, max_len: int) -> int:
    return sum(alphabet_size**k for k in range(max_len + 1))


def feasible_max_len(alphabet_size: int, target: int, budget: int = DEFAULT_BUDGET) -> int:
    """Largest length ``<= target`` whose full enumeration fits the budget."""
    length = target
    while length > 0 and word_count(alphabet_size, length) > budget:
        length -= 1
    return length


def exhaustive_equiv(spec: IdiomSpec, validator: Grammar | Combination, max_len: int,
                     budget: int = DEFAULT_BUDGET) -> EquivReport:
    """Compare engine and oracle on every word of length ``<= max_len``.

    Words are visited in lexicographic (code point) order and the first
    disagreement is reported, so the counterexample is the least one.
    Engine charts are shared along prefixes; once every chart is dead the
    engine verdict is fixed for the whole subtree and only the oracle runs.
    """
    alphabet = spec.symbols
    if word_count(len(alphabet), max_len) > budget:
        raise EnumerationBudgetExceeded(
            f"{word_count(len(alphabet), max_len)} words over {len(alphabet)} symbols exceeds budget {budget}")
    combo = validator if isinstance(validator, Combination) else Combination(AtomRef("g"), {"g": validator})
    ids = list(combo.languages)
    charts = [combo.languages[a].recognizer.chart() for a in ids]

    def engine_value() -> bool:
        return eval_expr(combo.expr, {a: c.accepting for a, c in zip(ids, charts)})

    dead_value = eval_expr(combo.expr, {a: False for a in ids})
    checked = 0
    found: list[tuple[str, bool, bool]] = []

    def dead_subtree(prefix: str, remaining: int) -> None:
        nonlocal checked
        best = None
        for length in range(1, remaining + 1):
            for tail in itertools.product(alphabet, repeat=length):
                w = prefix + "".join(tail)
                checked += 1
                got = oracle_membership(spec, w)
                if got != dead_value:
                    if best is None or w < best[0]:
                        best = (w, dead_value, got)
                    break
        if best is not None:
            found.append(best)

    def visit(prefix: str, depth: int) -> bool:
        nonlocal checked
        checked += 1
        engine = engine_value()
        oracle = oracle_membership(spec, prefix)
        if engine != oracle:
            found.append((prefix, engine, oracle))
            return False
        if depth == max_len:
            return True
        if not any(c.alive for c in charts):
            dead_subtree(prefix, max_len - depth)
            return not found
        for ch in alphabet:
            for c in charts:
                c.feed(ch, strict=False)
            ok = visit(prefix + ch, depth + 1)
            for c in charts:
                c.rewind(depth)
            if not ok:
                return False
        return True

    visit("", 0)
    if found:
        w, engine, oracle = found[0]
        return EquivReport(False, checked, max_len, w, engine, oracle)
    return EquivReport(True, checked, max_len)


def residual_dfa_states(spec: IdiomSpec, probe_alphabet: str | None = None,
                        budget: int = DEFAULT_BUDGET) -> int:
    """Count Myhill-Nerode classes among the ``base**n`` digit prefixes.

    Two prefixes are separated when some probe suffix (length ``<= base**n``)
    is accepted after one and not the other.  By default probes range over
    the body alphabet (plus the delimiter for delimited fields), since a
    digit after a complete field is rejected for every prefix alike.
    """
    if spec.kind not in ("len", "len-delim"):
        raise ValueError("residual counting is defined for length-field languages")
    digits = digit_alphabet(spec.base)
    if probe_alphabet is None:
        probe_alphabet = spec.body + (spec.delimiter if spec.kind == "len-delim" else "")
    longest = spec.base**spec.n
    probes = word_count(len(probe_alphabet), longest)
    prefixes = spec.base**spec.n
    if probes * prefixes > budget:
        raise EnumerationBudgetExceeded(f"{probes} probes x {prefixes} prefixes exceeds budget {budget}")
    suffixes = ["".join(t) for k in range(longest + 1) for t in itertools.product(probe_alphabet, repeat=k)]
    signatures = set()
    for x in itertools.product(digits, repeat=spec.n):
        prefix = "".join(x)
        signatures.add(tuple(oracle_membership(spec, prefix + s) for s in suffixes))
    return len(signatures)


# -- desk-scale matrix -----------------------------------------------------------------


@dataclass(frozen=True)
class MatrixCase:
    label: str
    spec: IdiomSpec
    build: Callable[[], Grammar | Combination]


def _general_eq_case(n: int, fm: str, mm: str, lm: str) -> MatrixCase:
    spec = IdiomSpec("general-eq", n, alphabet="ab", fm=frozenset({fm}), mm=frozenset({mm}), lm=frozenset({lm}))
    params = GeneralEqParams(n, "ab", finite_language([fm]), finite_language([mm]), finite_language([lm]))
    return MatrixCase(f"general-eq n={n} fm={fm!r} mm={mm!r} lm={lm!r}", spec, lambda: general_eq_validator(params))


def desk_matrix() -> list[MatrixCase]:
    cases = []
    for n in (1, 2, 3):
        for b in (2, 3):
            cases.append(MatrixCase(f"len n={n} b={b}", IdiomSpec("len", n, base=b),
                                    lambda n=n, b=b: gen_len(LenParams(n, b, "a"))))
    for n in (1, 2):
        cases.append(MatrixCase(f"chunk n={n} b=2", IdiomSpec("chunk", n),
                                lambda n=n: gen_chunk(LenParams(n, 2, "a", delimiter=SHARP))))
    for n in (1, 2, 3):
        for sigma in ("a", "ab", "abc"):
            cases.append(MatrixCase(f"eq n={n} sigma={sigma}", IdiomSpec("eq", n, alphabet=sigma),
                                    lambda n=n, sigma=sigma: eq_validator(n, sigma)))
    for n in (1, 2, 3):
        for digits in ("01", "012"):
            cases.append(MatrixCase(f"leq n={n} order={digits}", IdiomSpec("leq", n, alphabet=digits),
                                    lambda n=n, digits=digits: leq_validator(n, OrderSpec(digits))))
    for n in (1, 2):
        for fm, mm, lm in (("", "", ""), ("a", "b", ""), ("b", "", "ab"), ("c", "c", "c")):
            cases.append(_general_eq_case(n, fm, mm, lm))
    return cases


def run_matrix(cases: list[MatrixCase] | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    """Exhaustive comparison over every case, each at length ``2n+6`` or the
    longest length that fits the budget."""
    t0 = time.perf_counter()
    rows = []
    for case in cases if cases is not None else desk_matrix():
        max_len = feasible_max_len(len(case.spec.symbols), 2 * case.spec.n + 6, budget)
        t = time.perf_counter()
        report = exhaustive_equiv(case.spec, case.build(), max_len, budget)
        row = {"case": case.label, **report.to_json(), "seconds": round(time.perf_counter() - t, 3)}
        rows.append(row)
    return {
        "agree": all(r["agree"] for r in rows),
        "cases": rows,
        "words_checked": sum(r["words_checked"] for r in rows),
        "seconds": round(time.perf_counter() - t0, 3),
    }


def run_residuals(widths=(1, 2, 3), base: int = 2) -> list[dict]:
    rows = []
    for n in widths:
        states = residual_dfa_states(IdiomSpec("len", n, base=base))
        rows.append({"n": n, "base": base, "residuals": states, "bound": base**n, "ok": states >= base**n})
    return rows
