"""Grammar constructions for protocol idioms.

Every generator returns plain data (a :class:`Grammar` or a
:class:`Combination`) that the recognizer consumes; nothing here decides
membership itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from cflcheck.compose import And, AtomRef, Combination, Not, Or
from cflcheck.grammar import ABSTRACT_BY_NAME, PAD, SHARP, Grammar, Rule, Var, finite_language, grammar_validate

DIGIT_SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"
DECIMAL = "0123456789"


def digit_alphabet(base: int) -> str:
    if not 2 <= base <= len(DIGIT_SYMBOLS):
        raise ValueError(f"base must be in 2..{len(DIGIT_SYMBOLS)}, got {base}")
    return DIGIT_SYMBOLS[:base]


@dataclass(frozen=True)
class LenParams:
    """A fixed-width length field: ``n`` digits in ``base`` then a body over
    ``body_alphabet`` whose length is the encoded number."""

    n: int
    base: int = 2
    body_alphabet: str = "a"
    msd_first: bool = False
    delimiter: str | None = None

    @property
    def digits(self) -> str:
        return digit_alphabet(self.base)

    def check(self) -> None:
        if self.n < 1:
            raise ValueError(f"field width must be positive, got {self.n}")
        digits = self.digits
        if not self.body_alphabet:
            raise ValueError("body alphabet must be nonempty")
        if self.delimiter is not None and (self.delimiter in digits or self.delimiter in self.body_alphabet):
            raise ValueError("delimiter must not occur in the digit or body alphabet")


@dataclass(frozen=True)
class OrderSpec:
    """Total order on an alphabet, least symbol first."""

    symbols: str

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("order needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("order lists a symbol twice")

    @property
    def minimum(self) -> str:
        return self.symbols[0]

    def rank(self, ch: str) -> int:
        idx = self.symbols.find(ch)
        if idx < 0:
            raise ValueError(f"symbol {ch!r} is not in the order")
        return idx


DIGIT_ORDER = OrderSpec(DECIMAL)


@dataclass(frozen=True)
class GeneralEqParams:
    """Blocks of width ``n`` repeated with filler languages between them:
    ``w fm w (mm w)* lm``."""

    n: int
    alphabet: str
    fm: Grammar = field(default_factory=lambda: finite_language([""]))
    mm: Grammar = field(default_factory=lambda: finite_language([""]))
    lm: Grammar = field(default_factory=lambda: finite_language([""]))


def _check_position(n: int, i: int) -> None:
    if n < 1:
        raise ValueError(f"width must be positive, got {n}")
    if not 1 <= i <= n:
        raise ValueError(f"position {i} outside 1..{n}")


def gen_len(p: LenParams) -> Grammar:
    """Linear-size grammar for a length field followed by its body.

    Variable ``F{j}`` derives exactly ``base**j`` body symbols; ``X{i}``
    reads digit ``i`` and appends ``d`` copies of the matching ``F``.
    """
    p.check()
    n, b, digits = p.n, p.base, p.digits
    T = lambda j: Var(f"F{j}")  # noqa: E731
    rules = [Rule("S", (Var("X0"),)), Rule(f"X{n}", (p.delimiter,) if p.delimiter else ())]
    for d in range(b):
        for i in range(n):
            weight = n - 1 - i if p.msd_first else i
            rules.append(Rule(f"X{i}", (digits[d], Var(f"X{i + 1}")) + (T(weight),) * d))
    for j in range(1, n):
        rules.append(Rule(f"F{j}", (T(j - 1),) * b))
    for c in p.body_alphabet:
        rules.append(Rule("F0", (c,)))
    terms = set(digits) | set(p.body_alphabet) | ({p.delimiter} if p.delimiter else set())
    name = f"len n={n} base={b}" + (" msd" if p.msd_first else "") + (" delimited" if p.delimiter else "")
    return Grammar.build(rules, start="S", terminals=terms, name=name)


def gen_chunk(p: LenParams) -> Grammar:
    """``(L_len(n) delimiter)+``: the length grammar under a fresh start ``Z``."""
    if p.delimiter is None:
        raise ValueError("chunked framing needs a delimiter")
    inner = gen_len(LenParams(p.n, p.base, p.body_alphabet, p.msd_first, None))
    if "Z" in inner.variables:
        raise ValueError("start variable Z already in use")
    sharp = p.delimiter
    rules = inner.rules + (Rule("Z", (Var("S"), sharp, Var("Z"))), Rule("Z", (Var("S"), sharp)))
    return Grammar.build(rules, start="Z", terminals=inner.terminals | {sharp},
                         name=f"chunk n={p.n} base={p.base}")


def gen_eq_component(n: int, i: int, alphabet: str) -> Grammar:
    """Words ``xy`` with ``|x| = |y| = n`` agreeing at position ``i``."""
    _check_position(n, i)
    T = Var("T")
    rules = [Rule("S", (T,) * (i - 1) + (c,) + (T,) * (n - 1) + (c,) + (T,) * (n - i)) for c in alphabet]
    rules += [Rule("T", (c,)) for c in alphabet]
    return Grammar.build(rules, start="S", terminals=alphabet, name=f"eq n={n} i={i}")


def gen_leq_component(n: int, i: int, order: OrderSpec) -> Grammar:
    """Words ``xy`` with ``x[i] <= y[i]`` in ``order``."""
    _check_position(n, i)
    T = Var("T")
    syms = order.symbols
    rules = [
        Rule("S", (T,) * (i - 1) + (a,) + (T,) * (n - 1) + (Var(f"T_{r}"),) + (T,) * (n - i))
        for r, a in enumerate(syms)
    ]
    for r in range(len(syms)):
        rules += [Rule(f"T_{r}", (c,)) for c in syms[r:]]
    rules += [Rule("T", (c,)) for c in syms]
    return Grammar.build(rules, start="S", terminals=syms, name=f"leq n={n} i={i}")


def eq_validator(n: int, alphabet: str) -> Combination:
    """Conjunction of the ``n`` positional equality grammars."""
    if n < 1:
        raise ValueError(f"width must be positive, got {n}")
    langs = {f"eq{i}": gen_eq_component(n, i, alphabet) for i in range(1, n + 1)}
    return Combination(And(tuple(AtomRef(a) for a in langs)), langs)


def leq_validator(n: int, order: OrderSpec) -> Combination:
    """``x <= y`` lexicographically: all positions equal, or the first
    difference at ``i`` goes the right way."""
    if n < 1:
        raise ValueError(f"width must be positive, got {n}")
    alphabet = order.symbols
    langs: dict[str, Grammar] = {}
    for i in range(1, n + 1):
        langs[f"eq{i}"] = gen_eq_component(n, i, alphabet)
    for i in range(1, n + 1):
        langs[f"leq{i}"] = gen_leq_component(n, i, order)
    eq = [AtomRef(f"eq{i}") for i in range(1, n + 1)]
    disjuncts = [And(tuple(eq))]
    for i in range(1, n + 1):
        disjuncts.append(And(tuple(eq[: i - 1]) + (Not(eq[i - 1]), AtomRef(f"leq{i}"))))
    return Combination(Or(tuple(disjuncts)), langs)


def pad_for_compare(x: str, y: str, order: OrderSpec) -> tuple[str, str]:
    """Left-pad the shorter word with the least symbol so both have equal length."""
    for ch in x + y:
        order.rank(ch)
    width = max(len(x), len(y))
    m = order.minimum
    return m * (width - len(x)) + x, m * (width - len(y)) + y


def gen_general_eq_component(p: GeneralEqParams, i: int) -> Grammar:
    """Blocks agree at position ``i`` across every repetition.

    One ``P{c}``/``Q{c}`` pair per symbol ``c`` carries the chosen symbol
    through all blocks.  ``S -> P F P L`` covers the case without middle
    blocks.
    """
    _check_position(p.n, i)
    if not p.alphabet:
        raise ValueError("alphabet must be nonempty")
    embedded = {}
    for tag, g in (("fm", p.fm), ("mm", p.mm), ("lm", p.lm)):
        diags = grammar_validate(g)
        if diags:
            raise ValueError(f"embedded {tag} grammar invalid: {'; '.join(diags)}")
        embedded[tag] = g.renamed(f"{tag}.")
    F, M, L = (Var(embedded[t].start) for t in ("fm", "mm", "lm"))
    T = Var("T")
    rules = []
    for k, c in enumerate(p.alphabet):
        P, Q = Var(f"P{k}"), Var(f"Q{k}")
        rules.append(Rule("S", (P, F, P, L)))
        rules.append(Rule("S", (P, F, Q, P, L)))
        rules.append(Rule(Q.name, (P, M, Q)))
        rules.append(Rule(Q.name, (P, M)))
        rules.append(Rule(P.name, (T,) * (i - 1) + (c,) + (T,) * (p.n - i)))
    rules += [Rule("T", (c,)) for c in p.alphabet]
    terms = set(p.alphabet)
    for g in embedded.values():
        rules += g.rules
        terms |= g.terminals
    return Grammar.build(rules, start="S", terminals=terms, name=f"general-eq n={p.n} i={i}")


def general_eq_validator(p: GeneralEqParams) -> Combination:
    """Conjunction of all block components.

    Exact when a word splits into blocks and fillers in only one way (for
    instance singleton fillers); with overlapping fillers each component
    may pick a different split, and the conjunction can over-accept.
    """
    if p.n < 1:
        raise ValueError(f"width must be positive, got {p.n}")
    langs = {f"geq{i}": gen_general_eq_component(p, i) for i in range(1, p.n + 1)}
    return Combination(And(tuple(AtomRef(a) for a in langs)), langs)


DATE_WIDTH = 14  # YYYYMMDDhhmmss


def date_compare_validator(fmt: str = "http-date") -> Combination:
    """Earlier-or-equal check over two canonical ``YYYYMMDDhhmmss`` stamps."""
    if fmt != "http-date":
        raise ValueError(f"unsupported date format {fmt!r}")
    return leq_validator(DATE_WIDTH, DIGIT_ORDER)


# -- declarative entry points used by profiles and the CLI ---------------------------


def _filler(words) -> Grammar:
    if isinstance(words, str):
        words = [words]
    return finite_language(words)


def _alphabet(spec: dict[str, Any]) -> str:
    alpha = spec.get("alphabet")
    if alpha == "printable":
        return "".join(chr(c) for c in range(0x20, 0x7F)) + PAD
    if alpha == "digits":
        return DECIMAL
    if not alpha:
        raise ValueError("alphabet required")
    return alpha


def generate(spec: dict[str, Any]) -> Grammar:
    """Build a grammar from a declarative description such as
    ``{"idiom": "len", "n": 80, "base": 10, "body": "<dot>"}``."""
    def sym(text: str) -> str:
        for name, ch in ABSTRACT_BY_NAME.items():
            text = text.replace(f"<{name}>", ch)
        return text

    kind = spec["idiom"]
    if kind in ("len", "len-delim", "chunk"):
        params = LenParams(
            n=int(spec["n"]),
            base=int(spec.get("base", 2)),
            body_alphabet=sym(spec.get("body", "a")),
            msd_first=bool(spec.get("msd_first", False)),
            delimiter=SHARP if kind != "len" else None,
        )
        return gen_chunk(params) if kind == "chunk" else gen_len(params)
    if kind == "eq":
        return gen_eq_component(int(spec["n"]), int(spec["i"]), sym(_alphabet(spec)))
    if kind == "leq":
        return gen_leq_component(int(spec["n"]), int(spec["i"]), OrderSpec(sym(_alphabet(spec))))
    if kind == "general-eq":
        p = GeneralEqParams(int(spec["n"]), sym(_alphabet(spec)), _filler(spec.get("fm", "")),
                            _filler(spec.get("mm", "")), _filler(spec.get("lm", "")))
        return gen_general_eq_component(p, int(spec["i"]))
    raise ValueError(f"unknown idiom {kind!r}")


def generate_validator(spec: dict[str, Any]) -> Combination:
    kind = spec["idiom"]
    if kind == "eq":
        return eq_validator(int(spec["n"]), _alphabet(spec))
    if kind == "leq":
        return leq_validator(int(spec["n"]), OrderSpec(_alphabet(spec)))
    if kind == "date":
        return date_compare_validator(spec.get("format", "http-date"))
    if kind == "general-eq":
        p = GeneralEqParams(int(spec["n"]), _alphabet(spec), _filler(spec.get("fm", "")),
                            _filler(spec.get("mm", "")), _filler(spec.get("lm", "")))
        return general_eq_validator(p)
    raise ValueError(f"unknown validator idiom {kind!r}")
