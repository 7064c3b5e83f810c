"""Context-free grammars over byte-or-abstract alphabets.

A terminal is a one-character ``str``.  Bytes 0-255 map to the code points
U+0000-U+00FF (latin-1), and the handful of abstract symbols used by the
idiom languages live in the private-use area so they can never collide with
payload bytes.  Variables are :class:`Var` instances, which keeps the two
namespaces disjoint even when a variable is named like a terminal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

SHARP = "\ue000"
DOT = "\ue001"
PAD = "\ue002"

ABSTRACT_NAMES = {SHARP: "sharp", DOT: "dot", PAD: "pad"}
ABSTRACT_BY_NAME = {name: sym for sym, name in ABSTRACT_NAMES.items()}


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Symbol = Union[str, Var]


def is_terminal_char(ch: str) -> bool:
    return len(ch) == 1 and (ord(ch) < 256 or ch in ABSTRACT_NAMES)


def word_from_bytes(data: bytes) -> str:
    return data.decode("latin-1")


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[Symbol, ...] = ()

    @property
    def size(self) -> int:
        return 1 + len(self.rhs)

    def __str__(self) -> str:
        body = " ".join(format_symbol(s) for s in self.rhs)
        return f"{self.lhs} -> {body}".rstrip()


@dataclass(frozen=True)
class Grammar:
    """A grammar ``(V, terminals, start, rules)``.

    ``terminals`` is the declared alphabet; it may contain symbols no rule
    mentions, which matters for membership (such symbols are legal input
    but never derivable).
    """

    variables: frozenset[str]
    terminals: frozenset[str]
    start: str
    rules: tuple[Rule, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def build(
        cls,
        rules: Iterable[tuple[str, Sequence[Symbol]] | Rule],
        start: str | None = None,
        terminals: Iterable[str] | None = None,
        name: str = "",
    ) -> Grammar:
        """Assemble a grammar, inferring variables and (optionally) terminals."""
        rule_list = [r if isinstance(r, Rule) else Rule(r[0], tuple(r[1])) for r in rules]
        if start is None:
            if not rule_list:
                raise ValueError("cannot infer start variable of an empty grammar")
            start = rule_list[0].lhs
        # variables are declared by appearing on a left-hand side
        variables = {start} | {r.lhs for r in rule_list}
        inferred_terms = {s for r in rule_list for s in r.rhs if not isinstance(s, Var)}
        terms = frozenset(terminals) if terminals is not None else frozenset(inferred_terms)
        return cls(frozenset(variables), terms, start, tuple(rule_list), name)

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def size(self) -> int:
        return grammar_size(self)

    @cached_property
    def recognizer(self):
        from cflcheck.earley import Recognizer

        return Recognizer(self)

    def accepts(self, word: str) -> bool:
        return self.recognizer.accepts(word)

    def to_text(self) -> str:
        return format_grammar(self)

    def renamed(self, prefix: str) -> Grammar:
        """Copy with every variable prefixed, for capture-free embedding."""

        def ren(s: Symbol) -> Symbol:
            return Var(prefix + s.name) if isinstance(s, Var) else s

        return Grammar(
            frozenset(prefix + v for v in self.variables),
            self.terminals,
            prefix + self.start,
            tuple(Rule(prefix + r.lhs, tuple(ren(s) for s in r.rhs)) for r in self.rules),
            self.name,
        )


def grammar_size(g: Grammar) -> int:
    return sum(1 + len(r.rhs) for r in g.rules)


def grammar_validate(g: Grammar) -> list[str]:
    """Return one diagnostic per violated grammar invariant; empty means valid."""
    diags = []
    if g.start not in g.variables:
        diags.append(f"start-not-a-variable {g.start}")
    for t in sorted(g.terminals):
        if not is_terminal_char(t):
            diags.append(f"bad-terminal {t!r}")
    uses_terminals = False
    for idx, r in enumerate(g.rules):
        if r.lhs not in g.variables:
            diags.append(f"unknown-variable {r.lhs} (lhs of rule {idx})")
        for s in r.rhs:
            if isinstance(s, Var):
                if s.name not in g.variables:
                    diags.append(f"unknown-variable {s.name} (rule {idx})")
            else:
                uses_terminals = True
                if g.terminals and s not in g.terminals:
                    diags.append(f"unknown-terminal {format_symbol(s)} (rule {idx})")
    if uses_terminals and not g.terminals:
        diags.append("empty-terminal-set")
    return diags


def finite_language(words: Iterable[str], start: str = "S", terminals: Iterable[str] | None = None) -> Grammar:
    """Grammar with one rule per word; the empty word gives ``start ->``."""
    words = sorted(set(words))
    terms = set(terminals) if terminals is not None else {c for w in words for c in w}
    return Grammar(
        frozenset({start}),
        frozenset(terms),
        start,
        tuple(Rule(start, tuple(w)) for w in words),
    )


# -- text format -------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_TOKEN = re.compile(r"\s*(?:'((?:\\x[0-9A-Fa-f]{2}|\\.|[^'\\]))'|<([a-z]+)>|([A-Za-z_][A-Za-z0-9_.\-]*))")


class GrammarSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\", "'": "'"}


def format_symbol(s: Symbol) -> str:
    if isinstance(s, Var):
        return s.name
    if s in ABSTRACT_NAMES:
        return f"<{ABSTRACT_NAMES[s]}>"
    if s == "'" or s == "\\":
        return f"'\\{s}'"
    if 0x21 <= ord(s) <= 0x7E:
        return f"'{s}'"
    return f"'\\x{ord(s):02x}'"


def format_grammar(g: Grammar) -> str:
    lines = []
    if g.name:
        lines.append(f"# {g.name}")
    if not g.rules or g.rules[0].lhs != g.start:
        lines.append(f"%start {g.start}")
    used = {s for r in g.rules for s in r.rhs if not isinstance(s, Var)}
    extra = sorted(g.terminals - used)
    if extra:
        lines.append("%terminals " + " ".join(format_symbol(t) for t in extra))
    lines.extend(str(r) for r in g.rules)
    return "\n".join(lines) + "\n"


def _parse_terminal(body: str, lineno: int) -> str:
    if body.startswith("\\x"):
        return chr(int(body[2:], 16))
    if body.startswith("\\"):
        if body[1] not in _ESCAPES:
            raise GrammarSyntaxError(f"unknown escape {body!r}", lineno)
        return _ESCAPES[body[1]]
    return body


def _parse_symbols(text: str, lineno: int) -> list[Symbol]:
    out: list[Symbol] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GrammarSyntaxError(f"cannot read symbol at {text[pos:]!r}", lineno)
        term, abstract, ident = m.groups()
        if term is not None:
            out.append(_parse_terminal(term, lineno))
        elif abstract is not None:
            if abstract not in ABSTRACT_BY_NAME:
                raise GrammarSyntaxError(f"unknown abstract symbol <{abstract}>", lineno)
            out.append(ABSTRACT_BY_NAME[abstract])
        else:
            out.append(Var(ident))
        pos = m.end()
        if pos < len(text) and not text[pos].isspace():
            raise GrammarSyntaxError(f"symbols must be separated by spaces near {text[pos:]!r}", lineno)
    return out


def parse_grammar(text: str, name: str = "") -> Grammar:
    """Read the one-rule-per-line format (``LHS -> sym sym ...``)."""
    start = None
    rules: list[Rule] = []
    extra_terms: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%start"):
            parts = line.split()
            if len(parts) != 2 or not _IDENT.fullmatch(parts[1]):
                raise GrammarSyntaxError("malformed %start header", lineno)
            start = parts[1]
            continue
        if line.startswith("%terminals"):
            extra_terms.extend(s for s in _parse_symbols(line[len("%terminals"):], lineno) if isinstance(s, str))
            continue
        lhs, sep, rhs = line.partition("->")
        lhs = lhs.strip()
        if not sep:
            raise GrammarSyntaxError("expected '->'", lineno)
        if not _IDENT.fullmatch(lhs):
            raise GrammarSyntaxError(f"bad variable name {lhs!r}", lineno)
        rules.append(Rule(lhs, tuple(_parse_symbols(rhs, lineno))))
    if start is None:
        if not rules:
            raise GrammarSyntaxError("grammar has no rules and no %start", 0)
        start = rules[0].lhs
    g = Grammar.build(rules, start=start, name=name)
    if extra_terms:
        g = Grammar(g.variables, g.terminals | frozenset(extra_terms), g.start, g.rules, g.name)
    return g
