"""Anchored regular expressions matched by a lazily built DFA.

Matching is always full-word: a pattern that should match "anywhere" must
say so with explicit ``.*`` padding.  Patterns compile to a Thompson NFA;
DFA states (sets of NFA states) are discovered on demand and memoized, so
each input symbol costs one dictionary lookup once a transition is known.

Syntax: literals, ``.`` (any symbol), ``[...]`` / ``[^...]`` classes with
ranges, grouping, ``|``, ``* + ?`` and ``{m}``, ``{m,}``, ``{m,n}``.
Escapes: ``\\r \\n \\t \\xHH \\uHHHH \\d`` and backslash before any
metacharacter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

META = set("\\|()[]*+?.{}")


@dataclass(frozen=True)
class Lit:
    ch: str


@dataclass(frozen=True)
class Cls:
    chars: frozenset[str]
    negated: bool = False

    def matches(self, ch: str) -> bool:
        return (ch in self.chars) != self.negated


@dataclass(frozen=True)
class Cat:
    items: tuple


@dataclass(frozen=True)
class Alt:
    items: tuple


@dataclass(frozen=True)
class Rep:
    item: object
    min: int = 0
    max: int | None = None


Node = Union[Lit, Cls, Cat, Alt, Rep]
ANY = Cls(frozenset(), negated=True)
EMPTY = Cat(())


class RegexSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self) -> str:
        if self.pos >= len(self.text):
            raise RegexSyntaxError("unexpected end of pattern", self.pos)
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def parse(self) -> Node:
        node = self.alt()
        if self.pos != len(self.text):
            raise RegexSyntaxError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return node

    def alt(self) -> Node:
        branches = [self.cat()]
        while self.peek() == "|":
            self.pos += 1
            branches.append(self.cat())
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def cat(self) -> Node:
        items = []
        while self.peek() is not None and self.peek() not in "|)":
            items.append(self.repeat())
        return items[0] if len(items) == 1 else Cat(tuple(items))

    def repeat(self) -> Node:
        node = self.atom()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                node = Rep(node, 0, None)
            elif ch == "+":
                self.pos += 1
                node = Rep(node, 1, None)
            elif ch == "?":
                self.pos += 1
                node = Rep(node, 0, 1)
            elif ch == "{":
                node = Rep(node, *self.braces())
            else:
                return node

    def braces(self) -> tuple[int, int | None]:
        start = self.pos
        end = self.text.find("}", start)
        if end < 0:
            raise RegexSyntaxError("unterminated '{'", start)
        body = self.text[start + 1 : end]
        lo, comma, hi = body.partition(",")
        try:
            mn = int(lo)
            mx = (int(hi) if hi else None) if comma else mn
        except ValueError:
            raise RegexSyntaxError(f"bad repetition {{{body}}}", start) from None
        if mx is not None and mx < mn:
            raise RegexSyntaxError(f"bad repetition {{{body}}}", start)
        self.pos = end + 1
        return mn, mx

    def atom(self) -> Node:
        start = self.pos
        ch = self.take()
        if ch == "(":
            node = self.alt()
            if self.peek() != ")":
                raise RegexSyntaxError("missing ')'", start)
            self.pos += 1
            return node
        if ch == "[":
            return self.char_class(start)
        if ch == ".":
            return ANY
        if ch == "\\":
            return self.escape()
        if ch in META:
            raise RegexSyntaxError(f"unexpected {ch!r}", start)
        return Lit(ch)

    def escape(self) -> Node:
        ch = self.take()
        if ch == "d":
            return Cls(frozenset("0123456789"))
        return Lit(self._escaped_char(ch))

    def _escaped_char(self, ch: str) -> str:
        simple = {"r": "\r", "n": "\n", "t": "\t", "f": "\f", "v": "\v", "0": "\0"}
        if ch in simple:
            return simple[ch]
        if ch in "xu":
            width = 2 if ch == "x" else 4
            digits = self.text[self.pos : self.pos + width]
            if len(digits) != width or any(c not in "0123456789abcdefABCDEF" for c in digits):
                raise RegexSyntaxError(f"bad \\{ch} escape", self.pos)
            self.pos += width
            return chr(int(digits, 16))
        if ch.isalnum():
            raise RegexSyntaxError(f"unknown escape \\{ch}", self.pos - 1)
        return ch

    def char_class(self, start: int) -> Node:
        negated = False
        if self.peek() == "^":
            negated = True
            self.pos += 1
        chars: set[str] = set()
        first = True
        while True:
            ch = self.take()
            if ch == "]" and not first:
                break
            first = False
            if ch == "\\":
                esc = self.take()
                if esc == "d":
                    chars.update("0123456789")
                    continue
                ch = self._escaped_char(esc)
            if self.peek() == "-" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] != "]":
                self.pos += 1
                hi = self.take()
                if hi == "\\":
                    hi = self._escaped_char(self.take())
                if ord(hi) < ord(ch):
                    raise RegexSyntaxError("reversed range in class", start)
                chars.update(chr(c) for c in range(ord(ch), ord(hi) + 1))
            else:
                chars.add(ch)
        return Cls(frozenset(chars), negated)


def parse_regex(text: str) -> Node:
    return _Parser(text).parse()


def _fmt_char(ch: str, in_class: bool = False) -> str:
    special = set("\\]^-[") if in_class else META
    if ch in special:
        return "\\" + ch
    o = ord(ch)
    if 0x20 <= o <= 0x7E:
        return ch
    return f"\\x{o:02x}" if o < 256 else f"\\u{o:04x}"


def format_regex(node: Node) -> str:
    """Pattern text for ``node``; parsing it back gives the same language."""
    if isinstance(node, Lit):
        return _fmt_char(node.ch)
    if isinstance(node, Cls):
        if node == ANY:
            return "."
        body = "".join(_fmt_char(c, True) for c in sorted(node.chars))
        if not body and not node.negated:
            return "[^\\x00-\\uffff]"
        return "[" + ("^" if node.negated else "") + body + "]"
    if isinstance(node, Alt):
        return "(" + "|".join(format_regex(b) for b in node.items) + ")"
    if isinstance(node, Cat):
        return "(" + "".join(format_regex(i) for i in node.items) + ")" if node.items else "()"
    if isinstance(node, Rep):
        inner = format_regex(node.item)
        if not isinstance(node.item, (Lit, Cls)) and not inner.startswith("("):
            inner = f"({inner})"
        if (node.min, node.max) == (0, None):
            q = "*"
        elif (node.min, node.max) == (1, None):
            q = "+"
        elif (node.min, node.max) == (0, 1):
            q = "?"
        elif node.max is None:
            q = f"{{{node.min},}}"
        else:
            q = f"{{{node.min},{node.max}}}"
        return inner + q
    raise TypeError(node)


class _NFA:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.edge: list[tuple[object, int] | None] = []

    def state(self) -> int:
        self.eps.append([])
        self.edge.append(None)
        return len(self.eps) - 1

    def build(self, node: Node) -> tuple[int, int]:
        if isinstance(node, (Lit, Cls)):
            a, b = self.state(), self.state()
            self.edge[a] = (node, b)
            return a, b
        if isinstance(node, Cat):
            a = self.state()
            cur = a
            for item in node.items:
                s, e = self.build(item)
                self.eps[cur].append(s)
                cur = e
            return a, cur
        if isinstance(node, Alt):
            a, b = self.state(), self.state()
            for item in node.items:
                s, e = self.build(item)
                self.eps[a].append(s)
                self.eps[e].append(b)
            return a, b
        if isinstance(node, Rep):
            a = self.state()
            cur = a
            for _ in range(node.min):
                s, e = self.build(node.item)
                self.eps[cur].append(s)
                cur = e
            end = self.state()
            if node.max is None:
                s, e = self.build(node.item)
                self.eps[cur].extend((s, end))
                self.eps[e].extend((s, end))
            else:
                self.eps[cur].append(end)
                for _ in range(node.max - node.min):
                    s, e = self.build(node.item)
                    self.eps[cur].append(s)
                    self.eps[e].append(end)
                    cur = e
            return a, end
        raise TypeError(node)

    def closure(self, states) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            for t in self.eps[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)


class Regex:
    """A compiled pattern.  The DFA transition memo only ever grows and every
    entry is a pure function of its key, so concurrent use is safe."""

    def __init__(self, pattern: str | Node):
        if isinstance(pattern, str):
            self.pattern = pattern
            self.ast = parse_regex(pattern)
        else:
            self.ast = pattern
            self.pattern = format_regex(pattern)
        self._nfa = _NFA()
        start, self._final = self._nfa.build(self.ast)
        self._states: list[frozenset[int]] = []
        self._index: dict[frozenset[int], int] = {}
        self._accepting: list[bool] = []
        self._delta: list[dict[str, int]] = []
        self._start = self._intern(self._nfa.closure([start]))
        self._dead = self._intern(frozenset())

    def _intern(self, states: frozenset[int]) -> int:
        idx = self._index.get(states)
        if idx is None:
            self._states.append(states)
            self._accepting.append(self._final in states)
            self._delta.append({})
            idx = len(self._states) - 1
            self._index[states] = idx
        return idx

    def _move(self, d: int, ch: str) -> int:
        nxt = []
        edge = self._nfa.edge
        for s in self._states[d]:
            e = edge[s]
            if e is not None:
                pred, target = e
                if (pred.ch == ch) if isinstance(pred, Lit) else pred.matches(ch):
                    nxt.append(target)
        t = self._intern(self._nfa.closure(nxt))
        self._delta[d][ch] = t
        return t

    def match(self, word: str) -> bool:
        d = self._start
        dead = self._dead
        delta = self._delta
        for ch in word:
            t = delta[d].get(ch)
            d = self._move(d, ch) if t is None else t
            if d == dead:
                return False
        return self._accepting[d]

    def __repr__(self) -> str:
        return f"Regex({self.pattern!r})"


def regex_match(r: Regex | str, w: str) -> bool:
    """Full-word match of ``w`` against ``r``."""
    if not isinstance(r, Regex):
        r = Regex(r)
    return r.match(w)
