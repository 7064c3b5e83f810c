"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from cflcheck.grammar import Grammar, Var
from cflcheck.regex import Alt, Cat, Cls, Lit, Rep

# -- regex by Brzozowski derivatives -----------------------------------------------
# Nodes are the parser's AST plus two extras: NULL (empty language) and EPS.

NULL = ("null",)
EPS = ("eps",)


def _nullable(r) -> bool:
    if r is NULL:
        return False
    if r is EPS:
        return True
    if isinstance(r, (Lit, Cls)):
        return False
    if isinstance(r, Cat):
        return all(_nullable(i) for i in r.items)
    if isinstance(r, Alt):
        return any(_nullable(i) for i in r.items)
    if isinstance(r, Rep):
        return r.min == 0 or _nullable(r.item)
    raise TypeError(r)


def _deriv(r, ch):
    if r is NULL or r is EPS:
        return NULL
    if isinstance(r, Lit):
        return EPS if r.ch == ch else NULL
    if isinstance(r, Cls):
        return EPS if r.matches(ch) else NULL
    if isinstance(r, Alt):
        return Alt(tuple(_deriv(i, ch) for i in r.items))
    if isinstance(r, Cat):
        if not r.items:
            return NULL
        head, rest = r.items[0], Cat(r.items[1:])
        first = Cat((_deriv(head, ch), rest))
        if _nullable(head):
            return Alt((first, _deriv(rest, ch)))
        return first
    if isinstance(r, Rep):
        if r.max == 0:
            return NULL
        lo = max(r.min - 1, 0)
        hi = None if r.max is None else r.max - 1
        return Cat((_deriv(r.item, ch), Rep(r.item, lo, hi)))
    raise TypeError(r)


def _simplify(r):
    if isinstance(r, Cat):
        items = [_simplify(i) for i in r.items]
        if any(i is NULL for i in items):
            return NULL
        items = [i for i in items if i is not EPS]
        if not items:
            return EPS
        return items[0] if len(items) == 1 else Cat(tuple(items))
    if isinstance(r, Alt):
        items = []
        for i in (_simplify(i) for i in r.items):
            if i is not NULL and i not in items:
                items.append(i)
        if not items:
            return NULL
        return items[0] if len(items) == 1 else Alt(tuple(items))
    return r


def derivative_match(ast, word: str) -> bool:
    r = ast
    for ch in word:
        r = _simplify(_deriv(r, ch))
        if r is NULL:
            return False
    return _nullable(r)


# -- CFG by bounded fixpoint ---------------------------------------------------------


def bounded_language(g: Grammar, max_len: int) -> frozenset[str]:
    """Every word of length <= max_len derivable from the start variable.

    Computes, for all variables at once, the least fixpoint of the rule
    equations with every set truncated at ``max_len``.
    """
    lang: dict[str, set[str]] = {v: set() for v in g.variables}
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            words = {""}
            for s in r.rhs:
                part = lang[s.name] if isinstance(s, Var) else {s}
                words = {a + b for a in words for b in part if len(a) + len(b) <= max_len}
                if not words:
                    break
            before = len(lang[r.lhs])
            lang[r.lhs] |= words
            changed |= len(lang[r.lhs]) != before
    return frozenset(lang[g.start])


def all_words(alphabet: str, max_len: int):
    for k in range(max_len + 1):
        for t in product(alphabet, repeat=k):
            yield "".join(t)


@lru_cache(maxsize=None)
def chunk_walk(body: bytes) -> bool:
    """Hand-written chunked-body walker: read a hex size line, consume exactly
    that many bytes and a CRLF, stop after the zero chunk and final CRLF."""
    pos = 0
    while True:
        eol = body.find(b"\r\n", pos)
        if eol < 0:
            return False
        size_text = body[pos:eol].split(b";", 1)[0]
        try:
            size = int(size_text, 16)
        except ValueError:
            return False
        if not size_text or any(c not in b"0123456789abcdefABCDEF" for c in size_text):
            return False
        pos = eol + 2
        if size == 0:
            return body[pos:] == b"\r\n"
        if body[pos + size : pos + size + 2] != b"\r\n":
            return False
        pos += size + 2
