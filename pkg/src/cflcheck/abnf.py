"""Translate a practical subset of ABNF into a :class:`Grammar`.

Supported: ``=`` and ``=/`` definitions, ``/`` alternation, concatenation,
``*``, ``n*m`` and ``nX`` repetition, ``[ ]`` options, ``( )`` groups,
case-insensitive ``"..."`` strings, ``%x`` / ``%d`` / ``%b`` values with
``-`` ranges and ``.`` concatenation, ``;`` comments, indented continuation
lines and the standard core rules (ALPHA, DIGIT, CRLF, ...).  Prose values
(``<...>``) are rejected.

Values are octets, so the resulting grammar's terminal alphabet is all 256
latin-1 characters: a stray byte is simply not derived rather than being an
alphabet error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from cflcheck.grammar import Grammar, Rule, Var

CORE_RULES = """
ALPHA  = %x41-5A / %x61-7A
BIT    = "0" / "1"
CHAR   = %x01-7F
CR     = %x0D
CRLF   = CR LF
CTL    = %x00-1F / %x7F
DIGIT  = %x30-39
DQUOTE = %x22
HEXDIG = DIGIT / "A" / "B" / "C" / "D" / "E" / "F"
HTAB   = %x09
LF     = %x0A
LWSP   = *(WSP / CRLF WSP)
OCTET  = %x00-FF
SP     = %x20
VCHAR  = %x21-7E
WSP    = SP / HTAB
"""

OCTETS = frozenset(chr(c) for c in range(256))
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9-]*")


class AbnfError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# -- syntax tree -----------------------------------------------------------------


@dataclass(frozen=True)
class _Ref:
    name: str


@dataclass(frozen=True)
class _Str:
    text: str
    case_sensitive: bool


@dataclass(frozen=True)
class _Range:
    lo: int
    hi: int


@dataclass(frozen=True)
class _Seq:
    items: tuple


@dataclass(frozen=True)
class _Alt:
    items: tuple


@dataclass(frozen=True)
class _Rep:
    item: object
    min: int
    max: int | None


def _logical_lines(text: str) -> list[tuple[int, str]]:
    """Join continuation lines and strip comments; returns (line number, text)."""
    out: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if not out:
                raise AbnfError("continuation line before any rule", lineno)
            out[-1] = (out[-1][0], out[-1][1] + " " + line.strip())
        else:
            out.append((lineno, line))
    return out


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == ";" and not in_quote:
            return line[:i]
    return line


class _Parser:
    def __init__(self, text: str, line: int):
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, msg: str) -> AbnfError:
        return AbnfError(f"{msg} (column {self.pos + 1})", self.line)

    def ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def alternation(self):
        items = [self.concatenation()]
        while self.peek() == "/":
            self.pos += 1
            items.append(self.concatenation())
        return items[0] if len(items) == 1 else _Alt(tuple(items))

    def concatenation(self):
        items = [self.repetition()]
        while self.peek() not in ("", "/", ")", "]"):
            items.append(self.repetition())
        return items[0] if len(items) == 1 else _Seq(tuple(items))

    def repetition(self):
        self.ws()
        m = re.compile(r"(\d*)(\*)(\d*)|(\d+)").match(self.text, self.pos)
        if m and m.group(0):
            self.pos = m.end()
            if m.group(4):
                lo = hi = int(m.group(4))
            else:
                lo = int(m.group(1)) if m.group(1) else 0
                hi = int(m.group(3)) if m.group(3) else None
            if hi is not None and hi < lo:
                raise self.error(f"repetition {m.group(0)} has max below min")
            return _Rep(self.element(), lo, hi)
        return self.element()

    def element(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.alternation()
            if self.peek() != ")":
                raise self.error("missing ')'")
            self.pos += 1
            return inner
        if ch == "[":
            self.pos += 1
            inner = self.alternation()
            if self.peek() != "]":
                raise self.error("missing ']'")
            self.pos += 1
            return _Rep(inner, 0, 1)
        if ch == '"':
            end = self.text.find('"', self.pos + 1)
            if end < 0:
                raise self.error("unterminated string")
            s = self.text[self.pos + 1 : end]
            self.pos = end + 1
            return _Str(s, False)
        if ch == "%":
            return self.num_val()
        if ch == "<":
            raise self.error("prose values are not supported")
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error(f"unexpected {ch!r}" if ch else "unexpected end of rule")
        self.pos = m.end()
        return _Ref(m.group(0))

    def num_val(self):
        self.pos += 1
        base_ch = self.text[self.pos : self.pos + 1].lower()
        bases = {"x": (16, "[0-9A-Fa-f]+"), "d": (10, "[0-9]+"), "b": (2, "[01]+")}
        if base_ch == "s" or base_ch == "i":
            # RFC 7405 %s"..." / %i"..."
            self.pos += 1
            if self.text[self.pos : self.pos + 1] != '"':
                raise self.error("expected string after %s/%i")
            node = self.element()
            return _Str(node.text, base_ch == "s")
        if base_ch not in bases:
            raise self.error("expected x, d or b after '%'")
        base, digits = bases[base_ch]
        self.pos += 1
        num = re.compile(digits)

        def number() -> int:
            m = num.match(self.text, self.pos)
            if not m:
                raise self.error("malformed numeric value")
            self.pos = m.end()
            return int(m.group(0), base)

        first = number()
        nxt = self.text[self.pos : self.pos + 1]
        if nxt == "-":
            self.pos += 1
            hi = number()
            if hi < first:
                raise self.error("reversed range")
            return _Range(first, hi)
        values = [first]
        while self.text[self.pos : self.pos + 1] == ".":
            self.pos += 1
            values.append(number())
        return _Str("".join(chr(v) for v in values), True)


def _parse_rules(text: str, origin: str = "") -> list[tuple[str, str, object, int]]:
    """Returns (name, operator, body, line) per definition."""
    defs = []
    for lineno, line in _logical_lines(text):
        m = re.match(r"\s*([A-Za-z][A-Za-z0-9-]*)\s*(=/|=)", line)
        if not m:
            raise AbnfError(f"expected 'name =' {origin}".rstrip(), lineno)
        p = _Parser(line, lineno)
        p.pos = m.end()
        body = p.alternation()
        if p.peek():
            raise p.error(f"unexpected {p.peek()!r}")
        defs.append((m.group(1), m.group(2), body, lineno))
    return defs


# -- translation ------------------------------------------------------------------


class _Translator:
    def __init__(self, names: dict[str, str]):
        self.names = names  # lowercased name -> canonical spelling
        self.rules: list[Rule] = []
        self.classes: dict[tuple[int, int], Var] = {}
        self.fresh: dict[str, int] = {}

    def new_var(self, owner: str, tag: str) -> Var:
        k = self.fresh.get(owner, 0) + 1
        self.fresh[owner] = k
        return Var(f"{owner}.{tag}{k}")

    def char_class(self, lo: int, hi: int) -> Var:
        v = self.classes.get((lo, hi))
        if v is None:
            v = Var(f"x{lo:02X}" if lo == hi else f"x{lo:02X}-{hi:02X}")
            self.classes[(lo, hi)] = v
            self.rules += [Rule(v.name, (chr(c),)) for c in range(lo, hi + 1)]
        return v

    def symbols(self, node, owner: str) -> tuple:
        """A symbol string deriving exactly the language of ``node``."""
        if isinstance(node, _Ref):
            return (Var(self.names[node.name.lower()]),)
        if isinstance(node, _Str):
            out = []
            for ch in node.text:
                if node.case_sensitive or ch.lower() == ch.upper():
                    out.append(ch)
                else:
                    lo, up = ord(ch.lower()), ord(ch.upper())
                    v = self.classes.get(("ci", lo))
                    if v is None:
                        v = Var(f"ci.{ch.lower()}")
                        self.classes[("ci", lo)] = v
                        self.rules += [Rule(v.name, (chr(lo),)), Rule(v.name, (chr(up),))]
                    out.append(v)
            return tuple(out)
        if isinstance(node, _Range):
            return (self.char_class(node.lo, node.hi),)
        if isinstance(node, _Seq):
            return tuple(s for item in node.items for s in self.symbols(item, owner))
        if isinstance(node, _Alt):
            v = self.new_var(owner, "g")
            for item in node.items:
                self.rules.append(Rule(v.name, self.symbols(item, owner)))
            return (v,)
        if isinstance(node, _Rep):
            body = self.symbols(node.item, owner)
            head = body * node.min
            if node.max is None:
                star = self.new_var(owner, "r")
                self.rules += [Rule(star.name, ()), Rule(star.name, (star,) + body)]
                return head + (star,)
            extra = node.max - node.min
            if extra == 0:
                return head
            # O_k derives between 0 and k copies
            prev = None
            for _ in range(extra):
                opt = self.new_var(owner, "o")
                self.rules.append(Rule(opt.name, ()))
                self.rules.append(Rule(opt.name, body + ((prev,) if prev else ())))
                prev = opt
            return head + (prev,)
        raise TypeError(node)


def abnf_to_grammar(text: str, start: str | None = None, name: str = "") -> Grammar:
    """Translate ABNF rules; the start symbol defaults to the first rule."""
    defs = _parse_rules(text)
    if not defs:
        raise AbnfError("no rules", 1)
    names: dict[str, str] = {}
    bodies: dict[str, list] = {}
    for rname, op, body, line in defs:
        key = rname.lower()
        if op == "=":
            if key in bodies:
                raise AbnfError(f"rule {rname!r} defined twice (use =/ to extend)", line)
            names[key] = rname
            bodies[key] = [(body, line)]
        else:
            if key not in bodies:
                raise AbnfError(f"incremental alternative for undefined rule {rname!r}", line)
            bodies[key].append((body, line))

    core = {n.lower(): (n, b) for n, _, b, _ in _parse_rules(CORE_RULES)}
    # pull in core rules that are referenced but not defined, transitively
    pending = [b for bs in bodies.values() for b, _ in bs]
    while pending:
        for ref in _refs(pending.pop()):
            key = ref.lower()
            if key not in bodies and key in core:
                cname, cbody = core[key]
                names[key] = cname
                bodies[key] = [(cbody, 0)]
                pending.append(cbody)

    for bs in bodies.values():
        for b, line in bs:
            for ref in _refs(b):
                if ref.lower() not in names:
                    raise AbnfError(f"undefined rule {ref!r}", line)
    t = _Translator(names)
    for key, bs in bodies.items():
        owner = names[key]
        for body, _ in bs:
            alts = body.items if isinstance(body, _Alt) else (body,)
            for alt in alts:
                t.rules.append(Rule(owner, t.symbols(alt, owner)))
    if start is None:
        start = defs[0][0]
    elif start.lower() not in names:
        raise AbnfError(f"start rule {start!r} is not defined", 1)
    start = names[start.lower()]
    terms = OCTETS | {s for r in t.rules for s in r.rhs if isinstance(s, str)}
    return Grammar.build(t.rules, start=start, terminals=terms, name=name)


def _refs(node) -> list[str]:
    if isinstance(node, _Ref):
        return [node.name]
    if isinstance(node, (_Seq, _Alt)):
        return [r for item in node.items for r in _refs(item)]
    if isinstance(node, _Rep):
        return _refs(node.item)
    return []
