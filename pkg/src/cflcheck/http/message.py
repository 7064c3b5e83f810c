"""Structural HTTP/1.1 message parsing.

The parse only splits the message into start line, header lines and body,
enforcing CRLF framing exactly.  Fine-grained syntax (token characters,
field-value octets, request-target shape) is checked separately by running
the head through the message grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CRLF = b"\r\n"

_VERSION = re.compile(rb"HTTP/(\d)\.(\d)")
_STATUS = re.compile(rb"\d{3}")


class HttpSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.reason = message
        self.offset = offset


@dataclass(frozen=True)
class Header:
    name: str
    value: str  # latin-1, surrounding whitespace removed
    raw_line: bytes

    @property
    def lname(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class HttpMessage:
    raw: bytes
    kind: str  # "request" | "response"
    start_line: tuple[str, str, str]  # (method, target, version) or (version, status, reason)
    start_raw: bytes
    headers: tuple[Header, ...]
    body: bytes

    @property
    def version(self) -> str:
        return self.start_line[2] if self.kind == "request" else self.start_line[0]

    @property
    def status(self) -> int | None:
        return int(self.start_line[1]) if self.kind == "response" else None

    @property
    def head(self) -> bytes:
        return self.raw[: len(self.raw) - len(self.body)]

    def values(self, name: str) -> list[str]:
        key = name.lower()
        return [h.value for h in self.headers if h.lname == key]

    def get(self, name: str) -> str | None:
        vals = self.values(name)
        return vals[0] if vals else None

    def has(self, name: str) -> bool:
        return bool(self.values(name))

    def to_bytes(self) -> bytes:
        out = [self.start_raw, CRLF]
        for h in self.headers:
            out += [h.raw_line, CRLF]
        out += [CRLF, self.body]
        return b"".join(out)


@dataclass(frozen=True)
class MessagePair:
    request: HttpMessage
    response: HttpMessage

    def __post_init__(self):
        if self.request.kind != "request" or self.response.kind != "response":
            raise ValueError("pair needs a request then a response")


@dataclass(frozen=True)
class Unparsed:
    """Bytes that failed structural parsing; carried so the syntax atom can report why."""

    raw: bytes
    error: HttpSyntaxError = field(compare=False)


def _check_line_endings(data: bytes, end: int) -> None:
    for m in re.finditer(rb"\r(?!\n)|(?<!\r)\n", data[:end]):
        what = "bare CR" if data[m.start()] == 0x0D else "bare LF"
        raise HttpSyntaxError(what, m.start())


def _parse_start_line(line: bytes) -> tuple[str, tuple[str, str, str]]:
    text = line.decode("latin-1")
    if line.startswith(b"HTTP/"):
        parts = line.split(b" ", 2)
        if len(parts) != 3:
            raise HttpSyntaxError("malformed status line", 0)
        version, status, _ = parts
        if not _VERSION.fullmatch(version):
            raise HttpSyntaxError("malformed HTTP version", 0)
        if not _STATUS.fullmatch(status):
            raise HttpSyntaxError("malformed status code", len(version) + 1)
        return "response", tuple(text.split(" ", 2))
    parts = line.split(b" ")
    if len(parts) != 3 or not all(parts):
        raise HttpSyntaxError("malformed request line", 0)
    if not _VERSION.fullmatch(parts[2]):
        raise HttpSyntaxError("malformed HTTP version", len(parts[0]) + len(parts[1]) + 2)
    return "request", tuple(text.split(" "))


def parse_http_message(data: bytes) -> HttpMessage:
    if not data:
        raise HttpSyntaxError("empty message", 0)
    end = data.find(b"\r\n\r\n")
    if end < 0:
        _check_line_endings(data, len(data))
        raise HttpSyntaxError("missing CRLFCRLF after header section", len(data))
    _check_line_endings(data, end + 4)
    lines = data[:end].split(CRLF)
    start_raw = lines[0]
    kind, start = _parse_start_line(start_raw)
    headers = []
    offset = len(start_raw) + 2
    for raw in lines[1:]:
        if raw[:1] in (b" ", b"\t"):
            raise HttpSyntaxError("obsolete line folding", offset)
        colon = raw.find(b":")
        if colon < 0:
            raise HttpSyntaxError(f"header line without ':' ({raw[:40].decode('latin-1')!r})", offset)
        name = raw[:colon]
        if not name or re.search(rb"[ \t]", name):
            raise HttpSyntaxError("malformed header name", offset)
        value = raw[colon + 1 :].strip(b" \t").decode("latin-1")
        headers.append(Header(name.decode("latin-1"), value, raw))
        offset += len(raw) + 2
    body = data[end + 4 :]
    return HttpMessage(data, kind, start, start_raw, tuple(headers), body)
