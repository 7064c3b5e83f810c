"""Canonical-word extractors.

Each factory takes its profile parameters and returns a function from a
subject (an :class:`HttpMessage`, a :class:`MessagePair` or an
:class:`Unparsed`) to a word, ``None`` when the check does not apply, or
:class:`ExtractionError` when the field is present but unusable.

Extractors only reshape fields; every accept/reject decision about a
present field is left to the grammar or regex the word is fed to.
"""

from __future__ import annotations

import re
from typing import Callable

from cflcheck.compose import ExtractionError
from cflcheck.grammar import DOT, PAD, SHARP
from cflcheck.http.message import HttpMessage, MessagePair, Unparsed
from cflcheck.idioms import DIGIT_ORDER

Extractor = Callable[[object], "str | None"]


def _message(subject) -> HttpMessage | None:
    return subject if isinstance(subject, HttpMessage) else None


def head() -> Extractor:
    """Start line and header section, as latin-1 text, for the message grammar."""

    def run(subject):
        if isinstance(subject, Unparsed):
            raise ExtractionError(str(subject.error))
        m = _message(subject)
        return None if m is None else m.head.decode("latin-1")

    return run


def request_header_block(version: str = "HTTP/1.1") -> Extractor:
    """Header lines (each ending in CRLF) of requests with the given version."""

    def run(subject):
        m = _message(subject)
        if m is None or m.kind != "request" or m.version != version:
            return None
        return "".join(h.raw_line.decode("latin-1") + "\r\n" for h in m.headers)

    return run


def header_values(header: str) -> Extractor:
    """All values of one header joined by ``", "``; absent header does not apply."""

    def run(subject):
        m = _message(subject)
        if m is None or not m.has(header):
            return None
        return ", ".join(m.values(header))

    return run


def header_names() -> Extractor:
    def run(subject):
        m = _message(subject)
        return None if m is None else "\n".join(h.lname for h in m.headers)

    return run


def _bodyless_response(m: HttpMessage) -> bool:
    return m.kind == "response" and (m.status // 100 == 1 or m.status in (204, 304))


def content_length(width: int = 80) -> Extractor:
    """Reversed decimal digits padded to ``width``, then one dot per body byte."""

    def run(subject):
        m = _message(subject)
        if m is None or m.has("Transfer-Encoding") or _bodyless_response(m):
            return None
        vals = m.values("Content-Length")
        if not vals:
            return None
        if len(vals) > 1:
            raise ExtractionError(f"{len(vals)} Content-Length headers")
        digits = vals[0]
        if not digits.isascii() or not digits.isdigit():
            raise ExtractionError(f"Content-Length {digits!r} is not a decimal number")
        if len(digits) > width:
            raise ExtractionError(f"Content-Length longer than {width} digits")
        return digits[::-1].ljust(width, "0") + DOT * len(m.body)

    return run


def _is_chunked(m: HttpMessage) -> bool:
    codings = [c.strip().lower() for v in m.values("Transfer-Encoding") for c in v.split(",")]
    return bool(codings) and codings[-1] == "chunked"


def chunked(width: int = 8) -> Extractor:
    """One block per chunk: reversed lowercase hex size padded to ``width``,
    a dot per data byte, then the delimiter.  The body is split on CRLF, so
    chunk data containing CRLF cannot be represented and counts as
    misframed."""

    def run(subject):
        m = _message(subject)
        if m is None or not _is_chunked(m):
            return None
        pieces = m.body.split(b"\r\n")
        # size, data, size, data, ..., "0", "" (no trailers), "" (after final CRLF)
        if len(pieces) < 3 or pieces[-1] != b"" or pieces[-2] != b"" or len(pieces) % 2 == 0:
            raise ExtractionError("chunked body does not end with a last-chunk and CRLF")
        blocks = []
        sizes = pieces[0:-2:2]
        datas = pieces[1:-2:2] + [b""]
        for k, (size, data) in enumerate(zip(sizes, datas)):
            size = size.split(b";", 1)[0].decode("latin-1").lower()
            if not size or not re.fullmatch(r"[0-9a-f]+", size) or len(size) > width:
                raise ExtractionError(f"chunk {k}: bad size line {size!r}")
            last = k == len(sizes) - 1
            if last != (int(size, 16) == 0):
                raise ExtractionError(f"chunk {k}: zero-size chunk must come last and only last")
            blocks.append(size[::-1].ljust(width, "0") + DOT * len(data) + SHARP)
        return "".join(blocks)

    return run


def range_bounds(width: int = 16) -> Extractor:
    """``first`` and ``last`` of a single closed byte range, each left-padded to ``width``."""

    def run(subject):
        m = _message(subject)
        if m is None or m.kind != "request" or not m.has("Range"):
            return None
        value = m.get("Range")
        unit, eq, spec = value.partition("=")
        if not eq or unit.strip().lower() != "bytes":
            raise ExtractionError(f"unsupported Range {value!r}")
        if "," in spec:
            return None
        first, dash, last = spec.strip().partition("-")
        if not dash:
            raise ExtractionError(f"malformed byte range {spec!r}")
        if not first or not last:
            return None  # open or suffix range: nothing to order
        for num in (first, last):
            if not (num.isascii() and num.isdigit()):
                raise ExtractionError(f"malformed byte range {spec!r}")
            if len(num) > width:
                raise ExtractionError(f"range bound longer than {width} digits")
        pad = DIGIT_ORDER.minimum
        return first.rjust(width, pad) + last.rjust(width, pad)

    return run


_QUOTED = re.compile(r'"((?:[^"\\]|\\.)*)"')


def warning_date(width: int = 29) -> Extractor:
    """Date carried by the first Warning value that has one, then the Date
    header, each right-padded to ``width`` with the pad symbol."""

    def run(subject):
        m = _message(subject)
        if m is None:
            return None
        warn = None
        for v in m.values("Warning"):
            quoted = _QUOTED.findall(v)
            if len(quoted) >= 2:
                warn = quoted[1]
                break
        if warn is None:
            return None
        date = m.get("Date")
        if date is None:
            raise ExtractionError("Warning carries a date but Date is missing")
        if len(warn) > width or len(date) > width:
            raise ExtractionError(f"date longer than {width} characters")
        return warn.ljust(width, PAD) + date.ljust(width, PAD)

    return run


MONTHS = {m: i for i, m in enumerate(
    ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"], 1)}
_DAYS = r"(?:Mon|Tue|Wed|Thu|Fri|Sat|Sun)"
_LONG_DAYS = r"(?:Monday|Tuesday|Wednesday|Thursday|Friday|Saturday|Sunday)"
_TIME = r"(\d{2}):(\d{2}):(\d{2})"
_IMF = re.compile(rf"{_DAYS}, (\d{{2}}) ([A-Za-z]{{3}}) (\d{{4}}) {_TIME} GMT")
_RFC850 = re.compile(rf"{_LONG_DAYS}, (\d{{2}})-([A-Za-z]{{3}})-(\d{{2}}) {_TIME} GMT")
_ASCTIME = re.compile(rf"{_DAYS} ([A-Za-z]{{3}}) ([ \d]\d) {_TIME} (\d{{4}})")


def canonical_date(text: str) -> str:
    """``YYYYMMDDhhmmss`` from any of the three HTTP date formats."""
    if m := _IMF.fullmatch(text):
        day, mon, year, hh, mm, ss = m.groups()
    elif m := _RFC850.fullmatch(text):
        day, mon, yy, hh, mm, ss = m.groups()
        year = ("19" if int(yy) >= 70 else "20") + yy
    elif m := _ASCTIME.fullmatch(text):
        mon, day, hh, mm, ss, year = m.groups()
        day = day.replace(" ", "0")
    else:
        raise ExtractionError(f"unrecognized date {text!r}")
    month = MONTHS.get(mon.lower())
    if month is None:
        raise ExtractionError(f"unknown month {mon!r}")
    if not (1 <= int(day) <= 31 and int(hh) <= 23 and int(mm) <= 59 and int(ss) <= 60):
        raise ExtractionError(f"date field out of range in {text!r}")
    return f"{year}{month:02d}{day}{hh}{mm}{ss}"


def dates(first: str = "Last-Modified", second: str = "Date") -> Extractor:
    """Canonical ``first`` then canonical ``second``; applies when both are present."""

    def run(subject):
        m = _message(subject)
        if m is None:
            return None
        a, b = m.get(first), m.get(second)
        if a is None or b is None:
            return None
        return canonical_date(a) + canonical_date(b)

    return run


def upgrade(width: int = 32) -> Extractor:
    """Request and response Upgrade values of a 101 exchange, each padded to ``width``."""

    def run(subject):
        if not isinstance(subject, MessagePair) or subject.response.status != 101:
            return None
        req = ", ".join(subject.request.values("Upgrade"))
        resp = ", ".join(subject.response.values("Upgrade"))
        if len(req) > width or len(resp) > width:
            raise ExtractionError(f"Upgrade value longer than {width} characters")
        return req.ljust(width, PAD) + resp.ljust(width, PAD)

    return run


def version(supported: str = "11") -> Extractor:
    """Major and minor version digits followed by the highest supported version."""

    def run(subject):
        m = _message(subject)
        if m is None:
            return None
        return m.version[5] + m.version[7] + supported

    return run


EXTRACTORS: dict[str, Callable[..., Extractor]] = {
    "head": head,
    "request-header-block": request_header_block,
    "header-values": header_values,
    "header-names": header_names,
    "content-length": content_length,
    "chunked": chunked,
    "range": range_bounds,
    "warning-date": warning_date,
    "dates": dates,
    "upgrade": upgrade,
    "version": version,
}
