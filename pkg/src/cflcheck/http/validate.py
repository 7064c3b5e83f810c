from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from cflcheck.compose import Profile, ValidationReport, evaluate, load_profile_file
from cflcheck.http.extractors import EXTRACTORS
from cflcheck.http.message import HttpMessage, HttpSyntaxError, MessagePair, Unparsed, parse_http_message

BUNDLED_PROFILE = "http.profile"


def data_dir() -> Path:
    return Path(str(resources.files("cflcheck.http") / "data"))


def resolve_profile_path(name: str | Path) -> Path:
    """A bare ``http.profile`` that does not exist locally means the bundled one."""
    path = Path(name)
    if not path.exists() and str(name) == BUNDLED_PROFILE:
        return data_dir() / BUNDLED_PROFILE
    return path


@lru_cache(maxsize=8)
def _load(path: str) -> Profile:
    return load_profile_file(path, EXTRACTORS)


def load_http_profile(path: str | Path = BUNDLED_PROFILE) -> Profile:
    """Load a profile with the HTTP extractors available; loads are cached per path."""
    return _load(str(resolve_profile_path(path).resolve()))


def _subject(data: bytes) -> HttpMessage | Unparsed:
    try:
        return parse_http_message(data)
    except HttpSyntaxError as exc:
        return Unparsed(data, exc)


def validate_http(message: HttpMessage | MessagePair, profile: Profile | None = None) -> ValidationReport:
    profile = profile or load_http_profile()
    if isinstance(message, MessagePair):
        subjects = [message.request, message.response, message]
    else:
        subjects = [message]
    return evaluate(profile, subjects)


def validate_bytes(data: bytes, profile: Profile | None = None,
                   response: bytes | None = None) -> ValidationReport:
    """Parse and validate raw bytes; with ``response`` the two form a pair.

    Unparseable input is not an error here: it yields a failing
    message-syntax verdict.
    """
    profile = profile or load_http_profile()
    first = _subject(data)
    if response is None:
        return evaluate(profile, [first])
    second = _subject(response)
    subjects = [first, second]
    if isinstance(first, HttpMessage) and isinstance(second, HttpMessage):
        if first.kind == "request" and second.kind == "response":
            subjects.append(MessagePair(first, second))
    return evaluate(profile, subjects)
