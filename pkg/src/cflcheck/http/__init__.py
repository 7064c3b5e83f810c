from cflcheck.http.message import Header, HttpMessage, HttpSyntaxError, MessagePair, parse_http_message
from cflcheck.http.validate import load_http_profile, validate_bytes, validate_http

__all__ = [
    "Header",
    "HttpMessage",
    "HttpSyntaxError",
    "MessagePair",
    "load_http_profile",
    "parse_http_message",
    "validate_bytes",
    "validate_http",
]
