from __future__ import annotations

import pytest

from cflcheck.abnf import OCTETS, AbnfError, abnf_to_grammar
from cflcheck.grammar import grammar_validate
from cflcheck.http.validate import data_dir


def accepted(text: str, words: list[str], start: str | None = None) -> list[str]:
    g = abnf_to_grammar(text, start=start)
    return [w for w in words if g.accepts(w)]


def test_repetition_forms():
    words = ["", "x", "xx", "xxx", "xxxx"]
    assert accepted('a = 2*3"x"', words) == ["xx", "xxx"]
    assert accepted('a = *"x"', words) == words
    assert accepted('a = 1*"x"', words) == words[1:]
    assert accepted('a = *2"x"', words) == ["", "x", "xx"]
    assert accepted('a = 3"x"', words) == ["xxx"]
    assert accepted('a = ["x"]', words) == ["", "x"]


def test_strings_are_case_insensitive_unless_marked():
    words = ["ab", "AB", "aB", "Ab"]
    assert accepted('a = "ab"', words) == words
    assert accepted('a = %s"ab"', words) == ["ab"]
    assert accepted('a = %i"ab"', words) == words


def test_numeric_values():
    words = ["A", "B", "C", "D", "\r\n"]
    assert accepted("a = %x41-43", words) == ["A", "B", "C"]
    assert accepted("a = %d65 / %b1000100", words) == ["A", "D"]
    assert accepted("a = %x0D.0A", words) == ["\r\n"]


def test_alternatives_groups_and_incremental():
    text = 'a = "x" ("y" / "z")\na =/ "q"\n'
    assert accepted(text, ["xy", "xz", "q", "x", "yz"]) == ["xy", "xz", "q"]


def test_core_rules_pulled_in_transitively():
    g = abnf_to_grammar("a = 1*HEXDIG CRLF")
    assert g.accepts("1f\r\n") and g.accepts("BEEF\r\n")
    assert not g.accepts("g\r\n")
    assert grammar_validate(g) == []
    assert OCTETS <= g.terminals


def test_rule_names_are_case_insensitive():
    assert accepted('Top = item\nITEM = "k"', ["k"]) == ["k"]


def test_comments_and_continuation_lines():
    text = 'a = "x" ; trailing comment\n    / "y"\n; whole-line comment\n'
    assert accepted(text, ["x", "y"]) == ["x", "y"]


def test_explicit_start():
    assert accepted('a = b "x"\nb = "y"', ["y", "yx"], start="b") == ["y"]
    with pytest.raises(AbnfError):
        abnf_to_grammar('a = "x"', start="zzz")


@pytest.mark.parametrize(
    "text, line",
    [
        ('a = "x"\nb = c\n', 2),
        ("a = <prose value>", 1),
        ('a = "x"\nb =/ "y"\n', 2),
        ('a = "x"\na = "y"\n', 2),
        ('a = "x" (', 1),
        ('a = 3*2"x"', 1),
        ("", 1),
    ],
)
def test_errors_carry_line(text, line):
    with pytest.raises(AbnfError) as info:
        abnf_to_grammar(text)
    assert info.value.line == line


def test_bundled_message_head_grammar():
    text = (data_dir() / "grammars" / "http-core.abnf").read_text()
    g = abnf_to_grammar(text)
    assert grammar_validate(g) == []
    assert g.accepts("GET / HTTP/1.1\r\nHost: example.com\r\n\r\n")
    assert g.accepts("HTTP/1.1 200 OK\r\nContent-Length: 0\r\n\r\n")
    assert not g.accepts("GET / HTTP/1.1\r\nHost : example.com\r\n\r\n")
