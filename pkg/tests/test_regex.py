from __future__ import annotations

import random

import pytest

from cflcheck.regex import Regex, RegexSyntaxError, format_regex, parse_regex, regex_match
from reference import all_words, derivative_match


@pytest.mark.parametrize(
    "pattern, yes, no",
    [
        ("abc", ["abc"], ["ab", "abcd", ""]),
        ("a|b", ["a", "b"], ["ab", ""]),
        ("a*", ["", "a", "aaaa"], ["b"]),
        ("(ab)+", ["ab", "abab"], ["", "aba"]),
        ("a{2,3}", ["aa", "aaa"], ["a", "aaaa"]),
        ("a{2}", ["aa"], ["a", "aaa"]),
        ("a{2,}", ["aa", "aaaaa"], ["a"]),
        ("[a-c]x", ["ax", "cx"], ["dx"]),
        ("[^a]", ["b", "\n"], ["a", ""]),
        (r"\d\d?", ["1", "42"], ["", "123", "a"]),
        (r"\x41\r\n", ["A\r\n"], ["A\n"]),
        (r"a\.b", ["a.b"], ["axb"]),
        (".*Host:.*", ["X\r\nHost: a"], ["host"]),
    ],
)
def test_examples(pattern, yes, no):
    r = Regex(pattern)
    for w in yes:
        assert r.match(w), (pattern, w)
    for w in no:
        assert not r.match(w), (pattern, w)


@pytest.mark.parametrize("bad", ["(", "a)", "[a", "*a", "a{3,1}", r"\q", "a{x}", "[z-a]"])
def test_syntax_errors(bad):
    with pytest.raises(RegexSyntaxError):
        parse_regex(bad)


def test_full_word_matching():
    assert not regex_match("b", "abc")
    assert regex_match(".*b.*", "abc")


def _random_pattern(rng: random.Random, depth: int = 0) -> str:
    if depth > 3 or rng.random() < 0.3:
        return rng.choice(["a", "b", "c", ".", "[ab]", "[^a]", "()"])
    kind = rng.randrange(4)
    if kind == 0:
        return _random_pattern(rng, depth + 1) + _random_pattern(rng, depth + 1)
    if kind == 1:
        return "(" + _random_pattern(rng, depth + 1) + "|" + _random_pattern(rng, depth + 1) + ")"
    inner = "(" + _random_pattern(rng, depth + 1) + ")"
    return inner + rng.choice(["*", "+", "?", "{2}", "{0,2}", "{1,}"])


def test_random_patterns_against_derivatives():
    rng = random.Random(20240601)
    words = list(all_words("abc", 4))
    cases = 0
    while cases < 10_000:
        pattern = _random_pattern(rng)
        ast = parse_regex(pattern)
        r = Regex(ast)
        for w in rng.sample(words, 40):
            assert r.match(w) == derivative_match(ast, w), (pattern, w)
            cases += 1


def test_format_round_trip_preserves_language():
    rng = random.Random(7)
    words = list(all_words("abc", 4))
    for _ in range(200):
        ast = parse_regex(_random_pattern(rng))
        again = Regex(format_regex(ast))
        original = Regex(ast)
        assert all(again.match(w) == original.match(w) for w in words)
