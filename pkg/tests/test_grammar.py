from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cflcheck.earley import AlphabetError, cfg_membership, intersect_membership
from cflcheck.grammar import (
    DOT,
    PAD,
    SHARP,
    Grammar,
    GrammarSyntaxError,
    Rule,
    Var,
    finite_language,
    format_grammar,
    grammar_size,
    grammar_validate,
    parse_grammar,
    word_from_bytes,
)
from reference import all_words, bounded_language

ANBN = """
S -> 'a' S 'b'
S ->
"""


def test_parse_and_accept_anbn():
    g = parse_grammar(ANBN)
    assert g.start == "S"
    for k in range(6):
        assert g.accepts("a" * k + "b" * k)
    assert not g.accepts("aab")
    assert not g.accepts("ba")


def test_size_counts_lhs_plus_rhs():
    g = parse_grammar(ANBN)
    assert grammar_size(g) == 4 + 1
    assert Rule("S", ()).size == 1


def test_format_round_trip_with_reserved_symbols():
    g = Grammar.build([Rule("S", (Var("A"), SHARP)), Rule("A", (DOT, "\r", "'")), Rule("A", (PAD,))])
    text = format_grammar(g)
    assert "<sharp>" in text and "<dot>" in text and "<pad>" in text
    back = parse_grammar(text)
    assert set(back.rules) == set(g.rules)
    assert back.start == g.start


def test_start_and_terminals_headers():
    g = parse_grammar("%start Z\n%terminals 'q'\nZ -> 'a'\n")
    assert g.start == "Z"
    assert "q" in g.terminals
    assert not g.accepts("q")


def test_syntax_error_reports_line():
    with pytest.raises(GrammarSyntaxError) as info:
        parse_grammar("S -> 'a'\nS => 'b'\n")
    assert info.value.line == 2


def test_validate_reports_undeclared_variable():
    g = Grammar.build([Rule("S", (Var("X"),))])
    diags = grammar_validate(g)
    assert any("unknown-variable X" in d for d in diags)


def test_validate_clean_grammar():
    assert grammar_validate(parse_grammar(ANBN)) == []


def test_out_of_alphabet_symbol_raises():
    g = parse_grammar(ANBN)
    with pytest.raises(AlphabetError) as info:
        cfg_membership(g, "abc")
    assert info.value.position == 2


def test_empty_word_and_unit_cycles():
    g = parse_grammar("S -> A\nA -> S\nA -> 'x'\nS ->\n")
    assert g.accepts("")
    assert g.accepts("x")
    assert not g.accepts("xx")


def test_ambiguous_grammar():
    g = parse_grammar("E -> E '+' E\nE -> 'n'\n")
    assert g.accepts("n+n+n+n")
    assert not g.accepts("n++n")


def test_nullable_chain_in_middle():
    g = parse_grammar("S -> 'a' A B 'b'\nA ->\nA -> 'x'\nB -> A A\n")
    for w in ("ab", "axb", "axxb", "axxxb"):
        assert g.accepts(w), w
    assert not g.accepts("axxxxb")


def test_finite_language():
    g = finite_language(["", "ab", "b"])
    assert {w for w in all_words("ab", 3) if g.accepts(w)} == {"", "ab", "b"}


def test_intersection_membership():
    g1 = parse_grammar("S -> 'a' S\nS -> 'b' S\nS ->\n")
    g2 = parse_grammar("S -> 'a' 'b' S\nS ->\n")
    assert intersect_membership([g1, g2], "abab")
    assert not intersect_membership([g1, g2], "aab")


def test_word_from_bytes_is_latin1():
    assert word_from_bytes(b"\x00\xff") == "\x00\xff"


def test_renamed_keeps_language():
    g = parse_grammar(ANBN)
    r = g.renamed("p.")
    assert r.start == "p.S"
    assert all(r.accepts(w) == g.accepts(w) for w in all_words("ab", 6))


def test_chart_feed_and_rewind():
    g = parse_grammar(ANBN)
    chart = g.recognizer.chart()
    for ch in "aab":
        chart.feed(ch)
    assert not chart.accepting and chart.alive
    chart.feed("b")
    assert chart.accepting
    chart.rewind(1)
    assert len(chart) == 1
    chart.feed("b")
    assert chart.accepting
    chart.feed("b")
    assert not chart.alive


# Random small grammars: Earley agrees with the bounded fixpoint on every short word.

_sym = st.one_of(st.sampled_from(["a", "b"]), st.sampled_from([Var("S"), Var("A"), Var("B")]))
_rule = st.builds(lambda lhs, rhs: Rule(lhs, tuple(rhs)), st.sampled_from(["S", "A", "B"]),
                  st.lists(_sym, max_size=3))


@settings(max_examples=150, deadline=None)
@given(st.lists(_rule, min_size=1, max_size=7))
def test_earley_matches_fixpoint(rules):
    g = Grammar.build(rules, start="S", terminals={"a", "b"})
    if grammar_validate(g):
        # make every referenced variable defined so the fixpoint is well-formed
        defined = {r.lhs for r in rules}
        extra = [Rule(v, ("b",)) for v in "SAB" if v not in defined]
        g = Grammar.build(rules + extra, start="S", terminals={"a", "b"})
    expected = bounded_language(g, 5)
    for w in all_words("ab", 5):
        assert g.accepts(w) == (w in expected), (format_grammar(g), w)


def test_variable_without_rules_derives_nothing():
    g = Grammar.build([Rule("S", (Var("X"), "a")), Rule("S", ("b",))])
    assert g.accepts("b")
    assert not g.accepts("a")
