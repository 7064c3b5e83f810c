from __future__ import annotations

import pytest

from cflcheck.grammar import SHARP, Grammar
from cflcheck.idioms import LenParams, eq_validator, gen_chunk, gen_len
from cflcheck.oracle import (
    EnumerationBudgetExceeded,
    IdiomSpec,
    desk_matrix,
    exhaustive_equiv,
    feasible_max_len,
    oracle_membership,
    residual_dfa_states,
    word_count,
)
from reference import all_words


def test_oracle_examples():
    assert oracle_membership(IdiomSpec("len", 3, body="abc"), "110abc")
    assert not oracle_membership(IdiomSpec("len", 3, body="abc"), "110ab")
    chunk = IdiomSpec("chunk", 1, body="a")
    assert not oracle_membership(chunk, "")
    assert oracle_membership(chunk, "0" + SHARP)
    assert oracle_membership(chunk, "1" + SHARP + "a" + SHARP + "0" + SHARP) is False
    assert oracle_membership(chunk, "1a" + SHARP + "0" + SHARP)
    assert not oracle_membership(IdiomSpec("eq", 2, alphabet="ab"), "abba")
    assert oracle_membership(IdiomSpec("leq", 2, alphabet="0123456789"), "0521")


def test_oracle_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        oracle_membership(IdiomSpec("eq", 1, alphabet="ab"), "ac")


def test_word_counts():
    assert word_count(2, 6) == 127
    assert word_count(3, 6) == 1093
    assert feasible_max_len(2, 30, budget=1000) == 8
    assert feasible_max_len(2, 5, budget=10**7) == 5


def test_len_agreement_counts_every_word():
    spec = IdiomSpec("len", 2, body="a")
    report = exhaustive_equiv(spec, gen_len(LenParams(2, 2, "a")), 6)
    assert report.agree
    assert report.words_checked == 1093
    assert report.to_json() == {"agree": True, "words_checked": 1093, "max_len": 6}


def test_eq_agreement():
    report = exhaustive_equiv(IdiomSpec("eq", 2, alphabet="ab"), eq_validator(2, "ab"), 4)
    assert report.agree and report.words_checked == word_count(2, 4)


def test_chunk_agreement():
    spec = IdiomSpec("chunk", 1, body="a")
    report = exhaustive_equiv(spec, gen_chunk(LenParams(1, 2, "a", delimiter=SHARP)), 7)
    assert report.agree


def _drop_rule(g: Grammar, index: int) -> Grammar:
    rules = list(g.rules)
    del rules[index]
    return Grammar.build(rules, start=g.start, terminals=g.terminals)


@pytest.mark.parametrize("index", range(8))
def test_corrupted_grammar_yields_least_counterexample(index):
    spec = IdiomSpec("len", 2, body="a")
    g = gen_len(LenParams(2, 2, "a"))
    assert len(g.rules) == 8
    broken = _drop_rule(g, index)
    report = exhaustive_equiv(spec, broken, 6)
    disagreements = [w for w in all_words(spec.symbols, 6)
                     if broken.accepts(w) != oracle_membership(spec, w)]
    assert not report.agree
    assert report.counterexample == min(disagreements)
    assert report.engine == broken.accepts(report.counterexample)
    assert report.oracle == oracle_membership(spec, report.counterexample)


def test_budget_exceeded():
    with pytest.raises(EnumerationBudgetExceeded):
        exhaustive_equiv(IdiomSpec("eq", 3, alphabet="abc"), eq_validator(3, "abc"), 12, budget=10_000)


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 4), (3, 8)])
def test_residual_classes_binary(n, expected):
    assert residual_dfa_states(IdiomSpec("len", n, body="a")) == expected


def test_residual_classes_ternary():
    assert residual_dfa_states(IdiomSpec("len", 2, base=3, body="a")) == 9


def test_residuals_need_length_field():
    with pytest.raises(ValueError):
        residual_dfa_states(IdiomSpec("eq", 2, alphabet="ab"))


def test_matrix_shape():
    cases = desk_matrix()
    kinds = {c.spec.kind for c in cases}
    assert kinds == {"len", "chunk", "eq", "leq", "general-eq"}
    assert len({c.label for c in cases}) == len(cases)
