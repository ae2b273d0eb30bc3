import itertools

import pytest
from hypothesis import given, settings

from machnat.kernel import (
    MachParams, make_statement, parse_rule_text, ADD, LE, LT, TRICH,
)
from machnat.semantics import (
    EnumerationCapError, eval_statement, run_program, soundness_check,
)

from strategies import valid_ieps

M10 = MachParams(mnat=10)
M12 = MachParams(mnat=12)


def test_add_halts_on_bound():
    out = eval_statement(make_statement(ADD, (1, 2), (3,)), {1: 7, 2: 8}, M10)
    assert not out.computable and out.cause == "type-bound"


def test_add_computes_within_bound():
    out = eval_statement(make_statement(ADD, (1, 2), (3,)), {1: 3, 2: 4}, M10)
    assert out.computable and out.env[3] == 7


def test_lt_is_irreflexive():
    out = eval_statement(make_statement(LT, (1, 2), ()), {1: 5, 2: 5}, M10)
    assert not out.computable and out.cause == "relation-false"


def test_trich_is_total():
    stmt = make_statement(TRICH, (1, 2), ())
    for a, b in itertools.product(range(13), repeat=2):
        assert eval_statement(stmt, {1: a, 2: b}, M12).computable


def test_le_matches_closed_form_exhaustively():
    stmt = make_statement(LE, (1, 2), ())
    for a, b in itertools.product(range(13), repeat=2):
        assert eval_statement(stmt, {1: a, 2: b}, M12).computable == (a <= b)


def test_run_single_add():
    rule = parse_rule_text("add [a b] [c]\n-----\nadd [b a] [d]")
    out = run_program(rule.premise, {1: 3, 2: 4}, M10)
    assert out.computable and out.env[3] == 7


def test_run_halts_at_second_row():
    rule = parse_rule_text(
        "add [a b] [d]\nadd [d c] [x]\nadd [b c] [e]\n-----\nadd [a e] [y]")
    out = run_program(rule.premise, {1: 4, 2: 4, 4: 4}, M10)
    assert not out.computable and out.row == 2


def test_run_empty_program():
    assert run_program((), {}, M10).computable


def test_soundness_nat_2a():
    rule = parse_rule_text("add [a b] [c]\n-----\nadd [b a] [d]")
    verdict = soundness_check(rule, M12)
    assert verdict.verdict == "sound" and verdict.witness_count == sum(
        1 for a, b in itertools.product(range(13), repeat=2) if a + b <= 12)


def test_soundness_closure_conjecture_unsound():
    rule = parse_rule_text("typen [a] []\ntypen [b] []\n-----\nadd [a b] [c]")
    verdict = soundness_check(rule, M10)
    assert verdict.verdict == "unsound"
    # Brute-force oracle: the first premise witness (in enumeration order)
    # whose conclusion overflows.
    expected = next((a, b) for a, b in itertools.product(range(11), repeat=2)
                    if a + b > 10)
    assert verdict.counterexample == dict(zip((1, 2), expected))


def test_soundness_falsity_rule_sound_by_universal_failure():
    rule = parse_rule_text("lt [a a] []\n-----\nfalse")
    verdict = soundness_check(rule, M12)
    assert verdict.verdict == "sound" and verdict.witness_count == 0


def test_soundness_falsity_rule_unsound_with_witness():
    rule = parse_rule_text("lt [a b] []\n-----\nfalse")
    verdict = soundness_check(rule, M12)
    assert verdict.verdict == "unsound" and verdict.counterexample == {1: 0, 2: 1}


def test_soundness_empty_premise():
    rule = parse_rule_text("-----\nlt [0 1] []")
    verdict = soundness_check(rule, M12)
    assert verdict.verdict == "sound" and verdict.witness_count == 1


def test_soundness_vacuous_conjecture():
    rule = parse_rule_text("lt [a a] []\n-----\neqn [a a] []")
    assert soundness_check(rule, M12).verdict == "vacuous"


def test_soundness_enumeration_cap():
    text = "\n".join(f"typen [{v}] []" for v in "abcdef") + "\n-----\neqn [a a] []"
    with pytest.raises(EnumerationCapError):
        soundness_check(parse_rule_text(text), M12)


def test_primary_inputs_nat_9a():
    rule = parse_rule_text(
        "add [b c] [d]\nmult [a d] [x]\nmult [a b] [u]\nmult [a c] [v]"
        "\n-----\nadd [u v] [y]")
    from machnat.semantics import primary_inputs
    # First-appearance order: b, c, then a.
    assert primary_inputs(rule.premise) == (1, 2, 4)


@given(rule=valid_ieps(max_rows=3))
@settings(max_examples=60, deadline=None)
def test_soundness_deterministic(rule):
    mach = MachParams(mnat=4)
    try:
        first = soundness_check(rule, mach)
        second = soundness_check(rule, mach)
    except EnumerationCapError:
        return
    assert first == second
