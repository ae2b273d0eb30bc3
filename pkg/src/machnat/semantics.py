"""Evaluation of programs over the finite universe {0..mnat}.

A statement is computable under a valuation when its type and relation
checks pass and, for add/mult, the result fits the machine bound.  A rule
is sound when every valuation that makes its premise computable also makes
the conclusion computable; rules concluding falsity are sound when the
premise is computable nowhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .kernel import (
    ADD, DEFAULT_MACH, EQN, FALSITY_PN, LE, LT, MULT, TRICH, TYPEN,
    Iep, MachParams, Statement, disjunction_operands, is_const,
    primary_inputs, validate_iep,
)

__all__ = [
    "EnumerationCapError", "RunOutcome", "SoundnessVerdict", "UnvaluedLabelError",
    "eval_statement", "primary_inputs", "run_program", "soundness_check",
    "replay_computable",
]


class UnvaluedLabelError(ValueError):
    """An input label had no value; a programming error, not a halt."""


class EnumerationCapError(ValueError):
    """A soundness check would need to enumerate more variables than allowed."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(f"rule has {needed} primary inputs, enumeration cap is {cap}")


@dataclass(frozen=True)
class RunOutcome:
    """Result of evaluating a statement or program.

    ``status`` is "computable" or "halted".  A computable outcome carries the
    valuation extended with every output value; a halted one carries the
    1-based failing row (0 for a single statement) and the halt cause
    ("type-bound" or "relation-false").
    """

    status: str
    env: dict[int, int]
    row: int = 0
    cause: str | None = None

    @property
    def computable(self) -> bool:
        return self.status == "computable"


@dataclass(frozen=True)
class SoundnessVerdict:
    verdict: str  # sound | unsound | vacuous
    witness_count: int
    counterexample: dict[int, int] | None = None


def _value(label: int, env: dict[int, int], mach: MachParams) -> int:
    if is_const(label, mach):
        return mach.const_value(label)
    try:
        return env[label]
    except KeyError:
        raise UnvaluedLabelError(f"label {label} has no value") from None


def eval_statement(s: Statement, env: dict[int, int],
                   mach: MachParams = DEFAULT_MACH) -> RunOutcome:
    """Evaluate one statement, extending the valuation on success."""
    if s.pn == FALSITY_PN:
        return RunOutcome("halted", dict(env), 0, "relation-false")
    if s.pn in (LE, TRICH):
        # Disjunctions evaluate through their operands: computable when
        # either operand is.
        for operand in disjunction_operands(s, mach):
            if eval_statement(operand, env, mach).computable:
                return RunOutcome("computable", dict(env))
        return RunOutcome("halted", dict(env), 0, "relation-false")
    values = [_value(l, env, mach) for l in s.inputs()]
    if s.pn == TYPEN:
        return RunOutcome("computable", dict(env))
    if s.pn == EQN:
        ok = values[0] == values[1]
    elif s.pn == LT:
        ok = values[0] < values[1]
    elif s.pn == ADD or s.pn == MULT:
        result = values[0] + values[1] if s.pn == ADD else values[0] * values[1]
        if result > mach.mnat:
            return RunOutcome("halted", dict(env), 0, "type-bound")
        extended = dict(env)
        extended[s.y[0]] = result
        return RunOutcome("computable", extended)
    else:
        raise UnvaluedLabelError(f"no evaluation for program label {s.pn}")
    if ok:
        return RunOutcome("computable", dict(env))
    return RunOutcome("halted", dict(env), 0, "relation-false")


def run_program(rows, inputs: dict[int, int], mach: MachParams = DEFAULT_MACH) -> RunOutcome:
    """Evaluate rows in order; the first halt aborts the run."""
    env = dict(inputs)
    for i, row in enumerate(rows, start=1):
        outcome = eval_statement(row, env, mach)
        if not outcome.computable:
            return RunOutcome("halted", env, i, outcome.cause)
        env = outcome.env
    return RunOutcome("computable", env)


# ---------------------------------------------------------------------------
# Compiled evaluation for exhaustive enumeration.

_OP_TYPEN, _OP_EQN, _OP_LT, _OP_ADD, _OP_MULT, _OP_LE, _OP_TRICH, _OP_FALSE = range(8)

_OPCODE = {TYPEN: _OP_TYPEN, EQN: _OP_EQN, LT: _OP_LT, ADD: _OP_ADD,
           MULT: _OP_MULT, LE: _OP_LE, TRICH: _OP_TRICH, FALSITY_PN: _OP_FALSE}


def _compile(rows, mach: MachParams):
    """Map labels to dense slots and rows to opcode tuples.

    The le/trich opcodes use the closed forms a<=b and True; these agree
    with operand-wise evaluation for nat values (asserted by tests).
    """
    slots: dict[int, int] = {}
    preset: list[tuple[int, int]] = []

    def slot(label: int) -> int:
        if label not in slots:
            slots[label] = len(slots)
            if is_const(label, mach):
                preset.append((slots[label], mach.const_value(label)))
        return slots[label]

    code = []
    for row in rows:
        ins = [slot(l) for l in row.inputs()]
        outs = [slot(l) for l in row.outputs()]
        code.append((_OPCODE[row.pn], ins, outs))
    return slots, preset, code


def _run_compiled(code, vals, mnat) -> int:
    """Return the 1-based halting row, or 0 when every row is computable."""
    for i, (op, ins, outs) in enumerate(code, start=1):
        if op == _OP_TYPEN:
            continue
        if op == _OP_FALSE:
            return i
        a = vals[ins[0]]
        b = vals[ins[1]]
        if op == _OP_EQN:
            if a != b:
                return i
        elif op == _OP_LT:
            if a >= b:
                return i
        elif op == _OP_ADD:
            r = a + b
            if r > mnat:
                return i
            vals[outs[0]] = r
        elif op == _OP_MULT:
            r = a * b
            if r > mnat:
                return i
            vals[outs[0]] = r
        elif op == _OP_LE:
            if a > b:
                return i
        # trich is total over nat values
    return 0


def soundness_check(r: Iep, mach: MachParams = DEFAULT_MACH) -> SoundnessVerdict:
    """Exhaustively enumerate premise-input valuations and test the rule.

    The counterexample reported for an unsound rule is the lexicographically
    smallest valuation of the primary inputs in first-appearance order.
    """
    violations = validate_iep(r, mach)
    if violations:
        row, cond, msg = violations[0]
        raise ValueError(f"invalid rule: ({cond}) at statement {row}: {msg}")
    primaries = primary_inputs(r.premise, mach)
    if len(primaries) > mach.max_enum_vars:
        raise EnumerationCapError(len(primaries), mach.max_enum_vars)

    falsity_goal = r.conclusion.is_falsity
    rows = r.premise if falsity_goal else r.premise + (r.conclusion,)
    slots, preset, code = _compile(rows, mach)
    n_premise = len(r.premise)
    prim_slots = [slots[l] for l in primaries]
    vals = [0] * len(slots)
    for idx, v in preset:
        vals[idx] = v

    witness_count = 0
    for assignment in itertools.product(range(mach.mnat + 1), repeat=len(primaries)):
        for idx, v in zip(prim_slots, assignment):
            vals[idx] = v
        halted_at = _run_compiled(code, vals, mach.mnat)
        if halted_at and halted_at <= n_premise:
            continue
        witness_count += 1
        if falsity_goal or halted_at:
            # Premise computable where it must not be, or conclusion halts.
            return SoundnessVerdict("unsound", witness_count,
                                    dict(zip(primaries, assignment)))
    if falsity_goal:
        return SoundnessVerdict("sound", 0)
    if witness_count == 0:
        return SoundnessVerdict("vacuous", 0)
    return SoundnessVerdict("sound", witness_count)


def replay_computable(premise, statements, mach: MachParams = DEFAULT_MACH) -> bool:
    """True when every premise-witnessing valuation computes all statements.

    Used to confirm that derivations never manufacture uncomputable lines:
    the full statement list of a proof must be computable wherever its
    premise is.
    """
    primaries = primary_inputs(premise, mach)
    if len(primaries) > mach.max_enum_vars:
        raise EnumerationCapError(len(primaries), mach.max_enum_vars)
    slots, preset, code = _compile(tuple(premise) + tuple(statements), mach)
    n_premise = len(premise)
    prim_slots = [slots[l] for l in primaries]
    vals = [0] * len(slots)
    for idx, v in preset:
        vals[idx] = v
    for assignment in itertools.product(range(mach.mnat + 1), repeat=len(primaries)):
        for idx, v in zip(prim_slots, assignment):
            vals[idx] = v
        halted_at = _run_compiled(code, vals, mach.mnat)
        if halted_at > n_premise:
            return False
    return True
