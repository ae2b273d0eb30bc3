"""Derivation steps and the proof checker.

A proof is a numbered list of statements, each justified by one of:

* ``premise``       -- the statement is a premise row of the target rule;
* ``iot [i]``       -- type introduction for a variable of line i;
* ``sr1 [i j]``     -- substitution into line i using the equality at line j;
* ``<id> [i ...]``  -- application of rule <id> to the referenced sublist;
* ``<pair> <pair>`` -- split of a disjunction line, one pair per operand.

A split pair is a rule application, an sr1 step, or ``dcr2 [d]``; inside a
pair, references to the disjunction line d denote that branch's operand.
The checker replays every line and recomputes the connection list (rule ids
used, excluding iot, sr1 and dcr2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..kernel import (
    DEFAULT_MACH, EQN, LE, NULL, TRICH, TYPEN, Iep, MachParams, Statement,
    disjunction_operands, falsity, is_const, is_var, make_statement,
)

__all__ = [
    "CheckResult", "Justification", "Pair", "Proof", "ProofLine", "StepError",
    "apply_iep", "apply_iot", "apply_sr1", "check_proof", "match_rows",
    "statement_key",
]


class StepError(ValueError):
    """A derivation step's preconditions do not hold."""


@dataclass(frozen=True)
class Pair:
    kind: str  # "iep" | "sr1" | "dcr2"
    rule: int | None
    refs: tuple[int, ...]


@dataclass(frozen=True)
class Justification:
    kind: str  # "premise" | "iot" | "sr1" | "iep" | "split"
    rule: int | None = None
    refs: tuple[int, ...] = ()
    pairs: tuple[Pair, Pair] | None = None


PREMISE = Justification("premise")


@dataclass(frozen=True)
class ProofLine:
    statement: Statement
    justification: Justification


@dataclass(frozen=True)
class Proof:
    target: Iep
    lines: tuple[ProofLine, ...]

    def statements(self) -> tuple[Statement, ...]:
        return tuple(pl.statement for pl in self.lines)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: int | None = None
    reason: str | None = None
    connection: tuple[int, ...] = ()


def statement_key(s: Statement) -> tuple:
    """Statement identity with outputs anonymized (fresh labels rename freely)."""
    return (s.pn, s.x, tuple(l != NULL for l in s.y))


def match_rows(pattern: Sequence[Statement], targets: Sequence[Statement],
               mach: MachParams = DEFAULT_MACH) -> dict[int, int] | None:
    """Label map sending pattern rows onto target rows, or None.

    The map is identity on constants; a pattern variable may map to any
    non-null label (two pattern variables may share an image).
    """
    if len(pattern) != len(targets):
        return None
    sigma: dict[int, int] = {}
    for p, t in zip(pattern, targets):
        if p.pn != t.pn:
            return None
        for pl, tl in zip(p.x + p.y, t.x + t.y):
            if pl == NULL or tl == NULL:
                if pl != tl:
                    return None
                continue
            if is_const(pl, mach):
                if pl != tl:
                    return None
                continue
            bound = sigma.get(pl)
            if bound is None:
                sigma[pl] = tl
            elif bound != tl:
                return None
    return sigma


def instantiate_conclusion(rule: Iep, sigma: Mapping[int, int], outputs: Sequence[int],
                           mach: MachParams = DEFAULT_MACH) -> Statement:
    """Rule conclusion under sigma with the given fresh output labels."""
    c = rule.conclusion
    if c.is_falsity:
        return falsity(mach)
    x = tuple(l if l == NULL or is_const(l, mach) else sigma[l] for l in c.x)
    it = iter(outputs)
    y = tuple(NULL if l == NULL else next(it) for l in c.y)
    return Statement(c.pn, x, y)


def conclusion_input_key(rule: Iep, sigma: Mapping[int, int],
                         mach: MachParams = DEFAULT_MACH) -> tuple | None:
    """Key of the rule conclusion under sigma, or None if an input is unbound."""
    c = rule.conclusion
    x = []
    for l in c.x:
        if l == NULL or is_const(l, mach):
            x.append(l)
        elif l in sigma:
            x.append(sigma[l])
        else:
            return None
    return (c.pn, tuple(x), tuple(l != NULL for l in c.y))


def _fresh_labels(lines: Sequence[Statement], count: int,
                  mach: MachParams) -> list[int]:
    used = {l for s in lines for l in s.labels()}
    out = []
    candidate = 1
    while len(out) < count:
        if candidate not in used and is_var(candidate, mach):
            out.append(candidate)
            used.add(candidate)
        candidate += 1
        if candidate > mach.nvar and len(out) < count:
            raise StepError("variable pool exhausted for fresh outputs")
    return out


def apply_iot(lines: Sequence[Statement], ref: int, variable: int,
              mach: MachParams = DEFAULT_MACH) -> Statement:
    """Type introduction: typen for a variable of an established line."""
    if not 1 <= ref <= len(lines):
        raise StepError(f"reference {ref} out of range")
    if not is_var(variable, mach):
        raise StepError("iot applies to variables only")
    if variable not in lines[ref - 1].labels():
        raise StepError(f"variable {variable} does not occur in line {ref}")
    return make_statement(TYPEN, (variable,), (), mach)


def apply_sr1(lines: Sequence[Statement], target: int, equality: int,
              positions: Sequence[int], forward: bool = True,
              mach: MachParams = DEFAULT_MACH) -> Statement:
    """Substitute via an equality at the chosen input positions.

    ``forward`` replaces the equality's left label by its right one;
    outputs are refreshed to new labels.
    """
    if not (1 <= target <= len(lines) and 1 <= equality <= len(lines)):
        raise StepError("reference out of range")
    eq = lines[equality - 1]
    tgt = lines[target - 1]
    if eq.pn != EQN:
        raise StepError(f"line {equality} is not an equality")
    if tgt.is_falsity:
        raise StepError("cannot substitute into falsity")
    src, dst = (eq.x[0], eq.x[1]) if forward else (eq.x[1], eq.x[0])
    if not positions:
        raise StepError("substitution must replace at least one occurrence")
    x = list(tgt.x)
    for i in positions:
        if not 0 <= i < len(x) or x[i] != src:
            raise StepError(f"input slot {i} does not hold the replaced label")
        x[i] = dst
    fresh = iter(_fresh_labels(lines, len(tgt.outputs()), mach))
    y = tuple(NULL if l == NULL else next(fresh) for l in tgt.y)
    return Statement(tgt.pn, tuple(x), y)


def apply_iep(lines: Sequence[Statement], rule: Iep, refs: Sequence[int],
              mach: MachParams = DEFAULT_MACH) -> Statement:
    """Apply a rule to an I/O-equivalent sublist; outputs are fresh."""
    rows = []
    for r in refs:
        if not 1 <= r <= len(lines):
            raise StepError(f"reference {r} out of range")
        rows.append(lines[r - 1])
    sigma = match_rows(rule.premise, rows, mach)
    if sigma is None:
        raise StepError("sublist does not match the rule premise")
    if rule.conclusion.is_falsity:
        return falsity(mach)
    outputs = _fresh_labels(lines, len(rule.conclusion.outputs()), mach)
    try:
        return instantiate_conclusion(rule, sigma, outputs, mach)
    except KeyError:
        raise StepError("rule conclusion has unbound inputs") from None


class _LineChecker:
    """Replays one proof line by line, tracking labels already in use."""

    def __init__(self, target: Iep, kb: Mapping[int, Iep], mach: MachParams):
        self.target = target
        self.kb = kb
        self.mach = mach
        self.lines: list[Statement] = []
        self.used: set[int] = set()
        self.connection: set[int] = set()

    def fail(self, reason: str) -> str:
        return reason

    def at(self, ref: int) -> Statement | None:
        if 1 <= ref <= len(self.lines):
            return self.lines[ref - 1]
        return None

    def note_labels(self, s: Statement) -> None:
        self.used.update(s.labels())

    def fresh_outputs_ok(self, stated: Statement) -> bool:
        outs = stated.outputs()
        if len(set(outs)) != len(outs):
            return False
        for l in outs:
            if l in self.used or is_const(l, self.mach) or not is_var(l, self.mach):
                return False
        return True

    # -- individual step checks -------------------------------------------

    def check_iot(self, refs, stated: Statement) -> str | None:
        if len(refs) != 1:
            return "iot takes one reference"
        src = self.at(refs[0])
        if src is None:
            return f"reference {refs[0]} out of range"
        if stated.pn != TYPEN:
            return "iot must derive a typen statement"
        v = stated.x[0]
        if not is_var(v, self.mach):
            return "iot applies to variables only"
        if v not in src.labels():
            return f"variable {v} does not occur in line {refs[0]}"
        return None

    def check_iep(self, rule_id, refs, stated: Statement,
                  context: Sequence[Statement] | None = None) -> str | None:
        rule = self.kb.get(rule_id)
        if rule is None:
            return f"unknown rule {rule_id}"
        rows = []
        for r in refs:
            s = self.at(r) if context is None else (
                context[r - 1] if 1 <= r <= len(context) else None)
            if s is None:
                return f"reference {r} out of range"
            rows.append(s)
        sigma = match_rows(rule.premise, rows, self.mach)
        if sigma is None:
            return f"lines {list(refs)} do not match the premise of rule {rule_id}"
        self.connection.add(rule_id)
        if rule.conclusion.is_falsity:
            if not stated.is_falsity:
                return f"rule {rule_id} concludes falsity"
            return None
        if stated.is_falsity:
            return f"rule {rule_id} does not conclude falsity"
        expected = conclusion_input_key(rule, sigma, self.mach)
        if expected is None:
            return f"rule {rule_id} has unbound conclusion inputs"
        if statement_key(stated) != expected:
            return f"statement does not match the conclusion of rule {rule_id}"
        if not self.fresh_outputs_ok(stated):
            return "output labels are not fresh"
        return None

    def check_sr1(self, refs, stated: Statement,
                  context: Sequence[Statement] | None = None) -> str | None:
        if len(refs) != 2:
            return "sr1 takes a target and an equality reference"
        get = (lambda r: self.at(r)) if context is None else (
            lambda r: context[r - 1] if 1 <= r <= len(context) else None)
        tgt = get(refs[0])
        eq = get(refs[1])
        if tgt is None or eq is None:
            return "reference out of range"
        if eq.pn != EQN:
            return f"line {refs[1]} is not an equality"
        if tgt.is_falsity:
            return "cannot substitute into falsity"
        u, v = eq.x[0], eq.x[1]
        if stated.pn != tgt.pn:
            return "substitution cannot change the program name"
        diffs = [(a, b) for a, b in zip(tgt.x, stated.x) if a != b]
        if not diffs:
            return "substitution must replace at least one occurrence"
        if all(a == u and b == v for a, b in diffs):
            pass  # u replaced by v
        elif all(a == v and b == u for a, b in diffs):
            pass  # v replaced by u
        else:
            return "replaced occurrences do not follow the equality"
        if tuple(l != NULL for l in stated.y) != tuple(l != NULL for l in tgt.y):
            return "output arity changed"
        if not self.fresh_outputs_ok(stated):
            return "output labels are not fresh"
        return None

    def check_split(self, pairs: tuple[Pair, Pair], stated: Statement) -> str | None:
        if all(p.kind == "dcr2" for p in pairs):
            return "dcr2 cannot apply to both operands"
        candidates: list[int] = []
        for p in pairs:
            for r in p.refs:
                s = self.at(r)
                if s is not None and s.pn in (LE, TRICH) and r not in candidates:
                    candidates.append(r)
        if not candidates:
            return "no disjunction line referenced"
        reasons = []
        for d in candidates:
            reason = self._try_split(d, pairs, stated)
            if reason is None:
                return None
            reasons.append(f"[split at {d}] {reason}")
        return "; ".join(reasons)

    def _try_split(self, d: int, pairs: tuple[Pair, Pair], stated: Statement) -> str | None:
        operands = disjunction_operands(self.lines[d - 1], self.mach)
        results = []
        for operand, pair in zip(operands, pairs):
            context = list(self.lines)
            context[d - 1] = operand
            if pair.kind == "dcr2":
                if pair.refs != (d,):
                    return "dcr2 must reference the disjunction line"
                results.append(("keep", statement_key(operand)))
            elif pair.kind == "iep":
                rule = self.kb.get(pair.rule)
                if rule is None:
                    return f"unknown rule {pair.rule}"
                rows = []
                for r in pair.refs:
                    if not 1 <= r <= len(context):
                        return f"reference {r} out of range"
                    rows.append(context[r - 1])
                sigma = match_rows(rule.premise, rows, self.mach)
                if sigma is None:
                    return f"pair rule {pair.rule} does not match its sublist"
                self.connection.add(pair.rule)
                if rule.conclusion.is_falsity:
                    results.append(("refuted", None))
                else:
                    key = conclusion_input_key(rule, sigma, self.mach)
                    if key is None:
                        return f"rule {pair.rule} has unbound conclusion inputs"
                    results.append(("stmt", key))
            elif pair.kind == "sr1":
                err = self.check_sr1(pair.refs, stated, context)
                if err is not None:
                    return f"sr1 pair: {err}"
                results.append(("stmt", statement_key(stated)))
            else:
                return f"unknown pair kind {pair.kind}"
        kinds = [r[0] for r in results]
        if "keep" in kinds:
            other = results[1 - kinds.index("keep")]
            if other[0] != "refuted":
                return "dcr2 requires the other branch to be refuted"
        refuted = [r for r in results if r[0] == "refuted"]
        settled = [r[1] for r in results if r[0] != "refuted"]
        if len(refuted) == 2:
            if not stated.is_falsity:
                return "both branches refuted: the statement must be falsity"
            return None
        if stated.is_falsity:
            return "falsity requires both branches refuted"
        if len(settled) == 2 and settled[0] != settled[1]:
            return "branch results disagree"
        if statement_key(stated) != settled[0]:
            return "statement does not match the branch result"
        if stated.outputs() and not self.fresh_outputs_ok(stated):
            return "output labels are not fresh"
        return None


def check_proof(proof: Proof, kb: Mapping[int, Iep],
                declared_connection: Sequence[int] | None = None,
                mach: MachParams = DEFAULT_MACH) -> CheckResult:
    """Replay every line of a proof against the knowledge base."""
    target = proof.target
    n_prem = len(target.premise)
    if len(proof.lines) < n_prem + 1:
        return CheckResult(False, len(proof.lines), "proof shorter than premise plus conclusion")
    checker = _LineChecker(target, kb, mach)
    for i, pl in enumerate(proof.lines, start=1):
        stmt, just = pl.statement, pl.justification
        if i <= n_prem:
            if just.kind != "premise":
                return CheckResult(False, i, "expected a premise line")
            if stmt != target.premise[i - 1]:
                return CheckResult(False, i, "premise line differs from the rule premise")
        else:
            if just.kind == "premise":
                return CheckResult(False, i, "premise justification after the premise block")
            if any(r >= i for r in just.refs):
                return CheckResult(False, i, "justification references a later line")
            if just.kind == "split" and any(r >= i for p in just.pairs for r in p.refs):
                return CheckResult(False, i, "justification references a later line")
            if just.kind == "iot":
                reason = checker.check_iot(just.refs, stmt)
            elif just.kind == "sr1":
                reason = checker.check_sr1(just.refs, stmt)
            elif just.kind == "iep":
                reason = checker.check_iep(just.rule, just.refs, stmt)
            elif just.kind == "split":
                reason = checker.check_split(just.pairs, stmt)
            else:
                reason = f"unknown justification kind {just.kind}"
            if reason is not None:
                return CheckResult(False, i, reason)
        checker.lines.append(stmt)
        checker.note_labels(stmt)
    final = proof.lines[-1].statement
    if statement_key(final) != statement_key(target.conclusion):
        return CheckResult(False, len(proof.lines),
                           "final line does not match the conclusion")
    connection = tuple(sorted(checker.connection))
    if declared_connection is not None and set(declared_connection) != set(connection):
        return CheckResult(False, None,
                           f"declared connection list {sorted(set(declared_connection))} "
                           f"differs from recomputed {list(connection)}",
                           connection)
    return CheckResult(True, None, None, connection)
