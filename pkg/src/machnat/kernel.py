"""Core domain types for programs over machine-bounded naturals.

A program is an ordered list of atomic-program statements.  Each statement
carries a program-name label and fixed-width input/output label slots
(label 0 marks an unused slot).  Variables and constants share one integer
label space: 1..nvar are variables and nvar+1..nvar+3 are the constants
0, 1 and mnat.  A rule (irreducible extended program, IEP) pairs a premise
program with a single conclusion statement and asserts that whenever the
premise is computable the conclusion is computable for the same inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

NULL = 0
FALSITY_PN = 0

CONST_NAMES = ("0", "1", "mnat")
LETTERS = "abcdefghijklmnopqrstuvwxyz"


class RuleError(ValueError):
    """A rule or statement violates the format or the I/O discipline."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ApSignature:
    """Shape and evaluation class of one atomic program."""

    label: int
    name: str
    in_arity: int
    out_arity: int
    kind: str  # type-check | relation-check | computation | disjunction | falsity


SIGNATURES = (
    ApSignature(0, "false", 0, 0, "falsity"),
    ApSignature(1, "typen", 1, 0, "type-check"),
    ApSignature(2, "eqn", 2, 0, "relation-check"),
    ApSignature(3, "lt", 2, 0, "relation-check"),
    ApSignature(4, "add", 2, 1, "computation"),
    ApSignature(5, "mult", 2, 1, "computation"),
    ApSignature(6, "le", 2, 0, "disjunction"),
    ApSignature(7, "trich", 2, 0, "disjunction"),
)

SIG_BY_LABEL = {s.label: s for s in SIGNATURES}
SIG_BY_NAME = {s.name: s for s in SIGNATURES}

#: Atomic-program labels available to the conjecture generator.
AP_LABELS = tuple(s.label for s in SIGNATURES if s.label != FALSITY_PN)

TYPEN, EQN, LT, ADD, MULT, LE, TRICH = 1, 2, 3, 4, 5, 6, 7


@dataclass(frozen=True)
class MachParams:
    """Machine-resource parameters and artifact-wide bounds."""

    mnat: int = 12
    nvar: int = 26
    nx: int = 2
    ny: int = 1
    max_premise_len: int = 5
    max_proof_depth: int = 8
    max_derived_statements: int = 600
    max_enum_vars: int = 5
    template_budget: int = 20000

    def __post_init__(self):
        if self.mnat < 1:
            raise ValueError("mnat must be >= 1")
        if self.nvar < 1:
            raise ValueError("nvar must be >= 1")

    @property
    def const_zero(self) -> int:
        return self.nvar + 1

    @property
    def const_one(self) -> int:
        return self.nvar + 2

    @property
    def const_mnat(self) -> int:
        return self.nvar + 3

    def const_value(self, label: int) -> int:
        return (0, 1, self.mnat)[label - self.nvar - 1]


DEFAULT_MACH = MachParams()


def is_null(label: int) -> bool:
    return label == NULL


def is_const(label: int, mach: MachParams = DEFAULT_MACH) -> bool:
    return mach.nvar + 1 <= label <= mach.nvar + 3


def is_var(label: int, mach: MachParams = DEFAULT_MACH) -> bool:
    # Labels above the constant band are transient fresh variables used
    # internally by the proof search; they never appear in rendered text.
    return label >= 1 and not is_const(label, mach)


@dataclass(frozen=True)
class Statement:
    """One atomic-program instance: name label plus fixed I/O label slots."""

    pn: int
    x: tuple[int, ...]
    y: tuple[int, ...]

    def inputs(self) -> tuple[int, ...]:
        return tuple(l for l in self.x if l != NULL)

    def outputs(self) -> tuple[int, ...]:
        return tuple(l for l in self.y if l != NULL)

    def labels(self) -> tuple[int, ...]:
        return tuple(l for l in self.x + self.y if l != NULL)

    @property
    def is_falsity(self) -> bool:
        return self.pn == FALSITY_PN


def make_statement(pn: int, inputs: Sequence[int], outputs: Sequence[int],
                   mach: MachParams = DEFAULT_MACH) -> Statement:
    """Build a slot-padded statement, enforcing the signature's arities."""
    sig = SIG_BY_LABEL.get(pn)
    if sig is None:
        raise RuleError(f"unknown atomic-program label {pn}")
    if len(inputs) != sig.in_arity:
        raise RuleError(f"{sig.name} expects {sig.in_arity} inputs, got {len(inputs)}")
    if len(outputs) != sig.out_arity:
        raise RuleError(f"{sig.name} expects {sig.out_arity} outputs, got {len(outputs)}")
    for l in outputs:
        if is_const(l, mach):
            raise RuleError(f"{sig.name}: constant label in an output slot")
        if l == NULL:
            raise RuleError(f"{sig.name}: null label in a required output slot")
    for l in inputs:
        if l == NULL:
            raise RuleError(f"{sig.name}: null label in a required input slot")
    x = tuple(inputs) + (NULL,) * (mach.nx - len(inputs))
    y = tuple(outputs) + (NULL,) * (mach.ny - len(outputs))
    return Statement(pn, x, y)


def falsity(mach: MachParams = DEFAULT_MACH) -> Statement:
    return Statement(FALSITY_PN, (NULL,) * mach.nx, (NULL,) * mach.ny)


def disjunction_operands(s: Statement, mach: MachParams = DEFAULT_MACH
                         ) -> tuple[Statement, Statement]:
    """The two operand statements a disjunction splits into.

    le[a b]    -> lt[a b], eqn[a b]
    trich[a b] -> lt[b a], le[a b]
    """
    a, b = s.x[0], s.x[1]
    if s.pn == LE:
        return (make_statement(LT, (a, b), (), mach),
                make_statement(EQN, (a, b), (), mach))
    if s.pn == TRICH:
        return (make_statement(LT, (b, a), (), mach),
                make_statement(LE, (a, b), (), mach))
    raise RuleError(f"{SIG_BY_LABEL[s.pn].name} is not a disjunction")


@dataclass(frozen=True)
class Iep:
    """A rule: premise program plus a single conclusion statement."""

    premise: tuple[Statement, ...]
    conclusion: Statement
    id: int = 0


def conc(r: Iep) -> tuple[Statement, ...]:
    """Concatenation of premise and conclusion into one program."""
    return r.premise + (r.conclusion,)


def primary_inputs(rows: Iterable[Statement], mach: MachParams = DEFAULT_MACH
                   ) -> tuple[int, ...]:
    """Non-constant input labels not produced earlier, in first-appearance order."""
    produced: set[int] = set()
    primaries: list[int] = []
    for row in rows:
        for l in row.inputs():
            if not is_const(l, mach) and l not in produced and l not in primaries:
                primaries.append(l)
        produced.update(row.outputs())
    return tuple(primaries)


def validate_io_dependency(rows: Sequence[Statement],
                           primaries: Iterable[int] | None = None,
                           mach: MachParams = DEFAULT_MACH
                           ) -> list[tuple[int, str, str]]:
    """Check the single-assignment I/O discipline of a program.

    Returns a list of violations ``(row, condition, message)`` with 1-based
    row indices; an empty list means the program is valid.  Conditions:

    a. output labels across all rows are pairwise distinct;
    b. no output label is a constant;
    c. every input label is a primary input or an earlier row's output;
    d. no label is output after it already appeared.
    """
    if primaries is None:
        primaries = primary_inputs(rows, mach)
    known: set[int] = set(primaries)
    seen: set[int] = set(primaries)
    outputs_seen: set[int] = set()
    violations: list[tuple[int, str, str]] = []
    for i, row in enumerate(rows, start=1):
        for l in row.inputs():
            if is_const(l, mach):
                continue
            if l not in known:
                violations.append((i, "c", f"input label {l} is neither a primary input nor an earlier output"))
        for l in row.outputs():
            if is_const(l, mach):
                violations.append((i, "b", f"constant label {l} used as an output"))
                continue
            if l in outputs_seen:
                violations.append((i, "a", f"output label {l} already produced"))
            if l in seen:
                violations.append((i, "d", f"label {l} reused as an output"))
            outputs_seen.add(l)
        seen.update(row.labels())
        known.update(row.outputs())
    return violations


def validate_iep(r: Iep, mach: MachParams = DEFAULT_MACH) -> list[tuple[int, str, str]]:
    """Validate premise and concatenated rule under the premise's primary inputs."""
    violations = validate_io_dependency(r.premise, None, mach)
    if violations:
        return violations
    prem_primaries = primary_inputs(r.premise, mach)
    return validate_io_dependency(conc(r), prem_primaries, mach)


# ---------------------------------------------------------------------------
# Integer-matrix encoding


def to_matrix(rows: Sequence[Statement]) -> tuple[tuple[int, ...], ...]:
    """Program as an n x (1+nx+ny) integer matrix (name column first)."""
    return tuple((row.pn,) + row.x + row.y for row in rows)


def from_matrix(matrix: Sequence[Sequence[int]], mach: MachParams = DEFAULT_MACH
                ) -> tuple[Statement, ...]:
    """Inverse of :func:`to_matrix`."""
    rows = []
    for entry in matrix:
        entry = tuple(entry)
        if len(entry) != 1 + mach.nx + mach.ny:
            raise RuleError(f"matrix row has width {len(entry)}, expected {1 + mach.nx + mach.ny}")
        rows.append(Statement(entry[0], entry[1:1 + mach.nx], entry[1 + mach.nx:]))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Text dialect: one statement per line, `-----` separator, `#` comments.


class SymbolTable:
    """Token <-> label mapping for one rule or proof block."""

    def __init__(self, mach: MachParams = DEFAULT_MACH):
        self.mach = mach
        self._by_token: dict[str, int] = {}
        self._next = 1

    def label_for(self, token: str, line: int | None = None) -> int:
        mach = self.mach
        if token == "0":
            return mach.const_zero
        if token == "1":
            return mach.const_one
        if token == "mnat":
            return mach.const_mnat
        if token in self._by_token:
            return self._by_token[token]
        if len(token) == 1 and token in LETTERS:
            label = self._next
        elif token.startswith("v") and token[1:].isdigit():
            label = int(token[1:])
        else:
            raise RuleError(f"unknown token {token!r}", line)
        if label > mach.nvar:
            raise RuleError(f"variable pool exhausted at token {token!r} (nvar={mach.nvar})", line)
        self._by_token[token] = label
        self._next = max(self._next, label + 1)
        return label


def label_token(label: int, mach: MachParams = DEFAULT_MACH) -> str:
    """Render one label as a token."""
    if is_const(label, mach):
        return CONST_NAMES[label - mach.nvar - 1]
    if 1 <= label <= len(LETTERS):
        return LETTERS[label - 1]
    return f"v{label}"


def _is_separator(line: str) -> bool:
    return len(line) >= 3 and set(line) == {"-"}


def parse_statement_line(line: str, sym: SymbolTable, lineno: int | None = None) -> Statement:
    """Parse ``name [tokens] [tokens]`` (or ``false``) into a statement."""
    mach = sym.mach
    text = line.strip()
    if text == "false":
        return falsity(mach)
    tokens = text.replace("[", " [ ").replace("]", " ] ").split()
    if not tokens:
        raise RuleError("empty statement", lineno)
    name = tokens[0]
    sig = SIG_BY_NAME.get(name)
    if sig is None or sig.label == FALSITY_PN:
        raise RuleError(f"unknown atomic-program name {name!r}", lineno)
    groups: list[list[str]] = []
    current: list[str] | None = None
    for token in tokens[1:]:
        if token == "[":
            if current is not None:
                raise RuleError("nested '['", lineno)
            current = []
        elif token == "]":
            if current is None:
                raise RuleError("unmatched ']'", lineno)
            groups.append(current)
            current = None
        else:
            if current is None:
                raise RuleError(f"token {token!r} outside brackets", lineno)
            current.append(token)
    if current is not None:
        raise RuleError("unterminated '['", lineno)
    if len(groups) != 2:
        raise RuleError("expected two I/O lists", lineno)
    in_tokens, out_tokens = groups
    inputs = [sym.label_for(t, lineno) for t in in_tokens]
    outputs = []
    for t in out_tokens:
        label = sym.label_for(t, lineno)
        if is_const(label, mach):
            raise RuleError(f"constant {t!r} in an output slot", lineno)
        outputs.append(label)
    try:
        return make_statement(sig.label, inputs, outputs, mach)
    except RuleError as exc:
        raise RuleError(str(exc), lineno) from None


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


def parse_rule_text(text: str, mach: MachParams = DEFAULT_MACH) -> Iep:
    """Parse premise lines, a ``-----`` separator and one conclusion line."""
    sym = SymbolTable(mach)
    premise: list[Statement] = []
    conclusion: Statement | None = None
    seen_separator = False
    last_line = 0
    for lineno, line in _content_lines(text):
        last_line = lineno
        if _is_separator(line):
            if seen_separator:
                raise RuleError("second separator", lineno)
            seen_separator = True
            continue
        stmt = parse_statement_line(line, sym, lineno)
        if not seen_separator:
            premise.append(stmt)
        elif conclusion is None:
            conclusion = stmt
        else:
            raise RuleError("more than one conclusion line", lineno)
    if not seen_separator:
        raise RuleError("missing separator line", last_line or None)
    if conclusion is None:
        raise RuleError("missing conclusion line", last_line or None)
    rule = Iep(tuple(premise), conclusion)
    violations = validate_iep(rule, mach)
    if violations:
        row, cond, msg = violations[0]
        raise RuleError(f"I/O dependency violation ({cond}) at statement {row}: {msg}")
    if not conclusion.is_falsity:
        prem_labels = set()
        for s in premise:
            prem_labels.update(s.labels())
        for l in conclusion.outputs():
            if l in prem_labels:
                raise RuleError(f"conclusion output label {label_token(l, mach)} is not fresh")
    return rule


def render_statement(s: Statement, mach: MachParams = DEFAULT_MACH) -> str:
    if s.is_falsity:
        return "false"
    sig = SIG_BY_LABEL[s.pn]
    ins = " ".join(label_token(l, mach) for l in s.inputs())
    outs = " ".join(label_token(l, mach) for l in s.outputs())
    return f"{sig.name} [{ins}] [{outs}]"


def canonical_relabel(r: Iep, mach: MachParams = DEFAULT_MACH) -> Iep:
    """Rename variables to 1, 2, ... in first-appearance order."""
    mapping: dict[int, int] = {}

    def remap(label: int) -> int:
        if label == NULL or is_const(label, mach):
            return label
        if label not in mapping:
            mapping[label] = len(mapping) + 1
        return mapping[label]

    def remap_stmt(s: Statement) -> Statement:
        return Statement(s.pn, tuple(remap(l) for l in s.x), tuple(remap(l) for l in s.y))

    return Iep(tuple(remap_stmt(s) for s in r.premise), remap_stmt(r.conclusion), r.id)


def render_rule_text(r: Iep, mach: MachParams = DEFAULT_MACH) -> str:
    """Canonical text: variables relabelled a, b, c, ... in first-appearance order."""
    canon = canonical_relabel(r, mach)
    lines = [render_statement(s, mach) for s in canon.premise]
    lines.append("-----")
    lines.append(render_statement(canon.conclusion, mach))
    return "\n".join(lines)


def parse_rules_file(text: str, mach: MachParams = DEFAULT_MACH
                     ) -> list[tuple[str, Iep]]:
    """Parse a file of named rules: ``rule <name>`` headers, blank-line separated."""
    entries: list[tuple[str, list[str]]] = []
    current: list[str] | None = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("rule "):
            name = line[5:].strip()
            if not name:
                raise RuleError("empty rule name", i)
            current = []
            entries.append((name, current))
        else:
            if current is None:
                raise RuleError("statement before any 'rule' header", i)
            current.append(line)
    return [(name, parse_rule_text("\n".join(lines), mach)) for name, lines in entries]


def render_rules_file(rules: Iterable[tuple[str, Iep]], mach: MachParams = DEFAULT_MACH) -> str:
    blocks = [f"rule {name}\n{render_rule_text(rule, mach)}" for name, rule in rules]
    return "\n\n".join(blocks) + "\n"
