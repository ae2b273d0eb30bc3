"""Binding structure of programs: decomposition, templates, equivalence.

The I/O matrix of a program (its integer matrix without the name column)
decomposes into one single-label matrix per distinct label.  A member is
*binding* when it has at least two entries for a variable, or any entry for
a constant.  Replacing entries with 1 while remembering the var/const tag
gives the binary binding template; programs with identical canonical
templates are structurally equivalent, and templates are the search space
for conjecture generation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .kernel import (
    CONST_NAMES, DEFAULT_MACH, NULL, SIG_BY_LABEL, Iep, MachParams,
    Statement, conc, is_const, primary_inputs, validate_io_dependency,
)

__all__ = [
    "BindingMember", "BinaryTemplate", "PeVerdict", "binary_template",
    "canonicalize", "decompose", "io_matrix", "materialize", "name_pattern",
    "pe_integrity", "structurally_equivalent", "template_text",
]


def io_matrix(rows: Sequence[Statement]) -> tuple[tuple[int, ...], ...]:
    """Program matrix with the name column removed."""
    return tuple(row.x + row.y for row in rows)


@dataclass(frozen=True)
class BindingMember:
    """One single-label component of an I/O matrix."""

    label: int
    kind: str  # "var" | "const"
    const: str | None
    positions: tuple[tuple[int, int], ...]

    @property
    def binding(self) -> bool:
        return self.kind == "const" or len(self.positions) >= 2


def decompose(matrix: Sequence[Sequence[int]], mach: MachParams = DEFAULT_MACH
              ) -> list[BindingMember]:
    """Isolate each distinct nonzero label into its own member."""
    positions: dict[int, list[tuple[int, int]]] = {}
    for r, row in enumerate(matrix):
        for c, label in enumerate(row):
            if label != NULL:
                positions.setdefault(label, []).append((r, c))
    members = []
    for label in sorted(positions):
        if is_const(label, mach):
            kind, const = "const", CONST_NAMES[label - mach.nvar - 1]
        else:
            kind, const = "var", None
        members.append(BindingMember(label, kind, const, tuple(positions[label])))
    return members


def member_sum(members: Iterable[BindingMember], shape: tuple[int, int]
               ) -> tuple[tuple[int, ...], ...]:
    """Matrix sum of single-label members (inverse of :func:`decompose`)."""
    rows = [[0] * shape[1] for _ in range(shape[0])]
    for m in members:
        for r, c in m.positions:
            rows[r][c] += m.label
    return tuple(tuple(row) for row in rows)


#: Canonical member key inside a template: (kind, constant name, positions).
MemberKey = tuple[str, str, tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class BinaryTemplate:
    """Binding members of a program in binary form, plus its name column.

    Equality of ``members`` and ``shape`` is structural equivalence in the
    weak sense; the strong sense also requires the same repetition pattern
    in ``names``.  Enumerated templates carry ``names=None`` until a name
    sequence is instantiated.
    """

    shape: tuple[int, int]
    members: tuple[MemberKey, ...]
    names: tuple[int, ...] | None = None


def _member_key(m: BindingMember) -> MemberKey:
    return (m.kind, m.const or "", tuple(sorted(m.positions)))


def canonicalize(t: BinaryTemplate) -> BinaryTemplate:
    """Sort members into the total deterministic order; idempotent."""
    return BinaryTemplate(t.shape, tuple(sorted(t.members)), t.names)


def binary_template(obj: Iep | Sequence[Statement], mach: MachParams = DEFAULT_MACH
                    ) -> BinaryTemplate:
    """Canonical binding template of a rule or program."""
    rows = conc(obj) if isinstance(obj, Iep) else tuple(obj)
    matrix = io_matrix(rows)
    members = [_member_key(m) for m in decompose(matrix, mach) if m.binding]
    shape = (len(rows), mach.nx + mach.ny)
    names = tuple(row.pn for row in rows)
    return canonicalize(BinaryTemplate(shape, tuple(members), names))


def name_pattern(names: Sequence[int]) -> tuple[int, ...]:
    """Repetition structure of a name column: first-appearance indices."""
    seen: dict[int, int] = {}
    out = []
    for n in names:
        if n not in seen:
            seen[n] = len(seen)
        out.append(seen[n])
    return tuple(out)


def structurally_equivalent(r1: Iep, r2: Iep, strong: bool = False,
                            mach: MachParams = DEFAULT_MACH) -> bool:
    """Compare canonical binding templates; strong mode adds the name pattern."""
    t1 = binary_template(r1, mach)
    t2 = binary_template(r2, mach)
    if (t1.shape, t1.members) != (t2.shape, t2.members):
        return False
    if strong:
        return name_pattern(t1.names) == name_pattern(t2.names)
    return True


def template_text(t: BinaryTemplate) -> str:
    """Debug serialization: one member per line as row/column index pairs."""
    lines = [f"shape {t.shape[0]}x{t.shape[1]}"]
    for kind, const, positions in t.members:
        tag = f"const {const}" if kind == "const" else "var"
        cells = " ".join(f"({r},{c})" for r, c in positions)
        lines.append(f"{tag}: {cells}")
    if t.names is not None:
        lines.append("names: " + " ".join(SIG_BY_LABEL[n].name for n in t.names))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Program-extension structural integrity


@dataclass(frozen=True)
class PeVerdict:
    ok: bool
    clause: str | None = None
    message: str | None = None


def pe_integrity(r: Iep, mach: MachParams = DEFAULT_MACH) -> PeVerdict:
    """Structural admissibility of a rule as an extended program.

    i.   the concatenated program satisfies the I/O dependency conditions;
    ii.  conclusion outputs are fresh;
    iii. every non-constant conclusion input occurs in the premise's I/O;
    iv.  the premise fits the premise-length bound.
    """
    prem_primaries = primary_inputs(r.premise, mach)
    violations = validate_io_dependency(conc(r), prem_primaries, mach)
    if violations:
        row, cond, msg = violations[0]
        # Violations on the conclusion row are the dedicated clauses:
        # unbound inputs are (iii), reused outputs are (ii).
        clause = "i"
        if row == len(r.premise) + 1:
            clause = "iii" if cond == "c" else "ii"
        return PeVerdict(False, clause, f"I/O dependency ({cond}) at statement {row}: {msg}")
    prem_labels: set[int] = set()
    for s in r.premise:
        prem_labels.update(s.labels())
    for l in r.conclusion.outputs():
        if l in prem_labels:
            return PeVerdict(False, "ii", f"conclusion output label {l} reuses a premise label")
    if len(r.premise) > mach.max_premise_len:
        return PeVerdict(False, "iv",
                         f"premise length {len(r.premise)} exceeds {mach.max_premise_len}")
    return PeVerdict(True)


# ---------------------------------------------------------------------------
# Template -> program reconstruction


def materialize(t: BinaryTemplate, names: Sequence[int],
                mach: MachParams = DEFAULT_MACH) -> Iep | None:
    """Rebuild the rule a template describes under a name assignment.

    One fresh variable per var member, the named constant per const member,
    fresh singleton variables for remaining arity-required slots.  Returns
    None when the name sequence's arities are incompatible with the member
    positions.
    """
    n_rows, n_cols = t.shape
    if len(names) != n_rows:
        return None
    allowed: set[tuple[int, int]] = set()
    input_cols: set[tuple[int, int]] = set()
    for r, pn in enumerate(names):
        sig = SIG_BY_LABEL[pn]
        for c in range(sig.in_arity):
            allowed.add((r, c))
            input_cols.add((r, c))
        for c in range(sig.out_arity):
            allowed.add((r, mach.nx + c))
    grid: dict[tuple[int, int], int] = {}
    next_var = 1
    for kind, const, positions in t.members:
        if kind == "const":
            label = mach.nvar + 1 + CONST_NAMES.index(const)
        else:
            label = next_var
            next_var += 1
        for pos in positions:
            if pos not in allowed:
                return None
            if kind == "const" and pos not in input_cols:
                return None
            grid[pos] = label
    for r in range(n_rows):
        for c in range(n_cols):
            if (r, c) in allowed and (r, c) not in grid:
                grid[(r, c)] = next_var
                next_var += 1
    if next_var - 1 > mach.nvar:
        return None
    rows = []
    for r, pn in enumerate(names):
        x = tuple(grid.get((r, c), NULL) for c in range(mach.nx))
        y = tuple(grid.get((r, mach.nx + c), NULL) for c in range(mach.ny))
        rows.append(Statement(pn, x, y))
    return Iep(tuple(rows[:-1]), rows[-1])
