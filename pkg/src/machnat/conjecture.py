"""Conjecture generation from binary binding-matrix templates.

A template group fixes a premise shape (and optionally a name sequence or
repetition pattern).  All binding templates for the shape are enumerated
in a deterministic order (fewest bound slots first), instantiated with
arity-compatible name sequences, materialized into candidate rules, and
filtered: structural integrity, then exhaustive soundness, then
deduplication up to variable renaming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .kernel import (
    AP_LABELS, DEFAULT_MACH, FALSITY_PN, SIG_BY_LABEL, SIG_BY_NAME, Iep,
    MachParams, RuleError, render_rule_text,
)
from .semantics import EnumerationCapError, soundness_check
from .structure import BinaryTemplate, materialize, name_pattern, pe_integrity

__all__ = [
    "Conjecture", "GenerationResult", "TemplateGroup", "enumerate_templates",
    "generate_conjectures", "instantiate_names", "parse_groups_file",
    "valid_template",
]


@dataclass(frozen=True)
class TemplateGroup:
    """A shape of candidate rules: premise rows plus one conclusion row."""

    rows: int
    names: tuple[int, ...] | None = None  # one label per row, conclusion last
    pattern: str | None = None  # repetition pattern, e.g. "AAB"
    budget: int | None = None

    def __post_init__(self):
        if self.rows < 0:
            raise ValueError("premise row count must be >= 0")
        if self.names is not None and len(self.names) != self.rows + 1:
            raise ValueError("name sequence must cover premise rows plus the conclusion")
        if self.pattern is not None and len(self.pattern) != self.rows + 1:
            raise ValueError("pattern must cover premise rows plus the conclusion")


@dataclass(frozen=True)
class Conjecture:
    iep: Iep
    template_index: int
    names: tuple[int, ...]
    status: str  # "sound" for survivors
    reason: str | None = None


@dataclass
class GenerationResult:
    group: TemplateGroup
    survivors: list[Conjecture] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)
    truncated: bool = False


def _allowed_slots(group: TemplateGroup, mach: MachParams) -> list[tuple[int, int]]:
    n_rows = group.rows + 1
    if group.names is None:
        return [(r, c) for r in range(n_rows) for c in range(mach.nx + mach.ny)]
    slots = []
    for r, pn in enumerate(group.names):
        sig = SIG_BY_LABEL[pn]
        slots.extend((r, c) for c in range(sig.in_arity))
        slots.extend((r, mach.nx + c) for c in range(sig.out_arity))
    return slots


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


def _block_tags(block: tuple[tuple[int, int], ...], mach: MachParams
                ) -> list[tuple[str, str]]:
    tags: list[tuple[str, str]] = []
    if len(block) >= 2:
        tags.append(("var", ""))
    if all(c < mach.nx for _, c in block):
        tags.extend(("const", name) for name in ("0", "1", "mnat"))
    return tags


def valid_template(t: BinaryTemplate, mach: MachParams = DEFAULT_MACH) -> bool:
    """The enumerator's output predicate, checkable on any template."""
    seen: set[tuple[int, int]] = set()
    n_rows, n_cols = t.shape
    for kind, const, positions in t.members:
        if not positions or (kind == "var" and len(positions) < 2):
            return False
        if kind == "const" and const not in ("0", "1", "mnat"):
            return False
        for r, c in positions:
            if not (0 <= r < n_rows and 0 <= c < n_cols) or (r, c) in seen:
                return False
            if kind == "const" and c >= mach.nx:
                return False
            seen.add((r, c))
    return tuple(sorted(t.members)) == t.members


def enumerate_templates(group: TemplateGroup, mach: MachParams = DEFAULT_MACH
                        ) -> tuple[list[BinaryTemplate], bool]:
    """All canonical binding templates for the group's shape, budget-capped.

    Deterministic order: by number of bound slots, then slot choice, then
    partition structure, then tags.  Returns (templates, truncated).
    """
    slots = _allowed_slots(group, mach)
    budget = group.budget if group.budget is not None else mach.template_budget
    shape = (group.rows + 1, mach.nx + mach.ny)
    out: list[BinaryTemplate] = []
    for k in range(len(slots) + 1):
        for subset in itertools.combinations(slots, k):
            for blocks in _set_partitions(subset):
                options = [_block_tags(b, mach) for b in blocks]
                if any(not o for o in options):
                    continue
                for combo in itertools.product(*options):
                    members = tuple(sorted(
                        (kind, const, tuple(sorted(block)))
                        for (kind, const), block in zip(combo, blocks)))
                    if len(out) >= budget:
                        return out, True
                    out.append(BinaryTemplate(shape, members, group.names))
    return out, False


def instantiate_names(t: BinaryTemplate, mach: MachParams = DEFAULT_MACH,
                      alphabet: Sequence[int] = AP_LABELS,
                      pattern: str | None = None
                      ) -> list[tuple[tuple[int, ...], Iep]]:
    """Materialize the template under every compatible name sequence.

    The conclusion row may also take the falsity name: a rule concluding
    falsity asserts its premise is computable nowhere.
    """
    n_rows = t.shape[0]
    if t.names is not None:
        sequences: Iterator[tuple[int, ...]] = iter([t.names])
    else:
        sequences = (prefix + (last,)
                     for prefix in itertools.product(alphabet, repeat=n_rows - 1)
                     for last in tuple(alphabet) + (FALSITY_PN,))
    want = name_pattern(pattern) if pattern is not None else None
    out = []
    for names in sequences:
        if want is not None and name_pattern(names) != want:
            continue
        iep = materialize(t, names, mach)
        if iep is not None:
            out.append((tuple(names), iep))
    return out


def generate_conjectures(group: TemplateGroup, mach: MachParams = DEFAULT_MACH
                         ) -> GenerationResult:
    """Enumerate, instantiate, filter and deduplicate one group's candidates."""
    result = GenerationResult(group)
    stats = {"templates": 0, "instantiated": 0, "pe_rejected": 0,
             "unsound": 0, "vacuous": 0, "duplicate": 0, "over_cap": 0}
    templates, truncated = enumerate_templates(group, mach)
    result.truncated = truncated
    stats["templates"] = len(templates)
    seen: set[str] = set()
    for ti, template in enumerate(templates):
        for names, iep in instantiate_names(template, mach, pattern=group.pattern):
            stats["instantiated"] += 1
            verdict = pe_integrity(iep, mach)
            if not verdict.ok:
                stats["pe_rejected"] += 1
                continue
            try:
                sound = soundness_check(iep, mach)
            except EnumerationCapError:
                stats["over_cap"] += 1
                continue
            if sound.verdict != "sound":
                stats["unsound" if sound.verdict == "unsound" else "vacuous"] += 1
                continue
            key = render_rule_text(iep, mach)
            if key in seen:
                stats["duplicate"] += 1
                continue
            seen.add(key)
            result.survivors.append(Conjecture(iep, ti, names, "sound"))
    result.stats = stats
    return result


def parse_groups_file(text: str) -> list[TemplateGroup]:
    """Parse ``group <rows> [names=...] [pattern=...] [budget=...]`` lines."""
    groups = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "group" or len(parts) < 2 or not parts[1].isdigit():
            raise RuleError("expected 'group <rows> [key=value ...]'", lineno)
        rows = int(parts[1])
        names: tuple[int, ...] | None = None
        pattern: str | None = None
        budget: int | None = None
        for item in parts[2:]:
            key, _, value = item.partition("=")
            if not value:
                raise RuleError(f"bad group option {item!r}", lineno)
            if key == "names":
                try:
                    names = tuple(SIG_BY_NAME[n].label for n in value.split(","))
                except KeyError as exc:
                    raise RuleError(f"unknown atomic-program name {exc}", lineno) from None
            elif key == "pattern":
                pattern = value
            elif key == "budget":
                budget = int(value)
            else:
                raise RuleError(f"unknown group option {key!r}", lineno)
        try:
            groups.append(TemplateGroup(rows, names, pattern, budget))
        except ValueError as exc:
            raise RuleError(str(exc), lineno) from None
    return groups
