"""Line-oriented dialect for rule corpora with proofs.

Entries:

    Axiom <id> <weight>
    Theorem <id> [<connection list>] <weight>
    UD <id> <weight>

followed by the rule text (premise lines, ``-----``, conclusion) and, for
theorems, a ``proof`` ... ``eop`` block of numbered, justified statements.
A trailer gives the partition tallies.  Variables are letters scoped to one
entry; rule text and proof share the letter assignment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..kernel import (
    DEFAULT_MACH, Iep, MachParams, RuleError, Statement, SymbolTable,
    is_const, parse_statement_line, render_statement, validate_iep,
)
from .steps import PREMISE, Justification, Pair, Proof, ProofLine

__all__ = ["Corpus", "CorpusEntry", "parse_corpus", "render_corpus",
           "render_proof_block", "TRAILER_KEYS"]

_HEADER = re.compile(
    r"^(Axiom|Theorem|UD)\s+(\d+)(?:\s+\[([0-9 ]*)\])?(?:\s+(\d+))?\s*$")

TRAILER_KEYS = (
    ("axioms", "number of axioms"),
    ("provisional", "number of theorems (provisional)"),
    ("theorems", "number of theorems"),
    ("underivable", "number of underivable ieps"),
)


@dataclass
class CorpusEntry:
    id: int
    kind: str  # "axiom" | "theorem" | "ud"
    rule: Iep
    connection: tuple[int, ...] | None = None
    weight: int | None = None
    proof: Proof | None = None


@dataclass
class Corpus:
    entries: list[CorpusEntry] = field(default_factory=list)
    trailer: dict[str, int] = field(default_factory=dict)

    def by_id(self) -> dict[int, CorpusEntry]:
        return {e.id: e for e in self.entries}

    def rules(self) -> dict[int, Iep]:
        return {e.id: e.rule for e in self.entries}


def _parse_bracket_ints(text: str, lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split())
    except ValueError:
        raise RuleError(f"bad index list [{text}]", lineno) from None


def _split_statement_tokens(line: str, lineno: int) -> tuple[str, str]:
    """Split a numbered proof line into statement text and justification text."""
    text = line.strip()
    m = re.match(r"^(\d+)\s+(.*)$", text)
    if not m:
        raise RuleError("proof line must start with a statement number", lineno)
    rest = m.group(2).strip()
    if rest.startswith("false"):
        return "false", rest[len("false"):].strip()
    depth = 0
    groups = 0
    for i, ch in enumerate(rest):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise RuleError("unmatched ']'", lineno)
            if depth == 0:
                groups += 1
                if groups == 2:
                    return rest[:i + 1], rest[i + 1:].strip()
    raise RuleError("statement is missing its I/O lists", lineno)


def _parse_units(text: str, lineno: int) -> list[tuple[str, tuple[int, ...]]]:
    """Parse justification text into (head, indices) units."""
    units = []
    pos = 0
    while pos < len(text):
        m = re.match(r"\s*([A-Za-z0-9]+)\s*\[([0-9 ]*)\]", text[pos:])
        if not m:
            raise RuleError(f"bad justification {text!r}", lineno)
        units.append((m.group(1), _parse_bracket_ints(m.group(2), lineno)))
        pos += m.end()
    return units


def _unit_to_pair(head: str, refs: tuple[int, ...], lineno: int) -> Pair:
    if head == "dcr2":
        if len(refs) != 1:
            raise RuleError("dcr2 takes one reference", lineno)
        return Pair("dcr2", None, refs)
    if head == "sr1":
        return Pair("sr1", None, refs)
    if head.isdigit():
        return Pair("iep", int(head), refs)
    raise RuleError(f"bad split pair head {head!r}", lineno)


def parse_justification(text: str, lineno: int) -> Justification:
    text = text.strip()
    if not text or text == "premise":
        return PREMISE
    units = _parse_units(text, lineno)
    if len(units) == 1:
        head, refs = units[0]
        if head == "iot":
            return Justification("iot", refs=refs)
        if head == "sr1":
            return Justification("sr1", refs=refs)
        if head.isdigit():
            return Justification("iep", rule=int(head), refs=refs)
        raise RuleError(f"bad justification head {head!r}", lineno)
    if len(units) == 2:
        pairs = tuple(_unit_to_pair(h, r, lineno) for h, r in units)
        return Justification("split", pairs=pairs)
    raise RuleError("too many justification groups", lineno)


def parse_corpus(text: str, mach: MachParams = DEFAULT_MACH) -> Corpus:
    """Parse a corpus file into entries plus the trailer tallies."""
    corpus = Corpus()
    lines = text.splitlines()
    i = 0
    n = len(lines)

    def content(line: str) -> str:
        return line.split("#", 1)[0].strip()

    while i < n:
        line = content(lines[i])
        if not line:
            i += 1
            continue
        trailer_hit = False
        for key, prefix in TRAILER_KEYS:
            if line.startswith(prefix):
                value = line[len(prefix):].lstrip(" =").strip()
                try:
                    corpus.trailer[key] = int(value)
                except ValueError:
                    raise RuleError(f"bad trailer count {value!r}", i + 1) from None
                trailer_hit = True
                break
        if trailer_hit:
            i += 1
            continue
        m = _HEADER.match(line)
        if not m:
            raise RuleError(f"expected an entry header, got {line!r}", i + 1)
        kind_word, id_text, conn_text, weight_text = m.groups()
        kind = {"Axiom": "axiom", "Theorem": "theorem", "UD": "ud"}[kind_word]
        entry_id = int(id_text)
        connection = (_parse_bracket_ints(conn_text, i + 1)
                      if conn_text is not None else None)
        weight = int(weight_text) if weight_text is not None else None
        if kind == "theorem" and connection is None:
            raise RuleError(f"theorem {entry_id} is missing its connection list", i + 1)
        i += 1

        sym = SymbolTable(mach)
        premise: list[Statement] = []
        conclusion: Statement | None = None
        seen_sep = False
        while i < n:
            line = content(lines[i])
            if not line:
                i += 1
                continue
            if line == "proof" or _HEADER.match(line) or any(
                    line.startswith(p) for _, p in TRAILER_KEYS):
                break
            if set(line) == {"-"}:
                seen_sep = True
            elif not seen_sep:
                premise.append(parse_statement_line(line, sym, i + 1))
            elif conclusion is None:
                conclusion = parse_statement_line(line, sym, i + 1)
            else:
                raise RuleError("more than one conclusion line", i + 1)
            i += 1
        if not seen_sep or conclusion is None:
            raise RuleError(f"entry {entry_id}: incomplete rule text", i)
        rule = Iep(tuple(premise), conclusion, entry_id)
        bad = validate_iep(rule, mach)
        if bad:
            row, cond, msg = bad[0]
            raise RuleError(f"entry {entry_id}: I/O dependency ({cond}) at statement {row}: {msg}")

        proof = None
        if i < n and content(lines[i]) == "proof":
            i += 1
            proof_lines: list[ProofLine] = []
            while i < n:
                line = content(lines[i])
                if not line:
                    i += 1
                    continue
                if line == "eop":
                    i += 1
                    break
                stmt_text, just_text = _split_statement_tokens(line, i + 1)
                stmt = parse_statement_line(stmt_text, sym, i + 1)
                just = parse_justification(just_text, i + 1)
                proof_lines.append(ProofLine(stmt, just))
                i += 1
            else:
                raise RuleError(f"entry {entry_id}: proof without eop", i)
            proof = Proof(rule, tuple(proof_lines))
        corpus.entries.append(CorpusEntry(entry_id, kind, rule, connection, weight, proof))
    return corpus


# ---------------------------------------------------------------------------
# Rendering


def _entry_letter_map(entry: CorpusEntry, mach: MachParams) -> dict[int, int]:
    # Proof lines first: letters follow the order statements appear in the
    # proof, with any rule-only labels (e.g. a renamed conclusion output)
    # appended afterwards.
    mapping: dict[int, int] = {}

    def note(s: Statement) -> None:
        for l in s.labels():
            if not is_const(l, mach) and l not in mapping:
                mapping[l] = len(mapping) + 1

    if entry.proof is not None:
        for pl in entry.proof.lines:
            note(pl.statement)
    for s in entry.rule.premise:
        note(s)
    note(entry.rule.conclusion)
    return mapping


def _relabel(s: Statement, mapping: dict[int, int], mach: MachParams) -> Statement:
    def go(l: int) -> int:
        if l == 0 or is_const(l, mach):
            return l
        return mapping[l]
    return Statement(s.pn, tuple(go(l) for l in s.x), tuple(go(l) for l in s.y))


def render_justification(j: Justification) -> str:
    def group(refs: tuple[int, ...]) -> str:
        return "[" + " ".join(str(r) for r in refs) + "]"

    if j.kind == "premise":
        return ""
    if j.kind == "iot":
        return f"iot {group(j.refs)}"
    if j.kind == "sr1":
        return f"sr1 {group(j.refs)}"
    if j.kind == "iep":
        return f"{j.rule} {group(j.refs)}"
    parts = []
    for p in j.pairs:
        head = {"dcr2": "dcr2", "sr1": "sr1"}.get(p.kind, str(p.rule))
        parts.append(f"{head} {group(p.refs)}")
    return " ".join(parts)


def render_proof_block(proof: Proof, mapping: dict[int, int] | None = None,
                       mach: MachParams = DEFAULT_MACH) -> str:
    if mapping is None:
        entry = CorpusEntry(proof.target.id, "theorem", proof.target, proof=proof)
        mapping = _entry_letter_map(entry, mach)
    width = max((len(render_statement(_relabel(pl.statement, mapping, mach), mach))
                 for pl in proof.lines), default=0)
    lines = ["proof"]
    for idx, pl in enumerate(proof.lines, start=1):
        stmt = render_statement(_relabel(pl.statement, mapping, mach), mach)
        just = render_justification(pl.justification)
        if just:
            lines.append(f"  {idx:>2} {stmt:<{width}}  {just}")
        else:
            lines.append(f"  {idx:>2} {stmt}")
    lines.append("eop")
    return "\n".join(lines)


def render_corpus(corpus: Corpus, mach: MachParams = DEFAULT_MACH) -> str:
    out: list[str] = []
    for entry in corpus.entries:
        mapping = _entry_letter_map(entry, mach)
        if entry.kind == "axiom":
            header = f"Axiom {entry.id}"
        elif entry.kind == "ud":
            header = f"UD {entry.id}"
        else:
            conn = " ".join(str(c) for c in (entry.connection or ()))
            header = f"Theorem {entry.id} [{conn}]"
        if entry.weight is not None:
            header += f" {entry.weight}"
        out.append(header)
        for s in entry.rule.premise:
            out.append(render_statement(_relabel(s, mapping, mach), mach))
        out.append("-----")
        out.append(render_statement(_relabel(entry.rule.conclusion, mapping, mach), mach))
        if entry.proof is not None:
            out.append(render_proof_block(entry.proof, mapping, mach))
        out.append("")
    label_width = max(len(p) for _, p in TRAILER_KEYS) + 1
    for key, prefix in TRAILER_KEYS:
        if key in corpus.trailer:
            out.append(f"{prefix + ' =':<{label_width + 2}} {corpus.trailer[key]}")
    return "\n".join(out).rstrip() + "\n"
