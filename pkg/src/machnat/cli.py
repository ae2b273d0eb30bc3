"""Command-line entry points.

Subcommands: check, soundness, prove, generate, run, weights, report.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 bound exhaustion (including prove not-found and enumeration caps).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .conjecture import generate_conjectures, parse_groups_file
from .kernel import (
    DEFAULT_MACH, Iep, MachParams, RuleError, parse_rule_text,
    parse_rules_file, render_rule_text,
)
from .semantics import EnumerationCapError, soundness_check
from .prover.corpus import (
    Corpus, CorpusEntry, parse_corpus, render_corpus, render_proof_block,
)
from .prover.kb import KnowledgeBase, compute_weights
from .prover.search import partition, prove, reduce_premise

OK, VERIFY_FAILED, USAGE, EXHAUSTED = 0, 1, 2, 3


def _mach_from_args(args) -> MachParams:
    return MachParams(
        mnat=args.mnat, nvar=args.nvar,
        max_premise_len=args.max_premise,
        max_proof_depth=args.max_depth,
        max_derived_statements=args.max_statements,
    )


def _read(path: str) -> str:
    return Path(path).read_text("utf-8")


def _write_out(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


def _load_rules_any(path: str, mach: MachParams) -> list[tuple[str, Iep]]:
    """Load a corpus file, a named-rules file, or a single bare rule."""
    text = _read(path)
    stripped = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    stripped = [l for l in stripped if l]
    if any(l.split()[0] in ("Axiom", "Theorem", "UD") for l in stripped):
        corpus = parse_corpus(text, mach)
        return [(str(e.id), e.rule) for e in corpus.entries]
    if any(l.startswith("rule ") for l in stripped):
        return parse_rules_file(text, mach)
    return [("1", parse_rule_text(text, mach))]


# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    mach = _mach_from_args(args)
    corpus = parse_corpus(_read(args.corpus), mach)
    from .prover.steps import check_proof

    rules = corpus.rules()
    proofs = [e for e in corpus.entries if e.proof is not None]
    if not proofs:
        print("warning: no proofs found")
        return OK
    status = OK
    for entry in proofs:
        result = check_proof(entry.proof, rules, entry.connection, mach)
        if result.ok:
            conn = " ".join(str(c) for c in result.connection)
            print(f"theorem {entry.id} valid [{conn}]")
        else:
            where = f"line {result.line}" if result.line else "connection list"
            print(f"theorem {entry.id} invalid {where}: {result.reason}")
            status = VERIFY_FAILED
    counts = {"axiom": 0, "theorem": 0, "ud": 0}
    for e in corpus.entries:
        counts[e.kind] += 1
    expected = {"axioms": counts["axiom"], "theorems": counts["theorem"],
                "underivable": counts["ud"]}
    for key, value in expected.items():
        declared = corpus.trailer.get(key)
        if declared is not None and declared != value:
            print(f"trailer mismatch: {key} declared {declared}, counted {value}")
            status = VERIFY_FAILED
    print(f"checked {len(proofs)} proofs")
    return status


def cmd_soundness(args) -> int:
    mach = _mach_from_args(args)
    rules = _load_rules_any(args.rules, mach)
    status = OK
    sound = 0
    for name, rule in rules:
        try:
            verdict = soundness_check(rule, mach)
        except EnumerationCapError as exc:
            print(f"{name} skipped-over-cap ({exc})")
            status = EXHAUSTED if status == OK else status
            continue
        if verdict.verdict == "sound":
            sound += 1
            print(f"{name} sound witnesses={verdict.witness_count}")
        else:
            cx = ""
            if verdict.counterexample:
                from .kernel import label_token
                cx = " counterexample " + " ".join(
                    f"{label_token(l, mach)}={v}"
                    for l, v in sorted(verdict.counterexample.items()))
            print(f"{name} {verdict.verdict} witnesses={verdict.witness_count}{cx}")
            status = VERIFY_FAILED
    print(f"{sound}/{len(rules)} sound at mnat={mach.mnat}")
    return status


def cmd_prove(args) -> int:
    mach = _mach_from_args(args)
    base = _load_rules_any(args.axioms, mach)
    rules: dict[int, Iep] = {}
    for name, rule in base:
        rid = int(name) if name.isdigit() else len(rules) + 1
        rules[rid] = Iep(rule.premise, rule.conclusion, rid)
    goals = _load_rules_any(args.goal, mach)
    if not goals:
        print("no goal rule found", file=sys.stderr)
        return USAGE
    _, goal = goals[0]
    result = prove(goal, rules, mach)
    if result.proof is None:
        print("not-found (bound exhaustion is not a disproof)")
        return EXHAUSTED
    lines = [render_rule_text(goal, mach)]
    for record in result.lemmas:
        lines.append(f"Lemma {record.id} [{' '.join(map(str, record.connection))}]")
        lines.append(render_rule_text(record.rule, mach))
        lines.append(render_proof_block(record.proof, mach=mach))
    conn = " ".join(str(c) for c in result.connection)
    lines.append(f"proof found, connection list [{conn}]")
    lines.append(render_proof_block(result.proof, mach=mach))
    print("\n".join(lines))
    return OK


def cmd_generate(args) -> int:
    mach = _mach_from_args(args)
    groups = parse_groups_file(_read(args.groups))
    out = []
    status = OK
    for gi, group in enumerate(groups, start=1):
        result = generate_conjectures(group, mach)
        out.append(f"# group {gi}: rows={group.rows} stats={result.stats}"
                   + (" TRUNCATED" if result.truncated else ""))
        if result.truncated:
            status = EXHAUSTED
        for i, c in enumerate(result.survivors, start=1):
            out.append(f"rule g{gi}-{i}")
            out.append(render_rule_text(c.iep, mach))
            out.append("")
    _write_out(args, "\n".join(out).rstrip() + "\n")
    return status


def _kb_to_corpus(kb: KnowledgeBase) -> Corpus:
    corpus = Corpus()
    for rid in sorted(kb.rules):
        kind = kb.classification.get(rid, "provisional")
        entry_kind = {"axiom": "axiom", "theorem": "theorem",
                      "underivable": "ud", "provisional": "ud"}[kind]
        corpus.entries.append(CorpusEntry(
            rid, entry_kind, kb.rules[rid],
            kb.connections.get(rid) if entry_kind == "theorem" else None,
            kb.weights.get(rid, 0),
            kb.proofs.get(rid) if entry_kind == "theorem" else None))
    tallies = kb.tallies()
    corpus.trailer = {"axioms": tallies["axioms"],
                      "provisional": tallies["provisional"],
                      "theorems": tallies["theorems"],
                      "underivable": tallies["underivable"]}
    return corpus


def run_pipeline(groups, mach: MachParams, max_iterations: int = 4
                 ) -> tuple[KnowledgeBase, list[str], bool]:
    """Conjecture, check, prove and partition until nothing changes."""
    kb = KnowledgeBase()
    notes: list[str] = []
    converged = False
    for iteration in range(1, max_iterations + 1):
        existing = {render_rule_text(r, mach) for r in kb.rules.values()}
        added = 0
        for gi, group in enumerate(groups, start=1):
            result = generate_conjectures(group, mach)
            if result.truncated:
                notes.append(f"iteration {iteration}: group {gi} template budget exhausted")
            for c in result.survivors:
                text = render_rule_text(c.iep, mach)
                if text in existing:
                    continue
                reduced = reduce_premise(c.iep, kb.rules, mach)
                if reduced.rejected:
                    continue
                kb.add_rule(c.iep)
                existing.add(text)
                added += 1
        before = (dict(kb.classification), dict(kb.connections))
        partition(kb, mach)
        after = (dict(kb.classification), dict(kb.connections))
        if added == 0 and before == after:
            converged = True
            notes.append(f"converged after {iteration} iteration(s)")
            break
    if not converged:
        notes.append(f"stopped at the iteration cap ({max_iterations})")
    return kb, notes, converged


def cmd_run(args) -> int:
    mach = _mach_from_args(args)
    groups = parse_groups_file(_read(args.groups))
    kb, notes, converged = run_pipeline(groups, mach, args.max_iterations)
    corpus = _kb_to_corpus(kb)
    header = "".join(f"# {note}\n" for note in notes)
    _write_out(args, header + render_corpus(corpus, mach))
    if args.out:
        tallies = kb.tallies()
        print(f"{len(kb.rules)} rules: {tallies['axioms']} axioms, "
              f"{tallies['theorems']} theorems, {tallies['underivable']} underivable"
              + ("" if converged else " (iteration cap reached)"))
    return OK if converged else EXHAUSTED


def cmd_weights(args) -> int:
    mach = _mach_from_args(args)
    corpus = parse_corpus(_read(args.corpus), mach)
    connections = {e.id: e.connection for e in corpus.entries
                   if e.connection is not None}
    recomputed = compute_weights(connections, [e.id for e in corpus.entries],
                                 args.definition)
    status = OK
    for e in corpus.entries:
        got = recomputed[e.id]
        if e.weight is None:
            print(f"{e.id} declared=- recomputed={got}")
            continue
        match = "ok" if got == e.weight else "MISMATCH"
        if got != e.weight:
            status = VERIFY_FAILED
        print(f"{e.id} declared={e.weight} recomputed={got} {match}")
    print(f"definition={args.definition}")
    return status


def cmd_report(args) -> int:
    mach = _mach_from_args(args)
    corpus = parse_corpus(_read(args.corpus), mach)
    counts = {"axiom": 0, "theorem": 0, "ud": 0}
    for e in corpus.entries:
        counts[e.kind] += 1
    corpus.trailer = {"axioms": counts["axiom"], "provisional": 0,
                      "theorems": counts["theorem"], "underivable": counts["ud"]}
    _write_out(args, render_corpus(corpus, mach))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="machnat",
        description="Rule discovery, soundness checking and proving for "
                    "arithmetic over machine-bounded naturals.")
    parser.add_argument("--mnat", type=int, default=DEFAULT_MACH.mnat,
                        help="maximum machine number (default 12)")
    parser.add_argument("--nvar", type=int, default=DEFAULT_MACH.nvar,
                        help="variable pool size (default 26)")
    parser.add_argument("--max-premise", type=int, default=DEFAULT_MACH.max_premise_len)
    parser.add_argument("--max-depth", type=int, default=DEFAULT_MACH.max_proof_depth)
    parser.add_argument("--max-statements", type=int,
                        default=DEFAULT_MACH.max_derived_statements)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("check", help="validate every proof in a corpus")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("soundness", help="exhaustively check rules over {0..mnat}")
    p.add_argument("rules")
    p.set_defaults(func=cmd_soundness)

    p = sub.add_parser("prove", help="search for a proof of a goal rule")
    p.add_argument("axioms")
    p.add_argument("goal")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("generate", help="generate sound conjectures for template groups")
    p.add_argument("--groups", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="full conjecture/check/prove iteration loop")
    p.add_argument("--groups", required=True)
    p.add_argument("--out")
    p.add_argument("--max-iterations", type=int, default=4)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("weights", help="recompute dependency weights of a corpus")
    p.add_argument("corpus")
    p.add_argument("--definition", choices=("reachable", "paths"),
                   default="reachable")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("report", help="re-emit a corpus in canonical form")
    p.add_argument("corpus")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RuleError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
