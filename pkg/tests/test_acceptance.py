"""Acceptance gate: one test (and one printed verdict line) per criterion."""

import time
from collections import Counter

from machnat.cli import run_pipeline
from machnat.conjecture import parse_groups_file
from machnat.data import load_classic_rules, load_corpus
from machnat.kernel import MachParams, parse_rule_text, render_rule_text
from machnat.prover import check_proof, compute_weights, render_corpus
from machnat.prover.corpus import Corpus, CorpusEntry
from machnat.prover.kb import classify, dependency_order
from machnat.prover.search import prove
from machnat.semantics import soundness_check
from machnat.structure import structurally_equivalent

MACH = MachParams()

MINIMUM_PROOF_IDS = (
    [3, 4, 5, 6, 10, 11, 14] + list(range(18, 24)) + [25, 26, 27, 29]
    + [41, 42, 43, 45, 46, 47, 49, 52, 53, 54, 56] + list(range(58, 66))
    + [68, 70, 71] + list(range(73, 79)) + [80, 82, 83, 85, 86]
    + [91, 92, 93] + list(range(95, 99)) + [100, 102, 103]
    + list(range(105, 113)) + [115]
)


def verdict(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} {status}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {name} {detail}"


def test_criterion_1_corpus_validation():
    started = time.perf_counter()
    corpus = load_corpus()
    rules = corpus.rules()
    checked = []
    failures = []
    for entry in corpus.entries:
        if entry.proof is None:
            continue
        result = check_proof(entry.proof, rules, entry.connection, MACH)
        checked.append(entry.id)
        if not result.ok:
            failures.append((entry.id, result.line, result.reason))
    elapsed = time.perf_counter() - started
    missing = sorted(set(MINIMUM_PROOF_IDS) - set(checked))
    verdict(1, "corpus proofs all valid",
            not failures and not missing and elapsed < 5.0,
            f"{len(checked)} proofs, {elapsed:.2f}s, failures={failures[:3]}, "
            f"missing={missing}")


def test_criterion_2_soundness_sweep():
    started = time.perf_counter()
    corpus = load_corpus()
    bad = []
    for mnat in (12, 2):
        mach = MachParams(mnat=mnat)
        for entry in corpus.entries:
            if soundness_check(entry.rule, mach).verdict != "sound":
                bad.append((mnat, entry.id))
    closure = soundness_check(
        parse_rule_text("typen [a] []\ntypen [b] []\n-----\nadd [a b] [c]"), MACH)
    chain = soundness_check(
        parse_rule_text("add [a b] [c]\n-----\nadd [c b] [d]"), MachParams(mnat=2))
    ord6 = soundness_check(parse_rule_text("lt [a a] []\n-----\nfalse"), MACH)
    falsity91 = soundness_check(parse_rule_text(
        "add [a b] [c]\nadd [d b] [e]\neqn [e c] []\nlt [d a] []\n-----\nfalse"),
        MACH)
    elapsed = time.perf_counter() - started
    controls_ok = (
        closure.verdict == "unsound" and closure.counterexample is not None
        and chain.verdict == "unsound" and chain.counterexample is not None
        and ord6.verdict == "sound" and ord6.witness_count == 0
        and falsity91.verdict == "sound" and falsity91.witness_count == 0)
    verdict(2, "115 rules sound at mnat=12 and mnat=2 plus negative controls",
            not bad and controls_ok and elapsed < 60.0,
            f"{elapsed:.2f}s, bad={bad[:3]}")


def test_criterion_3_partition_reproduction():
    corpus = load_corpus()
    rules = corpus.rules()
    connections = {e.id: e.connection for e in corpus.entries
                   if e.proof is not None}
    computed = classify(rules, connections)
    counts = Counter(computed.values())
    weights = compute_weights(connections, rules)
    ud_ids = [e.id for e in corpus.entries if e.kind == "ud"]
    ax_ids = [e.id for e in corpus.entries if e.kind == "axiom"]
    ok = (counts == {"theorem": 79, "axiom": 28, "underivable": 8}
          and corpus.trailer == {"axioms": 28, "provisional": 0,
                                 "theorems": 79, "underivable": 8}
          and all(computed[e.id] == ("underivable" if e.kind == "ud" else e.kind)
                  for e in corpus.entries)
          and all(weights[i] == 0 for i in ud_ids)
          and all(weights[i] >= 1 for i in ax_ids))
    verdict(3, "recomputed partition is 28 axioms / 79 theorems / 8 underivable",
            ok, f"counts={dict(counts)}")


def test_criterion_4_weight_calibration():
    corpus = load_corpus()
    connections = {e.id: e.connection for e in corpus.entries
                   if e.connection is not None}
    weights = compute_weights(connections, [e.id for e in corpus.entries],
                              "reachable")
    spot = {9: 49, 15: 44, 48: 31, 41: 27, 54: 16, 84: 11, 12: 20, 16: 22}
    mismatched = {i: (weights[i], want) for i, want in spot.items()
                  if weights[i] != want}
    full = [e.id for e in corpus.entries if weights[e.id] != e.weight]
    verdict(4, "weights match the recorded spot set under the calibrated definition",
            not mismatched and not full,
            f"spot={spot}, mismatched={mismatched}, full_mismatches={full}")


def test_criterion_5_prover_capability():
    corpus = load_corpus()
    entries = corpus.by_id()
    kb = {e.id: e.rule for e in corpus.entries if e.kind == "axiom"}
    connections = {}
    slow = []
    invalid = []
    for tid in (2, 3, 10, 14, 41, 46, 60, 92):
        started = time.perf_counter()
        result = prove(entries[tid].rule, kb, MACH)
        elapsed = time.perf_counter() - started
        if elapsed >= 30.0:
            slow.append((tid, round(elapsed, 2)))
        if not result.found:
            invalid.append((tid, "not-found"))
            continue
        view = dict(kb)
        for record in result.lemmas:
            view[record.id] = record.rule
        for record in result.lemmas:
            if not check_proof(record.proof, view, record.connection, MACH).ok:
                invalid.append((record.id, "lemma"))
            connections[record.id] = record.connection
        if not check_proof(result.proof, view, result.connection, MACH).ok:
            invalid.append((tid, "proof"))
        connections[tid] = result.connection
        kb[tid] = entries[tid].rule
        for record in result.lemmas:
            kb[record.id] = record.rule
    acyclic = True
    try:
        dependency_order(connections)
    except Exception:
        acyclic = False
    verdict(5, "theorems 2, 3, 10, 14, 41, 46, 60, 92 proved from the 28 axioms",
            not slow and not invalid and acyclic,
            f"slow={slow}, invalid={invalid}, acyclic={acyclic}")


def test_criterion_6_structural_equivalence_suite():
    started = time.perf_counter()
    classic = load_classic_rules()
    historical_6b = parse_rule_text("mult [0 a] [b]\n-----\neqn [b a] []")
    pairs = [
        (classic["Nat 2a"], classic["Nat 5a"]),
        (classic["Nat 2a"], classic["Nat 1b"]),
        (classic["Nat 2b"], classic["Nat 5b"]),
        (classic["Nat 1c"], classic["Ord 3"]),
        (classic["Nat 3a"], classic["Nat 8a"]),
        (classic["Nat 3b"], classic["Nat 8b"]),
        (classic["Nat 3c"], classic["Nat 8c"]),
        (classic["Nat 4a"], classic["Nat 6a"]),
        (classic["Nat 4a"], classic["Ord 7a"]),
        (classic["Nat 4b"], historical_6b),
    ]
    holds = all(structurally_equivalent(a, b) for a, b in pairs)
    distinct = not structurally_equivalent(classic["Nat 2a"], classic["Nat 2b"])
    elapsed = time.perf_counter() - started
    verdict(6, "structural equivalence claims hold and 2a differs from 2b",
            holds and distinct and elapsed < 1.0, f"{elapsed:.3f}s")


def test_criterion_7_generation_smoke():
    groups = parse_groups_file(
        "group 1 names=eqn,eqn\n"
        "group 1 names=add,add\n"
        "group 1 names=mult,mult\n"
        "group 1 names=lt,le\n")

    def run_once():
        kb, notes, converged = run_pipeline(groups, MACH, max_iterations=4)
        corpus = Corpus()
        for rid in sorted(kb.rules):
            kind = kb.classification[rid]
            corpus.entries.append(CorpusEntry(
                rid, "ud" if kind == "underivable" else kind, kb.rules[rid],
                kb.connections.get(rid) if kind == "theorem" else None,
                kb.weights.get(rid, 0),
                kb.proofs.get(rid) if kind == "theorem" else None))
        tallies = kb.tallies()
        corpus.trailer = {"axioms": tallies["axioms"],
                          "provisional": tallies["provisional"],
                          "theorems": tallies["theorems"],
                          "underivable": tallies["underivable"]}
        return kb, render_corpus(corpus, MACH), converged

    kb1, report1, converged1 = run_once()
    kb2, report2, converged2 = run_once()
    texts = {render_rule_text(rule) for rule in kb1.rules.values()}
    wanted = {
        "Nat 1b": "eqn [a b] []\n-----\neqn [b a] []",
        "Nat 2a": "add [a b] [c]\n-----\nadd [b a] [d]",
        "Nat 5a": "mult [a b] [c]\n-----\nmult [b a] [d]",
        "le 1": "lt [a b] []\n-----\nle [a b] []",
    }
    missing = [name for name, text in wanted.items() if text not in texts]
    closure_rejected = "add [a b] [c]\n-----\nadd [c b] [d]" not in texts
    verdict(7, "1-row pipeline regenerates the four shapes deterministically",
            converged1 and converged2 and not missing and closure_rejected
            and report1 == report2,
            f"missing={missing}, identical={report1 == report2}")
