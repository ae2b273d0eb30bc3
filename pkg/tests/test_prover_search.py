import pytest

from machnat.kernel import MachParams, parse_rule_text
from machnat.prover import KnowledgeBase, check_proof, compute_weights
from machnat.prover.kb import CycleError, dependency_order
from machnat.prover.search import partition, prove, reduce_premise

MACH = MachParams()


@pytest.fixture(scope="module")
def axioms(corpus):
    return {e.id: e.rule for e in corpus.entries if e.kind == "axiom"}


def assert_proves(target, rules, mach=MACH, **kwargs):
    result = prove(target, rules, mach, **kwargs)
    assert result.found
    view = dict(rules)
    for record in result.lemmas:
        view[record.id] = record.rule
        lemma_check = check_proof(record.proof, view, record.connection, mach)
        assert lemma_check.ok, (record.id, lemma_check)
    main = check_proof(result.proof, view, result.connection, mach)
    assert main.ok, main
    return result


def test_prove_symmetry_from_reflexivity(entries):
    # The symmetry of equality follows from typed reflexivity plus
    # substitution, mirroring the bundled proof's dependencies.
    kb = {2: entries[2].rule}
    result = assert_proves(entries[10].rule, kb)
    assert set(result.connection) <= {2}


def test_prove_transitivity_of_lt(entries, axioms):
    result = assert_proves(entries[41].rule, axioms)
    assert set(result.connection) <= {15, 48}


def test_prove_respects_bounds(entries, axioms):
    result = prove(entries[41].rule, axioms, MACH, max_depth=1, max_statements=3)
    assert not result.found


def test_prove_underivable_rule_not_found(entries, axioms):
    assert not prove(entries[8].rule, axioms, MACH).found


def test_prove_restatement_goal_is_not_found(axioms):
    target = parse_rule_text("le [a b] []\n-----\nle [a b] []")
    assert not prove(target, axioms, MACH).found


def test_prove_synthesizes_falsity_lemmas(entries, axioms):
    kb = dict(axioms)
    for tid in (2, 3, 10, 14):
        result = assert_proves(entries[tid].rule, kb)
        kb[tid] = entries[tid].rule
        for record in result.lemmas:
            kb[record.id] = record.rule
    result = assert_proves(entries[92].rule, kb)
    assert result.lemmas, "cancellation needs a packaged falsity refutation"


def test_reduce_rejects_superfluous_premise(corpus_rules):
    rule = parse_rule_text("eqn [a b] []\ntypen [c] []\n-----\neqn [b a] []")
    result = reduce_premise(rule, corpus_rules, MACH)
    assert result.rejected and result.witness == (0,)


def test_reduce_keeps_commutativity(entries, corpus_rules):
    assert not reduce_premise(entries[12].rule, corpus_rules, MACH).rejected


def test_reduce_keeps_empty_premise_rule(entries, corpus_rules):
    assert not reduce_premise(entries[30].rule, corpus_rules, MACH).rejected


def test_reduce_rejects_restatement(corpus_rules):
    rule = parse_rule_text("add [a b] [c]\ntypen [a] []\n-----\nadd [a b] [d]")
    assert reduce_premise(rule, corpus_rules, MACH).rejected


class TestWeights:
    def test_reachable_chain(self):
        # T2 -> T1 -> A: both definitions agree on a single chain.
        conn = {2: (1,), 1: (0,)}
        reach = compute_weights(conn, [0, 1, 2], "reachable")
        paths = compute_weights(conn, [0, 1, 2], "paths")
        assert reach == {0: 2, 1: 1, 2: 0}
        assert paths == {0: 2, 1: 1, 2: 0}

    def test_path_counting_diverges_on_diamonds(self):
        # T3 depends on T1 and T2, both of which depend on A: one theorem
        # reaches A twice, so paths exceed reachability.
        conn = {1: (0,), 2: (0,), 3: (1, 2)}
        reach = compute_weights(conn, [0, 1, 2, 3], "reachable")
        paths = compute_weights(conn, [0, 1, 2, 3], "paths")
        assert reach[0] == 3
        assert paths[0] == 4

    def test_empty_kb(self):
        assert compute_weights({}, [1, 2]) == {1: 0, 2: 0}

    def test_cycle_detection(self):
        with pytest.raises(CycleError):
            dependency_order({1: (2,), 2: (1,)})


class TestPartition:
    def test_single_sound_rule_becomes_axiom_if_used_else_underivable(self, entries):
        kb = KnowledgeBase()
        kb.add_rule(entries[12].rule, 1)
        partition(kb, MACH)
        # Nothing else to derive from: no proof, never used.
        assert kb.classification[1] == "underivable"

    def test_derivable_rule_becomes_theorem(self, entries):
        kb = KnowledgeBase()
        kb.add_rule(entries[15].rule, 1)   # lt -> le
        kb.add_rule(entries[48].rule, 2)   # le, lt -> lt
        kb.add_rule(entries[41].rule, 3)   # lt, lt -> lt
        partition(kb, MACH)
        assert kb.classification[3] == "theorem"
        assert kb.classification[1] == "axiom"
        assert kb.classification[2] == "axiom"
        assert set(kb.connections[3]) <= {1, 2}

    def test_mutual_derivability_prefers_heavier_axiom(self):
        # Two interderivable symmetry forms; extra users make rule 1 heavier.
        a = parse_rule_text("eqn [a b] []\n-----\neqn [b a] []")
        kb = KnowledgeBase()
        kb.add_rule(a, 1)
        kb.add_rule(a, 2)
        partition(kb, MACH)
        kinds = sorted(kb.classification.values())
        assert kinds == ["axiom", "theorem"]
        # Deterministic tie-break: the smaller id stays the axiom.
        assert kb.classification[1] == "axiom"
        assert kb.classification[2] == "theorem"
        order = dependency_order(kb.connections)
        assert set(order) >= set(kb.connections)

    def test_partition_graph_acyclic(self, entries):
        kb = KnowledgeBase()
        for rid in (15, 41, 46, 48):
            kb.add_rule(entries[rid].rule, rid)
        partition(kb, MACH)
        dependency_order(kb.connections)  # raises on a cycle
