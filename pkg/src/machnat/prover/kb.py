"""The evolving partitioned rule list: axioms, theorems, underivables.

Theorem connection lists induce a dependency graph; weights count, for each
rule, how many theorem proofs trace back to it as a dependency.  The graph
must stay acyclic for the partition to be meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..kernel import Iep
from .corpus import Corpus
from .steps import Proof

__all__ = ["CycleError", "KnowledgeBase", "classify", "compute_weights",
           "dependency_order"]


class CycleError(ValueError):
    """The theorem dependency graph contains a cycle."""


def dependency_order(connections: Mapping[int, Sequence[int]]) -> list[int]:
    """Topological order of proved rules (dependencies first).

    Edges go from each proved rule to the entries of its connection list;
    entries without connection lists are sinks.  Raises CycleError.
    """
    order: list[int] = []
    state: dict[int, int] = {}  # 1 = visiting, 2 = done

    def visit(node: int, trail: tuple[int, ...]) -> None:
        if state.get(node) == 2:
            return
        if state.get(node) == 1:
            cycle = trail[trail.index(node):] + (node,)
            raise CycleError(f"dependency cycle: {' -> '.join(map(str, cycle))}")
        state[node] = 1
        for dep in connections.get(node, ()):
            visit(dep, trail + (node,))
        state[node] = 2
        order.append(node)

    for node in sorted(connections):
        visit(node, ())
    return order


def compute_weights(connections: Mapping[int, Sequence[int]],
                    all_ids: Iterable[int],
                    definition: str = "reachable") -> dict[int, int]:
    """Weights of every rule id under the chosen definition.

    reachable -- the number of theorems whose dependency closure contains
                 the rule (the calibrated default).
    paths     -- the number of distinct dependency paths from any theorem
                 down to the rule (documented alternative).
    """
    order = dependency_order(connections)
    weights = {i: 0 for i in all_ids}
    for i in connections:
        weights.setdefault(i, 0)
    if definition == "reachable":
        closures: dict[int, frozenset[int]] = {}
        for node in order:  # dependencies precede dependents
            closure: set[int] = set()
            for dep in connections.get(node, ()):
                closure.add(dep)
                closure |= closures.get(dep, frozenset())
            closures[node] = frozenset(closure)
        for node in connections:
            for dep in closures[node]:
                weights[dep] = weights.get(dep, 0) + 1
    elif definition == "paths":
        users: dict[int, list[int]] = {}
        for user, deps in connections.items():
            for dep in deps:
                users.setdefault(dep, []).append(user)
        paths: dict[int, int] = {}
        for node in reversed(order):  # dependents before their dependencies
            paths[node] = sum(1 + paths.get(u, 0) for u in users.get(node, ()))
        for node in weights:
            weights[node] = paths.get(
                node, sum(1 + paths.get(u, 0) for u in users.get(node, ())))
    else:
        raise ValueError(f"unknown weight definition {definition!r}")
    return weights


def classify(rules: Mapping[int, Iep],
             connections: Mapping[int, Sequence[int]]) -> dict[int, str]:
    """Partition rules given which ones have accepted proofs.

    Rules with proofs are theorems; unproved rules used in at least one
    connection list are axioms; the rest are underivable.
    """
    used: set[int] = set()
    for deps in connections.values():
        used.update(deps)
    out = {}
    for rule_id in rules:
        if rule_id in connections:
            out[rule_id] = "theorem"
        elif rule_id in used:
            out[rule_id] = "axiom"
        else:
            out[rule_id] = "underivable"
    return out


@dataclass
class KnowledgeBase:
    """Rules with their proofs, connection lists, classification and weights."""

    rules: dict[int, Iep] = field(default_factory=dict)
    proofs: dict[int, Proof] = field(default_factory=dict)
    connections: dict[int, tuple[int, ...]] = field(default_factory=dict)
    classification: dict[int, str] = field(default_factory=dict)
    weights: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> "KnowledgeBase":
        kb = cls()
        for entry in corpus.entries:
            kb.rules[entry.id] = entry.rule
            kb.classification[entry.id] = entry.kind if entry.kind != "ud" else "underivable"
            if entry.proof is not None:
                kb.proofs[entry.id] = entry.proof
            if entry.connection is not None:
                kb.connections[entry.id] = entry.connection
            if entry.weight is not None:
                kb.weights[entry.id] = entry.weight
        return kb

    def next_id(self) -> int:
        return max(self.rules, default=0) + 1

    def add_rule(self, rule: Iep, rule_id: int | None = None) -> int:
        rule_id = self.next_id() if rule_id is None else rule_id
        self.rules[rule_id] = Iep(rule.premise, rule.conclusion, rule_id)
        self.classification[rule_id] = "provisional"
        return rule_id

    def accept_proof(self, rule_id: int, proof: Proof, connection: Sequence[int]) -> None:
        self.proofs[rule_id] = proof
        self.connections[rule_id] = tuple(connection)

    def drop_proof(self, rule_id: int) -> None:
        self.proofs.pop(rule_id, None)
        self.connections.pop(rule_id, None)

    def reclassify(self, weight_definition: str = "reachable") -> None:
        """Recompute the partition and weights from the accepted proofs."""
        self.classification = classify(self.rules, self.connections)
        self.weights = compute_weights(self.connections, self.rules, weight_definition)

    def tallies(self) -> dict[str, int]:
        counts = {"axioms": 0, "provisional": 0, "theorems": 0, "underivable": 0}
        for kind in self.classification.values():
            if kind == "axiom":
                counts["axioms"] += 1
            elif kind == "theorem":
                counts["theorems"] += 1
            elif kind == "provisional":
                counts["provisional"] += 1
            else:
                counts["underivable"] += 1
        return counts
