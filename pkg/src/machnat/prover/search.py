"""Forward-chaining proof search, premise reduction and the partition loop.

The search saturates a line list under type introduction (iot), rule
application, substitution (sr1) and disjunction splitting, deduplicating
statements up to output renaming, until the target conclusion appears or
the bounds are hit.  Split pairs admit one application per operand; when a
branch needs a multi-step refutation, the search packages that refutation
as a standalone falsity rule (a lemma), proves it separately, and applies
it as the pair.  Returned proofs are pruned, renumbered, relabelled and
re-checked before they leave the search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from ..kernel import (
    EQN, LE, NULL, TRICH, TYPEN, DEFAULT_MACH, Iep, MachParams, Statement,
    conc, disjunction_operands, falsity, is_const, is_var, primary_inputs,
    render_rule_text, validate_io_dependency,
)
from ..semantics import soundness_check
from .kb import CycleError, KnowledgeBase, dependency_order
from .steps import (
    PREMISE, Justification, Pair, Proof, ProofLine, check_proof,
    conclusion_input_key, statement_key,
)

__all__ = ["LemmaRecord", "ProveResult", "ReduceResult", "partition", "prove",
           "reduce_premise"]


@dataclass(frozen=True)
class LemmaRecord:
    """A falsity rule synthesized to discharge one split branch."""

    id: int
    rule: Iep
    proof: Proof
    connection: tuple[int, ...]


@dataclass(frozen=True)
class ProveResult:
    proof: Proof | None
    connection: tuple[int, ...] = ()
    lemmas: tuple[LemmaRecord, ...] = ()

    @property
    def found(self) -> bool:
        return self.proof is not None


@dataclass(frozen=True)
class ReduceResult:
    rule: Iep
    rejected: bool
    witness: tuple[int, ...] | None = None  # premise rows that already suffice
    exhausted: bool = False


def _match_index(lines: Sequence[Statement]):
    by_pn: dict[int, list[int]] = {}
    for i, s in enumerate(lines, start=1):
        by_pn.setdefault(s.pn, []).append(i)
    return by_pn


def _iter_matches(rows: Sequence[Statement], lines: Sequence[Statement],
                  by_pn: Mapping[int, list[int]], mach: MachParams,
                  newer_than: int = 0, need: int | None = None,
                  ) -> Iterator[tuple[dict[int, int], tuple[int, ...]]]:
    """All (sigma, refs) sending the pattern rows onto lines, in ref order.

    ``newer_than`` requires at least one chosen ref above that index;
    ``need`` requires one chosen ref to equal that index.
    """
    n = len(rows)
    need_pn = lines[need - 1].pn if need is not None else None
    # Which suffixes can still pick up the required line's program name.
    suffix_has_pn = [False] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_has_pn[i] = suffix_has_pn[i + 1] or rows[i].pn == need_pn
    sigma: dict[int, int] = {}
    refs: list[int] = []

    def rec(i: int, has_new: bool, has_need: bool) -> Iterator:
        if i == n:
            yield dict(sigma), tuple(refs)
            return
        if need is not None and not has_need and not suffix_has_pn[i]:
            return
        last = i == n - 1
        for ref in by_pn.get(rows[i].pn, ()):
            if last:
                if need is not None and not has_need and ref != need:
                    continue
                if newer_than and not has_new and ref <= newer_than:
                    continue
            trail: list[int] = []
            target = lines[ref - 1]
            ok = True
            for pl, tl in zip(rows[i].x + rows[i].y, target.x + target.y):
                if pl == NULL or tl == NULL:
                    if pl != tl:
                        ok = False
                        break
                    continue
                if is_const(pl, mach):
                    if pl != tl:
                        ok = False
                        break
                    continue
                bound = sigma.get(pl)
                if bound is None:
                    sigma[pl] = tl
                    trail.append(pl)
                elif bound != tl:
                    ok = False
                    break
            if ok:
                refs.append(ref)
                yield from rec(i + 1, has_new or ref > newer_than,
                               has_need or ref == need)
                refs.pop()
            for key in trail:
                del sigma[key]

    yield from rec(0, not newer_than, need is None)


def _iter_matches_at(rows: Sequence[Statement], lines: Sequence[Statement],
                     by_pn: Mapping[int, list[int]], mach: MachParams,
                     need: int) -> Iterator[tuple[dict[int, int], tuple[int, ...]]]:
    """Matches that place the required line first; cheaper than a full scan."""
    pivot = lines[need - 1]
    seen_refs: set[tuple[int, ...]] = set()
    sigma: dict[int, int] = {}
    refs: list[int | None] = [None] * len(rows)

    def bind(row: Statement, target: Statement) -> list[int] | None:
        trail: list[int] = []
        for pl, tl in zip(row.x + row.y, target.x + target.y):
            if pl == NULL or tl == NULL:
                if pl != tl:
                    break
                continue
            if is_const(pl, mach):
                if pl != tl:
                    break
                continue
            bound = sigma.get(pl)
            if bound is None:
                sigma[pl] = tl
                trail.append(pl)
            elif bound != tl:
                break
        else:
            return trail
        for key in trail:
            del sigma[key]
        return None

    def rec(order: list[int], i: int) -> Iterator:
        if i == len(order):
            out = tuple(refs)  # type: ignore[arg-type]
            if out not in seen_refs:
                seen_refs.add(out)
                yield dict(sigma), out
            return
        row = rows[order[i]]
        for ref in by_pn.get(row.pn, ()):
            trail = bind(row, lines[ref - 1])
            if trail is None:
                continue
            refs[order[i]] = ref
            yield from rec(order, i + 1)
            refs[order[i]] = None
            for key in trail:
                del sigma[key]

    for j, row in enumerate(rows):
        if row.pn != pivot.pn:
            continue
        trail = bind(row, pivot)
        if trail is None:
            continue
        refs[j] = need
        order = [k for k in range(len(rows)) if k != j]
        yield from rec(order, 0)
        refs[j] = None
        for key in trail:
            del sigma[key]


def _sr1_outcomes(target: Statement, eq: Statement) -> Iterator[tuple[int, ...]]:
    """Possible input tuples after substituting via the equality, in order."""
    u, v = eq.x[0], eq.x[1]
    for src, dst in ((u, v), (v, u)):
        if src == dst:
            continue
        occ = [i for i, l in enumerate(target.x) if l == src]
        if not occ:
            continue
        for r in range(1, len(occ) + 1):
            for subset in itertools.combinations(occ, r):
                x = list(target.x)
                for i in subset:
                    x[i] = dst
                yield tuple(x)


class _Search:
    def __init__(self, target: Iep, rules: Mapping[int, Iep], mach: MachParams,
                 *, allow_lemmas: bool, max_depth: int, max_statements: int,
                 lemma_base: int):
        self.target = target
        self.mach = mach
        self.kb: dict[int, Iep] = dict(rules)
        self.allow_lemmas = allow_lemmas
        self.max_depth = max_depth
        self.max_statements = max_statements
        self.lines: list[Statement] = list(target.premise)
        self.justs: list[Justification] = [PREMISE] * len(target.premise)
        self.seen: dict[tuple, int] = {
            statement_key(s): i for i, s in enumerate(self.lines, start=1)}
        self.goal_key = statement_key(target.conclusion)
        self.fresh = itertools.count(mach.nvar + 4)
        self.lemmas: dict[int, LemmaRecord] = {}
        self.lemma_ids: dict[str, int | None] = {}
        self.next_lemma_id = max(lemma_base, max(rules, default=0) + 1)
        self.sorted_rules: list[tuple[int, Iep]] = sorted(self.kb.items())
        self.falsity_rules: list[tuple[int, Iep]] = [
            (rid, r) for rid, r in self.sorted_rules
            if r.conclusion.is_falsity and r.premise]
        # For branch sweeps: rules indexed by the program names appearing in
        # their premises (a pair can only involve the operand through one).
        self.rules_by_premise_pn: dict[int, list[tuple[int, Iep]]] = {}
        for rid, r in self.sorted_rules:
            if r.conclusion.is_falsity or not r.premise:
                continue
            for pn in {row.pn for row in r.premise}:
                self.rules_by_premise_pn.setdefault(pn, []).append((rid, r))
        # Derived disjunctions are only worth splitting when their variables
        # all matter to the conclusion; premise lines and self-disjunctions
        # are always split.
        self.relevant = {l for l in target.conclusion.labels()
                         if is_var(l, mach)}
        # Statements nothing can consume are dead weight: keep a statement
        # only when some rule premise mentions its program name, it is the
        # goal, or it is a disjunction this search would split.
        self.useful_pns = {row.pn for rule in self.kb.values()
                           for row in rule.premise}
        self.useful_pns.add(target.conclusion.pn)

    # -- line bookkeeping ---------------------------------------------------

    def goal_ref(self) -> int | None:
        return self.seen.get(self.goal_key)

    def emit(self, pn: int, x: tuple[int, ...], ymask: tuple[bool, ...],
             just: Justification) -> bool:
        key = (pn, x, ymask)
        if key in self.seen or len(self.lines) >= self.max_statements:
            return False
        if key != self.goal_key and pn not in self.useful_pns:
            if pn not in (LE, TRICH):
                return False
            if x[0] != x[1] and not {
                    l for l in x if is_var(l, self.mach)} <= self.relevant:
                return False
        y = tuple(next(self.fresh) if m else NULL for m in ymask)
        self.lines.append(Statement(pn, x, y))
        self.justs.append(just)
        self.seen[key] = len(self.lines)
        return True

    def emit_key(self, key: tuple, just: Justification) -> bool:
        return self.emit(key[0], key[1], key[2], just)

    # -- move generators ----------------------------------------------------

    def round_moves(self, newer_than: int, first_round: bool) -> None:
        lines = self.lines
        by_pn = _match_index(lines)
        top = len(lines)
        fmask = tuple(False for _ in range(self.mach.ny))
        # iot on new lines
        for ref in range(1 if first_round else newer_than + 1, top + 1):
            for v in lines[ref - 1].labels():
                if is_var(v, self.mach):
                    self.emit(TYPEN, (v,) + (NULL,) * (self.mach.nx - 1), fmask,
                              Justification("iot", refs=(ref,)))
        # rule applications
        for rid, rule in self.sorted_rules:
            if not rule.premise:
                if first_round:
                    key = conclusion_input_key(rule, {}, self.mach)
                    if key is not None:
                        self.emit_key(key, Justification("iep", rule=rid))
                continue
            for sigma, refs in _iter_matches(rule.premise, lines, by_pn, self.mach,
                                             newer_than=0 if first_round else newer_than):
                if rule.conclusion.is_falsity:
                    self.emit(0, falsity(self.mach).x, fmask,
                              Justification("iep", rule=rid, refs=refs))
                    continue
                key = conclusion_input_key(rule, sigma, self.mach)
                if key is not None:
                    self.emit_key(key, Justification("iep", rule=rid, refs=refs))
        # substitutions
        for e in range(1, top + 1):
            eq = lines[e - 1]
            if eq.pn != EQN:
                continue
            for t in range(1, top + 1):
                if not first_round and e <= newer_than and t <= newer_than:
                    continue
                tgt = lines[t - 1]
                if tgt.is_falsity:
                    continue
                ymask = tuple(l != NULL for l in tgt.y)
                for x in _sr1_outcomes(tgt, eq):
                    self.emit(tgt.pn, x, ymask,
                              Justification("sr1", refs=(t, e)))
        # splits: self-disjunctions and premise lines always; derived
        # disjunctions only when their labels matter to the target.  Each
        # line is attempted only while new (index above the previous
        # frontier); the live loop also covers lines added this round.
        n_prem = len(self.target.premise)
        goal_has_const = any(is_const(l, self.mach)
                             for l in self.target.conclusion.inputs())
        d = newer_than if not first_round else 0
        while d < len(self.lines):
            d += 1
            s = self.lines[d - 1]
            if s.pn not in (LE, TRICH):
                continue
            s_vars = {l for l in s.labels() if is_var(l, self.mach)}
            if d > n_prem and s.x[0] != s.x[1] and not s_vars <= self.relevant:
                continue
            if d > n_prem and not s_vars and not goal_has_const:
                continue  # constant-only facts cannot reach a constant-free goal
            self.split_moves(d)

    def split_moves(self, d: int) -> None:
        operands = disjunction_operands(self.lines[d - 1], self.mach)
        contexts = []
        for op in operands:
            ctx = list(self.lines)
            ctx[d - 1] = op
            contexts.append(ctx)
        fmask = tuple(False for _ in range(self.mach.ny))
        refute = [self.refute_single(contexts[i], d) for i in (0, 1)]
        if refute[0] is not None and refute[1] is not None:
            self.emit(0, falsity(self.mach).x, fmask,
                      Justification("split", pairs=(refute[0], refute[1])))
            return
        if refute[0] is None and refute[1] is None:
            results = [self.branch_results(contexts[i], d) for i in (0, 1)]
            emitted = False
            for key in sorted(results[0]):
                if key in results[1]:
                    emitted |= self.emit_key(key, Justification(
                        "split", pairs=(results[0][key], results[1][key])))
            if emitted:
                return
            # No single-application refutation or join: try packaging a
            # multi-step refutation as a falsity lemma, lower branch first.
            for i in (0, 1):
                pair = self.refute_lemma(d, operands[i])
                if pair is not None:
                    refute[i] = pair
                    break
        for i in (0, 1):
            if refute[i] is None:
                continue
            j = 1 - i
            keep = Pair("dcr2", None, (d,))
            pairs = (refute[i], keep) if i == 0 else (keep, refute[i])
            op = operands[j]
            self.emit(op.pn, op.x, tuple(l != NULL for l in op.y),
                      Justification("split", pairs=pairs))
            return

    def refute_single(self, context: list[Statement], d: int) -> Pair | None:
        if not self.falsity_rules:
            return None
        by_pn = _match_index(context)
        for rid, rule in self.falsity_rules:
            for sigma, refs in _iter_matches_at(rule.premise, context, by_pn,
                                                self.mach, d):
                return Pair("iep", rid, refs)
        return None

    def refute_lemma(self, d: int, operand: Statement) -> Pair | None:
        if not self.allow_lemmas:
            return None
        if not self.falsity_rules:
            return None  # nothing could ever derive falsity
        prem_labels: set[int] = set()
        for s in self.target.premise:
            prem_labels.update(s.labels())
        if not all(is_const(l, self.mach) or l in prem_labels
                   for l in operand.labels()):
            return None
        lemma_rule = Iep(self.target.premise + (operand,), falsity(self.mach))
        key = render_rule_text(lemma_rule, self.mach)
        if key in self.lemma_ids:
            rid = self.lemma_ids[key]
            if rid is None:
                return None
            return Pair("iep", rid, tuple(range(1, len(self.target.premise) + 1)) + (d,))
        sub = prove(lemma_rule, {**self.kb}, self.mach, allow_lemmas=False,
                    max_depth=min(self.max_depth, 6),
                    max_statements=min(self.max_statements, 180),
                    lemma_base=self.next_lemma_id)
        if sub.proof is None:
            self.lemma_ids[key] = None
            return None
        rid = self.next_lemma_id
        self.next_lemma_id += 1
        self.lemma_ids[key] = rid
        record = LemmaRecord(rid, Iep(lemma_rule.premise, lemma_rule.conclusion, rid),
                             sub.proof, sub.connection)
        self.lemmas[rid] = record
        self.kb[rid] = record.rule
        self.sorted_rules = sorted(self.kb.items())
        self.falsity_rules.append((rid, record.rule))
        self.falsity_rules.sort()
        return Pair("iep", rid, tuple(range(1, len(self.target.premise) + 1)) + (d,))

    def branch_results(self, context: list[Statement], d: int) -> dict[tuple, Pair]:
        by_pn = _match_index(context)
        results: dict[tuple, Pair] = {}
        for rid, rule in self.rules_by_premise_pn.get(context[d - 1].pn, ()):
            for sigma, refs in _iter_matches_at(rule.premise, context, by_pn,
                                                self.mach, d):
                key = conclusion_input_key(rule, sigma, self.mach)
                if key is not None and key not in results:
                    results[key] = Pair("iep", rid, refs)
        pairs_te = [(d, e) for e in range(1, len(context) + 1)] + \
                   [(t, d) for t in range(1, len(context) + 1) if t != d]
        for t, e in pairs_te:
            tgt, eq = context[t - 1], context[e - 1]
            if eq.pn != EQN or tgt.is_falsity:
                continue
            ymask = tuple(l != NULL for l in tgt.y)
            for x in _sr1_outcomes(tgt, eq):
                key = (tgt.pn, x, ymask)
                results.setdefault(key, Pair("sr1", None, (t, e)))
        return results

    # -- proof assembly -------------------------------------------------------

    def extract(self, goal_ref: int) -> Proof:
        needed = set(range(1, len(self.target.premise) + 1))
        stack = [goal_ref]
        while stack:
            ref = stack.pop()
            if ref in needed:
                continue
            needed.add(ref)
            just = self.justs[ref - 1]
            stack.extend(just.refs)
            if just.pairs:
                for p in just.pairs:
                    stack.extend(p.refs)
        order = sorted(needed)
        renum = {old: new for new, old in enumerate(order, start=1)}

        relabel: dict[int, int] = {}
        base_used = {l for l in itertools.chain(
            *(s.labels() for s in conc(self.target))) if l <= self.mach.nvar}

        def map_label(l: int) -> int:
            if l == NULL or l <= self.mach.nvar + 3:
                return l
            if l not in relabel:
                for candidate in range(1, self.mach.nvar + 1):
                    if candidate not in base_used:
                        base_used.add(candidate)
                        relabel[l] = candidate
                        break
                else:
                    raise CycleError("variable pool exhausted while relabelling")
            return relabel[l]

        def map_stmt(s: Statement) -> Statement:
            return Statement(s.pn, tuple(map_label(l) for l in s.x),
                             tuple(map_label(l) for l in s.y))

        def map_just(j: Justification) -> Justification:
            refs = tuple(renum[r] for r in j.refs)
            pairs = None
            if j.pairs:
                pairs = tuple(Pair(p.kind, p.rule, tuple(renum[r] for r in p.refs))
                              for p in j.pairs)
            return Justification(j.kind, j.rule, refs, pairs)

        lines = tuple(ProofLine(map_stmt(self.lines[r - 1]), map_just(self.justs[r - 1]))
                      for r in order)
        return Proof(self.target, lines)

    def run(self) -> ProveResult:
        if self.goal_ref() is not None:
            # The conclusion restates a premise row; restatement is not a
            # derivation, so there is nothing to prove.
            return ProveResult(None)
        newer_than = 0
        for depth in range(1, self.max_depth + 1):
            top_before = len(self.lines)
            self.round_moves(newer_than, depth == 1)
            newer_than = top_before
            if self.goal_ref() is not None:
                break
            if len(self.lines) == top_before or len(self.lines) >= self.max_statements:
                break
        ref = self.goal_ref()
        if ref is None:
            return ProveResult(None)
        proof = self.extract(ref)
        result = check_proof(proof, self.kb, None, self.mach)
        if not result.ok:
            raise AssertionError(
                f"search produced an invalid proof: line {result.line}: {result.reason}")
        lemmas = self.used_lemmas(result.connection)
        return ProveResult(proof, result.connection, lemmas)

    def used_lemmas(self, connection: Sequence[int]) -> tuple[LemmaRecord, ...]:
        used: list[LemmaRecord] = []
        pending = [rid for rid in connection if rid in self.lemmas]
        seen: set[int] = set()
        while pending:
            rid = pending.pop()
            if rid in seen:
                continue
            seen.add(rid)
            record = self.lemmas[rid]
            used.append(record)
            pending.extend(r for r in record.connection if r in self.lemmas)
        return tuple(sorted(used, key=lambda r: r.id))


def prove(target: Iep, rules: Mapping[int, Iep], mach: MachParams = DEFAULT_MACH,
          *, allow_lemmas: bool = True, max_depth: int | None = None,
          max_statements: int | None = None, lemma_base: int = 0) -> ProveResult:
    """Bounded forward search for a proof of the target rule.

    Returns the pruned, re-checked proof together with any synthesized
    falsity lemmas it depends on; not-found is distinct from disproof.
    """
    search = _Search(
        target, rules, mach,
        allow_lemmas=allow_lemmas,
        max_depth=mach.max_proof_depth if max_depth is None else max_depth,
        max_statements=(mach.max_derived_statements
                        if max_statements is None else max_statements),
        lemma_base=lemma_base)
    return search.run()


def _subsequences(n: int) -> Iterator[tuple[int, ...]]:
    for size in range(n):
        yield from itertools.combinations(range(n), size)


def reduce_premise(rule: Iep, rules: Mapping[int, Iep],
                   mach: MachParams = DEFAULT_MACH,
                   *, max_depth: int = 3, max_statements: int = 140) -> ReduceResult:
    """Reject a rule whose conclusion already follows from a proper sub-premise."""
    n = len(rule.premise)
    goal = statement_key(rule.conclusion)
    for i, row in enumerate(rule.premise):
        if statement_key(row) == goal:
            # The conclusion restates a premise row outright.
            return ReduceResult(rule, True, (i,))
    concl_inputs = {l for l in rule.conclusion.inputs() if not is_const(l, mach)}
    for subset in _subsequences(n):
        sub_premise = tuple(rule.premise[i] for i in subset)
        labels: set[int] = set()
        for s in sub_premise:
            labels.update(s.labels())
        if not concl_inputs <= labels and concl_inputs:
            continue
        if validate_io_dependency(sub_premise, None, mach):
            continue
        candidate = Iep(sub_premise, rule.conclusion)
        if validate_io_dependency(conc(candidate), primary_inputs(sub_premise, mach), mach):
            continue
        result = prove(candidate, rules, mach, allow_lemmas=False,
                       max_depth=max_depth, max_statements=max_statements)
        if result.found:
            return ReduceResult(rule, True, subset)
    return ReduceResult(rule, False)


def _find_cycle(connections: Mapping[int, Sequence[int]]) -> list[int]:
    state: dict[int, int] = {}

    def visit(node: int, trail: list[int]) -> list[int] | None:
        if state.get(node) == 2:
            return None
        if state.get(node) == 1:
            return trail[trail.index(node):]
        state[node] = 1
        for dep in connections.get(node, ()):
            found = visit(dep, trail + [node])
            if found:
                return found
        state[node] = 2
        return None

    for node in sorted(connections):
        found = visit(node, [])
        if found:
            return found
    return []


def partition(kb: KnowledgeBase, mach: MachParams = DEFAULT_MACH,
              *, max_rounds: int = 10, prove_depth: int = 4,
              prove_statements: int = 160,
              weight_definition: str = "reachable") -> KnowledgeBase:
    """Iterate proof attempts until the axiom/theorem/underivable split is stable.

    Accepted proofs must keep the dependency graph acyclic; when two rules
    turn out mutually derivable, the one with the greater weight (ties:
    smaller id) is kept as the axiom and the other becomes the theorem.
    Rules proved nowhere become axioms when some accepted proof uses them,
    underivable otherwise.
    """
    attempted: set[int] = set()
    banned: set[int] = set()  # proofs dropped to break a cycle stay dropped
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        kb.reclassify(weight_definition)
        rules_grew = False
        for rid in sorted(kb.rules):
            if rid in kb.connections or rid in banned or rid in attempted:
                continue
            attempted.add(rid)
            view = {i: r for i, r in kb.rules.items() if i != rid}
            result = prove(kb.rules[rid], view, mach,
                           max_depth=prove_depth, max_statements=prove_statements,
                           lemma_base=kb.next_id())
            if not result.found:
                continue
            before = len(kb.rules)
            rule_map = _integrate_lemmas(kb, result, mach)
            if len(kb.rules) != before:
                rules_grew = True
            connection = tuple(sorted(rule_map.get(c, c) for c in result.connection))
            proof = _remap_proof(result.proof, rule_map)
            trial = dict(kb.connections)
            trial[rid] = connection
            dropped: list[int] = []
            accept = True
            while True:
                try:
                    dependency_order(trial)
                    break
                except CycleError:
                    cycle = _find_cycle(trial)
                    weights = kb.weights
                    # Mutually derivable rules: the heavier one stays an axiom.
                    keeper = max(cycle, key=lambda i: (weights.get(i, 0), -i))
                    if keeper == rid:
                        accept = False
                        break
                    trial.pop(keeper, None)
                    dropped.append(keeper)
            if not accept:
                banned.add(rid)
                kb.drop_proof(rid)
                continue
            for other in dropped:
                kb.drop_proof(other)
                banned.add(other)
            kb.accept_proof(rid, proof, connection)
        if not rules_grew:
            break
        # New rules (lemmas) may unlock proofs that failed earlier.
        attempted.clear()
    kb.reclassify(weight_definition)
    return kb


def _remap_proof(proof: Proof, rule_map: Mapping[int, int]) -> Proof:
    if not rule_map:
        return proof

    def remap_just(j: Justification) -> Justification:
        rule = rule_map.get(j.rule, j.rule) if j.rule is not None else None
        pairs = None
        if j.pairs:
            pairs = tuple(
                Pair(p.kind, rule_map.get(p.rule, p.rule) if p.rule is not None else None,
                     p.refs) for p in j.pairs)
        return Justification(j.kind, rule, j.refs, pairs)

    return Proof(proof.target,
                 tuple(ProofLine(pl.statement, remap_just(pl.justification))
                       for pl in proof.lines))


def _integrate_lemmas(kb: KnowledgeBase, result: ProveResult,
                      mach: MachParams) -> dict[int, int]:
    """Register synthesized lemmas in the kb, deduplicating by canonical text."""
    rule_map: dict[int, int] = {}
    existing = {(rule.premise, rule.conclusion): rid for rid, rule in kb.rules.items()}
    for record in result.lemmas:
        key = (record.rule.premise, record.rule.conclusion)
        if key in existing:
            rule_map[record.id] = existing[key]
            continue
        if soundness_check(record.rule, mach).verdict != "sound":
            raise AssertionError("synthesized lemma failed the soundness check")
        new_id = kb.add_rule(record.rule)
        rule_map[record.id] = new_id
        existing[key] = new_id
    for record in result.lemmas:
        own_id = rule_map[record.id]
        if own_id in kb.connections:
            continue
        connection = tuple(sorted(rule_map.get(c, c) for c in record.connection))
        kb.accept_proof(own_id, _remap_proof(
            Proof(kb.rules[own_id], record.proof.lines), rule_map), connection)
    return rule_map
