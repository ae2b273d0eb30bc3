import itertools

import pytest

from machnat.conjecture import (
    TemplateGroup, enumerate_templates, generate_conjectures, instantiate_names,
    parse_groups_file, valid_template,
)
from machnat.kernel import (
    ADD, EQN, LE, LT, MULT, MachParams, RuleError, render_rule_text,
)
from machnat.structure import BinaryTemplate, binary_template, materialize

MACH = MachParams()


def rule_texts(result):
    return {render_rule_text(c.iep) for c in result.survivors}


def test_enumeration_is_deterministic_and_duplicate_free():
    group = TemplateGroup(1, names=(ADD, ADD))
    first, trunc1 = enumerate_templates(group)
    second, trunc2 = enumerate_templates(group)
    assert first == second and not trunc1 and not trunc2
    assert len(set(first)) == len(first)


def test_enumeration_budget_truncation_reported():
    group = TemplateGroup(1, names=(ADD, ADD), budget=10)
    templates, truncated = enumerate_templates(group)
    assert truncated and len(templates) == 10


def test_enumeration_matches_brute_force_oracle():
    """Enumerator completeness on a small masked grid.

    Oracle: every assignment of slots to member ids, independently built
    from raw products, canonicalized and tagged.
    """
    group = TemplateGroup(0, names=(LE,))  # two input slots, no output
    templates, truncated = enumerate_templates(group)
    assert not truncated
    slots = [(0, 0), (0, 1)]
    oracle = set()
    shape = (1, MACH.nx + MACH.ny)
    for assignment in itertools.product([0, 1, 2], repeat=len(slots)):
        blocks = {}
        for slot, member in zip(slots, assignment):
            if member:
                blocks.setdefault(member, []).append(slot)
        tag_options = []
        block_list = sorted(tuple(sorted(b)) for b in blocks.values())
        for block in block_list:
            options = []
            if len(block) >= 2:
                options.append(("var", ""))
            options.extend(("const", c) for c in ("0", "1", "mnat"))
            tag_options.append(options)
        for combo in itertools.product(*tag_options):
            members = tuple(sorted(
                (kind, const, block) for (kind, const), block
                in zip(combo, block_list)))
            oracle.add(BinaryTemplate(shape, members, group.names))
    assert set(templates) == oracle


def test_all_enumerated_templates_pass_the_validity_predicate():
    group = TemplateGroup(1, names=(EQN, EQN))
    templates, _ = enumerate_templates(group)
    assert all(valid_template(t) for t in templates)


def test_instantiate_commutativity_family(classic):
    template = binary_template(classic["Nat 2a"])
    bare = BinaryTemplate(template.shape, template.members, None)
    produced = dict(instantiate_names(bare))
    assert render_rule_text(produced[(ADD, ADD)]) == render_rule_text(classic["Nat 2a"])
    assert render_rule_text(produced[(MULT, MULT)]) == render_rule_text(classic["Nat 5a"])
    assert render_rule_text(produced[(EQN, EQN)]) == render_rule_text(classic["Nat 1b"])


def test_instantiate_discards_arity_incompatible_names(classic):
    template = binary_template(classic["Nat 2a"])
    bare = BinaryTemplate(template.shape, template.members, None)
    produced = dict(instantiate_names(bare))
    # typen has no second input slot and no output, so the commutativity
    # binding pattern cannot be realized on it.
    assert all(1 not in names for names in produced)


def test_generation_regenerates_nat_2a_and_rejects_closure_chain(classic):
    result = generate_conjectures(TemplateGroup(1, names=(ADD, ADD)), MACH)
    texts = rule_texts(result)
    assert render_rule_text(classic["Nat 2a"]) in texts
    assert "add [a b] [c]\n-----\nadd [c b] [d]" not in texts
    assert result.stats["unsound"] > 0


def test_generation_zero_row_group_includes_zero_lt_one():
    result = generate_conjectures(TemplateGroup(0), MACH)
    assert "-----\nlt [0 1] []" in rule_texts(result)


def test_generation_is_deterministic():
    group = TemplateGroup(1, names=(LT, LE))
    first = generate_conjectures(group, MACH)
    second = generate_conjectures(group, MACH)
    assert [(c.iep, c.names) for c in first.survivors] == \
           [(c.iep, c.names) for c in second.survivors]


def test_survivors_are_sound_integral_and_distinct():
    from machnat.semantics import soundness_check
    from machnat.structure import pe_integrity
    result = generate_conjectures(TemplateGroup(1, names=(EQN, LE)), MACH)
    texts = [render_rule_text(c.iep) for c in result.survivors]
    assert len(set(texts)) == len(texts)
    for c in result.survivors:
        assert pe_integrity(c.iep).ok
        assert soundness_check(c.iep, MACH).verdict == "sound"


@pytest.mark.parametrize("name", [
    "Nat 1a", "Nat 1b", "Nat 1c", "Nat 2a", "Nat 2b", "Nat 3a", "Nat 3b",
    "Nat 3c", "Nat 4a", "Nat 4b", "Nat 5a", "Nat 5b", "Nat 6a", "Nat 6b",
    "Nat 7a", "Nat 7b", "Nat 8a", "Nat 8b", "Nat 8c", "Nat 9a", "Nat 9b",
    "Nat 9c", "Ord 1", "Ord 2", "Ord 3", "Ord 4", "Ord 5", "Ord 6",
    "Ord 7a", "Ord 7b", "Ord 8", "le 1", "le 2",
])
def test_classic_rules_are_reachable_by_the_generator(classic, name):
    """Every starter rule is produced by its own template and survives the
    filters, so unbounded enumeration would emit it (enumerator
    completeness is checked separately on small shapes)."""
    from machnat.semantics import soundness_check
    from machnat.structure import pe_integrity
    rule = classic[name]
    template = binary_template(rule)
    assert valid_template(template)
    rebuilt = materialize(template, template.names)
    assert rebuilt is not None
    assert render_rule_text(rebuilt) == render_rule_text(rule)
    assert pe_integrity(rebuilt).ok
    assert soundness_check(rebuilt, MACH).verdict == "sound"


def test_groups_file_parsing():
    groups = parse_groups_file(
        "# comment\ngroup 0\ngroup 1 names=add,add budget=10\ngroup 2 pattern=AAB\n")
    assert groups[0] == TemplateGroup(0)
    assert groups[1] == TemplateGroup(1, (ADD, ADD), None, 10)
    assert groups[2] == TemplateGroup(2, None, "AAB", None)
    with pytest.raises(RuleError):
        parse_groups_file("group x\n")
    with pytest.raises(RuleError):
        parse_groups_file("group 1 names=bogus,add\n")
