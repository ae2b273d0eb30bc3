"""Bundled rule corpora."""

from __future__ import annotations

from importlib import resources

from ..kernel import DEFAULT_MACH, Iep, MachParams, parse_rules_file
from ..prover.corpus import Corpus, parse_corpus

__all__ = ["corpus_text", "load_corpus", "load_classic_rules", "classic_rules_text"]


def corpus_text() -> str:
    return (resources.files(__package__) / "corpus.txt").read_text("utf-8")


def load_corpus(mach: MachParams = DEFAULT_MACH) -> Corpus:
    """The bundled 115-rule knowledge base with proofs and weights."""
    return parse_corpus(corpus_text(), mach)


def classic_rules_text() -> str:
    return (resources.files(__package__) / "classic_rules.txt").read_text("utf-8")


def load_classic_rules(mach: MachParams = DEFAULT_MACH) -> dict[str, Iep]:
    """The hand-written starter rule set (equality, arithmetic, order)."""
    return dict(parse_rules_file(classic_rules_text(), mach))
