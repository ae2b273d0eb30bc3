"""Proof objects, the proof checker, search, and the rule partition."""

from .corpus import Corpus, CorpusEntry, parse_corpus, render_corpus
from .kb import KnowledgeBase, classify, compute_weights, dependency_order
from .steps import (
    CheckResult, Justification, Pair, Proof, ProofLine, StepError, apply_iep,
    apply_iot, apply_sr1, check_proof,
)

__all__ = [
    "CheckResult", "Corpus", "CorpusEntry", "Justification", "KnowledgeBase",
    "Pair", "Proof", "ProofLine", "StepError", "apply_iep", "apply_iot",
    "apply_sr1", "check_proof", "classify", "compute_weights",
    "dependency_order", "parse_corpus", "render_corpus",
]
