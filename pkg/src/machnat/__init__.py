"""Arithmetic over machine-bounded naturals: rule discovery and proving.

Programs over the finite universe {0..mnat} are evaluated exhaustively,
candidate rules are generated from binary binding-matrix templates and
filtered for structural integrity and soundness, and a forward-chaining
prover searches for proofs, partitioning the surviving rules into axioms,
theorems and underivables.
"""

from .kernel import (
    DEFAULT_MACH, Iep, MachParams, Statement, parse_rule_text, render_rule_text,
)
from .semantics import run_program, soundness_check
from .structure import binary_template, pe_integrity, structurally_equivalent

__all__ = [
    "DEFAULT_MACH", "Iep", "MachParams", "Statement",
    "binary_template", "parse_rule_text", "pe_integrity", "render_rule_text",
    "run_program", "soundness_check", "structurally_equivalent",
]

__version__ = "0.1.0"
