"""Strict implication over intuitionistic logic: formulas, semantics, fixpoints and proofs."""

__version__ = "0.1.0"
