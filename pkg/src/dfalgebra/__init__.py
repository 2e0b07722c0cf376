"""Decoherence-free operator algebras of small qubit arrays."""

__version__ = "0.1.0"
