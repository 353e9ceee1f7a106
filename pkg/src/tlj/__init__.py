"""Exact Temperley-Lieb-Jones kernel: diagrams, Jones-Wenzl idempotents, annular modules, CPAI report."""

from __future__ import annotations

from .diagram import TLDiagram, TLElement, adjoint, inner, markov_trace, multiply
from .jones_wenzl import jones_wenzl
from .scalar import DELTA, Q, T, NumericParams, Scalar, TPoly, qint, qint_t

__all__ = [
    "DELTA",
    "NumericParams",
    "Q",
    "Scalar",
    "T",
    "TLDiagram",
    "TLElement",
    "TPoly",
    "adjoint",
    "inner",
    "jones_wenzl",
    "markov_trace",
    "multiply",
    "qint",
    "qint_t",
]
__version__ = "0.1.0"
