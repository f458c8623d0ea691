"""Compile and verify foliated channels of stabilizer codes."""

from .pauli import PauliOperator, PauliSpan, GaugeGroup

__version__ = "0.1.0"

__all__ = ["PauliOperator", "PauliSpan", "GaugeGroup", "__version__"]
