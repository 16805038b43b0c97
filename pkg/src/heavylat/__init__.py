"""Simulation and matching-based decoding of error correcting codes on
heavy hexagon and heavy square lattices, with a transmon frequency
collision model for the same layouts."""

__version__ = "0.1.0"

from .pauli import PauliOp, multiply, commutes, weight, restrict

__all__ = [
    "PauliOp",
    "multiply",
    "commutes",
    "weight",
    "restrict",
    "__version__",
]
