"""icesim: iceberg error-detecting codes, their distance-4 concatenations, and
the simulation/decoding/verification machinery around them."""

from .pauli import (Circuit, Instruction, PauliString, conjugate_through,
                    invert_circuit, pauli_commutes, pauli_multiply)

__all__ = [
    "Circuit",
    "Instruction",
    "PauliString",
    "conjugate_through",
    "invert_circuit",
    "pauli_commutes",
    "pauli_multiply",
]
