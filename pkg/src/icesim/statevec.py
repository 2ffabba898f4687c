"""Dense statevector simulation, the exact test oracle for small circuits (<= 12 qubits)."""

from __future__ import annotations

import math
from typing import Dict, Optional, Tuple

import numpy as np

from .pauli import Circuit, Instruction, PauliString

MAX_QUBITS = 12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_I = np.eye(2, dtype=complex)
_1Q = {"H": _H, "X": _X, "Y": _Y, "Z": _Z, "S": _S}
PAULI_1Q = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def pauli_to_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of a PauliString (qubit 0 = least significant axis)."""
    out = np.array([[p.phase]], dtype=complex)
    for q in reversed(range(p.num_qubits)):
        out = np.kron(out, PAULI_1Q[p.kind_at(q)])
    return out


class StateVector:
    """Statevector over n qubits; index bit q of the flat index is qubit q."""

    def __init__(self, num_qubits: int):
        if num_qubits > MAX_QUBITS:
            raise ValueError(f"statevector limited to {MAX_QUBITS} qubits")
        self.num_qubits = num_qubits
        self.amps = np.zeros(2 ** num_qubits, dtype=complex)
        self.amps[0] = 1.0

    # qubit q maps to axis (n-1-q) of the reshaped tensor because flat index
    # bit 0 is qubit 0 (little-endian).
    def _axis(self, q: int) -> int:
        return self.num_qubits - 1 - q

    def apply_1q(self, mat: np.ndarray, q: int) -> None:
        n = self.num_qubits
        t = self.amps.reshape((2,) * n)
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [self._axis(q)])), 0, self._axis(q))
        self.amps = np.ascontiguousarray(t).reshape(-1)

    def apply_2q(self, mat4: np.ndarray, q0: int, q1: int) -> None:
        n = self.num_qubits
        t = self.amps.reshape((2,) * n)
        a0, a1 = self._axis(q0), self._axis(q1)
        mt = mat4.reshape(2, 2, 2, 2)  # out0 out1 in0 in1 with q0 slower
        t = np.tensordot(mt, t, axes=([2, 3], [a0, a1]))
        t = np.moveaxis(t, [0, 1], [a0, a1])
        self.amps = np.ascontiguousarray(t).reshape(-1)

    def prob_one(self, q: int) -> float:
        idx = np.arange(self.amps.size)
        mask = (idx >> q) & 1 == 1
        return float(np.sum(np.abs(self.amps[mask]) ** 2))

    def project(self, q: int, outcome: int) -> None:
        idx = np.arange(self.amps.size)
        keep = ((idx >> q) & 1) == outcome
        self.amps[~keep] = 0.0
        norm = np.linalg.norm(self.amps)
        if norm == 0:
            raise RuntimeError("projection onto zero-probability outcome")
        self.amps /= norm

    def expectation(self, p: PauliString) -> float:
        mat = pauli_to_matrix(p)
        return float(np.real(np.conj(self.amps) @ (mat @ self.amps)))


def _rot_matrix(kind: str, angle: float) -> np.ndarray:
    axis = np.kron(_Z, _Z) if kind == "RotZZ" else np.kron(_X, _X)
    return math.cos(angle / 2) * np.eye(4, dtype=complex) - 1j * math.sin(angle / 2) * axis


_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def statevector_run(c: Circuit, seed: Optional[int] = 0,
                    forced_outcomes: Optional[Dict[str, int]] = None
                    ) -> Tuple[np.ndarray, Dict[str, int]]:
    """Run a circuit exactly; returns (final amplitudes, measurement record)."""
    rng = np.random.default_rng(seed)
    sv = StateVector(c.num_qubits)
    record: Dict[str, int] = {}

    def measure(q: int) -> int:
        p1 = sv.prob_one(q)
        outcome = int(rng.random() < p1)
        if outcome == 1 and p1 < 1e-12:
            outcome = 0
        if outcome == 0 and p1 > 1 - 1e-12:
            outcome = 1
        sv.project(q, outcome)
        return outcome

    for ins in c.instructions:
        k = ins.kind
        if k in _1Q:
            sv.apply_1q(_1Q[k], ins.targets[0])
        elif k == "CX":
            sv.apply_2q(_CX, *ins.targets)
        elif k == "SWAP":
            sv.apply_2q(_SWAP, *ins.targets)
        elif k in ("RotZZ", "RotXX"):
            sv.apply_2q(_rot_matrix(k, ins.angle), *ins.targets)
        elif k == "PrepZ":
            q = ins.targets[0]
            if measure(q) == 1:
                sv.apply_1q(_X, q)
        elif k == "PrepX":
            q = ins.targets[0]
            if measure(q) == 1:
                sv.apply_1q(_X, q)
            sv.apply_1q(_H, q)
        elif k == "MeasZ":
            q = ins.targets[0]
            if forced_outcomes and ins.register in forced_outcomes:
                want = forced_outcomes[ins.register]
                sv.project(q, want)
                record[ins.register] = want
            else:
                record[ins.register] = measure(q)
        elif k == "MeasX":
            q = ins.targets[0]
            sv.apply_1q(_H, q)
            record[ins.register] = measure(q)
            sv.apply_1q(_H, q)
        elif k in ("Tick", "NoiseSite", "Detector", "Observable"):
            pass
        else:
            raise ValueError(f"unhandled instruction {k}")
    return sv.amps, record
