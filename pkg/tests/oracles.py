"""Shared dense-matrix and circuit-generation oracles for the test suite.

These deliberately avoid the bit-mask code paths under test: everything here
is plain numpy linear algebra.
"""

from __future__ import annotations

import math
import random
from typing import List, Optional

import numpy as np

from icesim.pauli import Circuit, Instruction, PauliString
from icesim.statevec import _1Q, _CX, _SWAP, StateVector, _rot_matrix, pauli_to_matrix


def apply_to_matrix(mat: np.ndarray, qubits, n: int) -> np.ndarray:
    """Embed a 1q/2q gate matrix into the full 2^n unitary (dense, column by column)."""
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        sv = StateVector(n)
        sv.amps[:] = 0
        sv.amps[j] = 1.0
        if len(qubits) == 1:
            sv.apply_1q(mat, qubits[0])
        else:
            sv.apply_2q(mat, qubits[0], qubits[1])
        out[:, j] = sv.amps
    return out


def instruction_matrix(ins: Instruction, n: int) -> np.ndarray:
    if ins.kind in _1Q:
        return apply_to_matrix(_1Q[ins.kind], ins.targets, n)
    if ins.kind == "CX":
        return apply_to_matrix(_CX, ins.targets, n)
    if ins.kind == "SWAP":
        return apply_to_matrix(_SWAP, ins.targets, n)
    if ins.kind in ("RotZZ", "RotXX"):
        return apply_to_matrix(_rot_matrix(ins.kind, ins.angle), ins.targets, n)
    raise ValueError(f"no matrix for {ins.kind}")


def circuit_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(2 ** c.num_qubits, dtype=complex)
    for ins in c.instructions:
        if ins.kind in ("Tick", "NoiseSite", "Detector", "Observable"):
            continue
        u = instruction_matrix(ins, c.num_qubits) @ u
    return u


def random_pauli(rng: random.Random, n: int, allow_identity: bool = True) -> PauliString:
    while True:
        x = rng.getrandbits(n)
        z = rng.getrandbits(n)
        if allow_identity or x or z:
            return PauliString(n, x, z)


def random_clifford_circuit(rng: random.Random, n: int, depth: int,
                            with_rotations: bool = False,
                            with_measurements: bool = False) -> Circuit:
    ins: List[Instruction] = []
    meas_count = 0
    kinds_1q = ["H", "S", "X", "Y", "Z"]
    for _ in range(depth):
        roll = rng.random()
        if roll < 0.4:
            ins.append(Instruction(rng.choice(kinds_1q), (rng.randrange(n),)))
        elif roll < 0.8 and n >= 2:
            a, b = rng.sample(range(n), 2)
            ins.append(Instruction(rng.choice(["CX", "SWAP"]), (a, b)))
        elif with_rotations and n >= 2:
            a, b = rng.sample(range(n), 2)
            k = rng.choice([1, 2, 3])
            ins.append(Instruction(rng.choice(["RotZZ", "RotXX"]), (a, b),
                                   angle=k * math.pi / 2))
        else:
            ins.append(Instruction("H", (rng.randrange(n),)))
        if with_measurements and rng.random() < 0.1:
            q = rng.randrange(n)
            ins.append(Instruction(rng.choice(["MeasZ", "MeasX"]), (q,),
                                   register=f"m{meas_count}"))
            meas_count += 1
            if rng.random() < 0.5:
                ins.append(Instruction(rng.choice(["PrepZ", "PrepX"]), (q,)))
    if with_measurements:
        for q in range(n):
            ins.append(Instruction("MeasZ", (q,), register=f"final{q}"))
    return Circuit(n, ins)


def noisy_tableau_sample(c: Circuit, noise, shots: int, seed: int):
    """Slow reference sampler: explicit Pauli noise draws + full tableau runs.

    Returns a list of dict records (one per shot), drawn from the exact noisy
    circuit distribution.
    """
    from icesim.noise import PAULI2_LABELS
    from icesim.pauli import PauliString as PS
    from icesim.tableau import tableau_run

    weights = list(noise.weights)
    cum = []
    acc = 0.0
    for w in weights:
        acc += w
        cum.append(acc)
    records = []
    n = c.num_qubits
    for shot in range(shots):
        rng = random.Random(seed * 1000003 + shot)
        stream = {}
        flips = set()
        for idx, ins in enumerate(c.instructions):
            k = ins.kind
            if k in ("CX", "SWAP", "RotZZ", "RotXX"):
                if noise.p_2q > 0 and rng.random() < noise.p_2q:
                    u = rng.random()
                    sel = next(i for i, cv in enumerate(cum) if u < cv or i == 14)
                    lab = PAULI2_LABELS[sel]
                    a, b = ins.targets
                    p = PS.from_label(lab[0], 1).embedded(n, (a,)) * \
                        PS.from_label(lab[1], 1).embedded(n, (b,))
                    stream[idx] = p.unsigned()
            elif k == "PrepZ":
                if noise.p_init > 0 and rng.random() < noise.p_init:
                    stream[idx] = PS.single(n, ins.targets[0], "X")
            elif k == "PrepX":
                if noise.p_init > 0 and rng.random() < noise.p_init:
                    stream[idx] = PS.single(n, ins.targets[0], "Z")
            elif k in ("MeasZ", "MeasX"):
                if noise.p_meas > 0 and rng.random() < noise.p_meas:
                    flips.add(ins.register)
        rec, _ = tableau_run(c, seed=rng.getrandbits(32), error_stream=stream,
                             meas_flips=flips)
        records.append(rec)
    return records
