"""Logical two-qubit gate gadgets within and between code blocks.

Within one block the logical ZZ (XX) rotation is a single physical
rotation: the bottom-qubit (top-qubit) factors of the two logical operators
cancel.  Between two blocks the logical operator is four-body, and the
gadget realizes it as a four-CX conjugation of a single physical rotation
that *spans* the blocks: for the ZZ case the rotation acts on block a's
bottom qubit and block b's data qubit j, and each conjugating CX spans the
blocks with a rotation qubit as its *target* (CX from b's bottom onto a's
bottom, CX from a's data qubit i onto b's data qubit j).

The target orientation is what makes the gadget partially fault tolerant:
a Z component of a rotation fault folds across the blocks (weight one per
block, caught by the product-X stabilizers) while an X component stays on
its own block's rotation qubit (weight one, caught by the product-Z
stabilizer).  Only the same-type two-qubit component of the spanning
rotation survives undetected, and it folds into exactly the gadget's own
logical action.  The XX case is the mirror image (rotation on block a's
top qubit and block b's data qubit j, conjugating CXs with the rotation
qubits as controls).

The FANOUT gadget applies the product-X logical flip on the target block
controlled on one logical qubit of the control block, using four CX gates:
controlling on a logical qubit is physically controlling on both its data
qubit and the bottom qubit, and the product-X flip is physically the
top/bottom pair flip.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

from ..codes import IcebergCode
from ..pauli import Circuit, Instruction, PauliString
from .base import GadgetOutput


def build_gate(kind: str, blocks: Sequence[IcebergCode], *,
               theta: float = math.pi / 2, i: int = 1, j: int = 1,
               control: int = 1) -> GadgetOutput:
    for b in blocks:
        if not isinstance(b, IcebergCode):
            raise ValueError("gate gadgets act on single-level blocks")
    if kind in ("intra_uzz", "intra_uxx"):
        if len(blocks) != 1:
            raise ValueError("intra-block gates take one block")
        return _intra(blocks[0], kind[-2:].upper(), theta, i, j)
    if kind in ("inter_uzz", "inter_uxx"):
        if len(blocks) != 2:
            raise ValueError("inter-block gates take two blocks")
        return _inter(blocks[0], blocks[1], kind[-2:].upper(), theta, i, j)
    if kind == "fanout":
        if len(blocks) != 2:
            raise ValueError("fanout takes (control block, target block)")
        return _fanout(blocks[0], blocks[1], control)
    raise ValueError(f"unsupported gate kind {kind!r}")


def _check_index(code: IcebergCode, idx: int) -> None:
    if not 1 <= idx <= code.k:
        raise ValueError(f"logical index {idx} out of range 1..{code.k}")


def _logical_pair(code_a: IcebergCode, code_b: IcebergCode, axis: str,
                  i: int, j: int, off_b: int) -> PauliString:
    n = code_a.n + code_b.n
    la = (code_a.logical_z if axis == "ZZ" else code_a.logical_x)[i - 1]
    lb = (code_b.logical_z if axis == "ZZ" else code_b.logical_x)[j - 1]
    return (la.embedded(n, tuple(range(code_a.n))) *
            lb.embedded(n, tuple(range(off_b, off_b + code_b.n)))).unsigned()


def _intra(code: IcebergCode, axis: str, theta: float,
           i: int, j: int) -> GadgetOutput:
    _check_index(code, i)
    _check_index(code, j)
    if i == j:
        raise ValueError("intra-block rotation needs two distinct logicals")
    rot = "Rot" + axis
    ins = [Instruction(rot, (i, j), angle=theta)]
    ls = (code.logical_z if axis == "ZZ" else code.logical_x)
    logical = (ls[i - 1] * ls[j - 1]).unsigned()
    return GadgetOutput(
        circuit=Circuit(code.n, ins),
        data_qubits=tuple(range(code.n)),
        registers={},
        meta={"variant": f"intra_u{axis.lower()}", "theta": theta,
              "blocks": (code,), "offsets": (0,), "logical": logical,
              "rotation_loc": 0},
    )


def _inter(code_a: IcebergCode, code_b: IcebergCode, axis: str,
           theta: float, i: int, j: int) -> GadgetOutput:
    _check_index(code_a, i)
    _check_index(code_b, j)
    off = code_a.n
    if axis == "ZZ":
        # rotation on (b1, q_j of block b); conjugating CXs target both
        b1, b2 = code_a.n - 1, off + code_b.n - 1
        conj = [Instruction("CX", (i, off + j)),
                Instruction("CX", (b2, b1))]
        rot_targets = (b1, off + j)
    else:
        # rotation on (t1, q_j of block b); conjugating CXs driven by both
        t1, t2 = 0, off
        conj = [Instruction("CX", (t1, t2)),
                Instruction("CX", (off + j, i))]
        rot_targets = (t1, off + j)
    ins: List[Instruction] = list(conj)
    rotation_loc = len(ins)
    ins.append(Instruction("Rot" + axis, rot_targets, angle=theta))
    ins += conj
    logical = _logical_pair(code_a, code_b, axis, i, j, off)
    total = code_a.n + code_b.n
    return GadgetOutput(
        circuit=Circuit(total, ins),
        data_qubits=tuple(range(total)),
        registers={},
        meta={"variant": f"inter_u{axis.lower()}", "theta": theta,
              "blocks": (code_a, code_b), "offsets": (0, off),
              "logical": logical, "rotation_loc": rotation_loc},
    )


def _fanout(code_a: IcebergCode, code_b: IcebergCode,
            control: int) -> GadgetOutput:
    _check_index(code_a, control)
    off = code_a.n
    c, b1 = control, code_a.n - 1
    t2, b2 = off, off + code_b.n - 1
    ins = [Instruction("CX", (c, t2)), Instruction("CX", (c, b2)),
           Instruction("CX", (b1, t2)), Instruction("CX", (b1, b2))]
    n = code_a.n + code_b.n
    logical = PauliString.from_support(n, "X", [t2, b2])
    return GadgetOutput(
        circuit=Circuit(n, ins),
        data_qubits=tuple(range(n)),
        registers={},
        meta={"variant": "fanout", "control": control,
              "blocks": (code_a, code_b), "offsets": (0, off),
              "logical": logical},
    )
