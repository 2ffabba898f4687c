"""Distance-2 syndrome extraction, readout, and Bell-pair check gadgets.

``ghz_ancilla_d2`` measures one global stabilizer with an entangled ancilla
register (one syndrome leg plus flag legs).  Splitting the data across legs
caps how far an ancilla fault can spread, and the flag legs catch exactly the
ancilla faults that would spread into the data.

``readout_d2`` destructively reads a block in the Z basis while making both
stabilizer eigenvalues recoverable from the classical record: after the
transform, register 0 carries the X-type stabilizer and the product of the
remaining data registers carries the Z-type stabilizer.  A flag ancilla
catches control-qubit faults that would otherwise corrupt several readout
bits silently.

``bell_edz_edx`` is the two-leg Bell-pair variant used per row inside the
distance-4 cycle: one syndrome leg and one flag leg covering the even and odd
positions of a block.
"""

from __future__ import annotations

from typing import List

from ..codes import IcebergCode
from ..pauli import Circuit, Instruction
from .base import GadgetOutput


def build_se(code, variant: str, *, basis: str = "X",
             ancilla_size: int = 4) -> GadgetOutput:
    if variant == "ghz_ancilla_d2":
        _require_iceberg(code, variant)
        return _ghz_ancilla_d2(code, basis=basis, ancilla_size=ancilla_size)
    if variant == "readout_d2":
        _require_iceberg(code, variant)
        return _readout_d2(code)
    if variant == "bell_edz_edx":
        _require_iceberg(code, variant)
        return _bell_edz_edx(code, basis=basis)
    if variant == "qec_cycle_d4":
        from .distance4 import qec_cycle_d4
        return qec_cycle_d4(code)
    raise ValueError(f"unsupported syndrome-extraction variant {variant!r}")


def _require_iceberg(code, variant):
    if not isinstance(code, IcebergCode):
        raise ValueError(f"{variant} requires a single-block code")


def leg_groups(n: int, legs: int) -> List[List[int]]:
    """Split qubits 0..n-1 into contiguous near-equal groups, one per leg."""
    base, extra = divmod(n, legs)
    groups: List[List[int]] = []
    start = 0
    for i in range(legs):
        size = base + (1 if i < extra else 0)
        groups.append(list(range(start, start + size)))
        start += size
    return groups


def _ghz_ancilla_d2(code: IcebergCode, *, basis: str,
                    ancilla_size: int) -> GadgetOutput:
    """Measure the global Z-type (basis="Z") or X-type (basis="X") stabilizer.

    Ancilla register: one syndrome leg plus ancilla_size-1 flag legs.  For the
    Z-type stabilizer the data qubits act as CX controls into their leg; an X
    fault on a leg only flips that leg's record, while a Z fault on a leg can
    spread into at most that leg's data group and always trips a flag through
    the closing leg-to-syndrome coupling.  The X-type variant is the exact
    Hadamard conjugate.
    """
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    if ancilla_size < 2 or ancilla_size > code.n:
        raise ValueError("ancilla_size out of range")
    n = code.n
    syn = n
    flags = list(range(n + 1, n + ancilla_size))
    groups = leg_groups(n, ancilla_size)
    legs = [syn] + flags
    ins: List[Instruction] = []
    if basis == "Z":
        ins.append(Instruction("PrepZ", (syn,)))
        ins += [Instruction("PrepX", (f,)) for f in flags]
        ins += [Instruction("CX", (f, syn)) for f in flags]
        for pos in range(max(len(g) for g in groups)):
            for leg, group in zip(legs, groups):
                if pos < len(group):
                    ins.append(Instruction("CX", (group[pos], leg)))
        ins += [Instruction("CX", (f, syn)) for f in flags]
        ins.append(Instruction("MeasZ", (syn,), register="syn"))
        ins += [Instruction("MeasX", (f,), register=f"flag{i}")
                for i, f in enumerate(flags)]
    else:
        ins.append(Instruction("PrepX", (syn,)))
        ins += [Instruction("PrepZ", (f,)) for f in flags]
        ins += [Instruction("CX", (syn, f)) for f in flags]
        for pos in range(max(len(g) for g in groups)):
            for leg, group in zip(legs, groups):
                if pos < len(group):
                    ins.append(Instruction("CX", (leg, group[pos])))
        ins += [Instruction("CX", (syn, f)) for f in flags]
        ins.append(Instruction("MeasX", (syn,), register="syn"))
        ins += [Instruction("MeasZ", (f,), register=f"flag{i}")
                for i, f in enumerate(flags)]
    return GadgetOutput(
        circuit=Circuit(n + ancilla_size, ins),
        data_qubits=tuple(range(n)),
        registers={"syndrome": ("syn",),
                   "flags": tuple(f"flag{i}" for i in range(len(flags)))},
        check_roles=("syndrome", "flags"),
        meta={"variant": "ghz_ancilla_d2", "basis": basis,
              "ancilla_size": ancilla_size},
    )


def _readout_d2(code: IcebergCode) -> GadgetOutput:
    """Destructive Z-basis block readout with both stabilizers recoverable.

    Register m0 reads the X-type stabilizer; the product of m1..m_{n-1} reads
    the Z-type stabilizer; logical Z values are pairwise register products.
    The flag catches bit-flip faults on qubit 0 that spread across the fan-out
    and could silently flip an even set of readout bits.
    """
    n = code.n
    flag = n
    ins: List[Instruction] = [Instruction("PrepZ", (flag,)),
                              Instruction("CX", (0, flag))]
    ins += [Instruction("CX", (0, i)) for i in range(1, n)]
    ins.append(Instruction("CX", (0, flag)))
    ins.append(Instruction("H", (0,)))
    ins.append(Instruction("MeasZ", (flag,), register="flag0"))
    ins += [Instruction("MeasZ", (i,), register=f"m{i}") for i in range(n)]
    labels = tuple(f"m{i}" for i in range(n))
    return GadgetOutput(
        circuit=Circuit(n + 1, ins),
        data_qubits=(),
        registers={"final-Z": labels, "flags": ("flag0",)},
        check_roles=("flags",),
        parity_checks=(("m0",), labels[1:]),
        meta={"variant": "readout_d2"},
    )


def _bell_edz_edx(code: IcebergCode, *, basis: str) -> GadgetOutput:
    """Two-leg Bell-pair stabilizer check of one block.

    basis="X" measures the X-type stabilizer (detects Z errors): the legs act
    as CX controls, the syndrome leg covering even positions and the flag leg
    odd positions.  basis="Z" is the Hadamard conjugate (detects X errors).
    Leg faults that spread into the data are confined to every other position
    of the block and always trip the flag.
    """
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    n = code.n
    syn, flg = n, n + 1
    ins: List[Instruction] = []
    if basis == "X":
        ins += [Instruction("PrepX", (syn,)), Instruction("PrepZ", (flg,)),
                Instruction("CX", (syn, flg))]
        for x in range(n):
            ins.append(Instruction("CX", (syn if x % 2 == 0 else flg, x)))
        ins += [Instruction("CX", (syn, flg)),
                Instruction("MeasX", (syn,), register="syn"),
                Instruction("MeasZ", (flg,), register="flag")]
    else:
        ins += [Instruction("PrepZ", (syn,)), Instruction("PrepX", (flg,)),
                Instruction("CX", (flg, syn))]
        for x in range(n):
            ins.append(Instruction("CX", (x, syn if x % 2 == 0 else flg)))
        ins += [Instruction("CX", (flg, syn)),
                Instruction("MeasZ", (syn,), register="syn"),
                Instruction("MeasX", (flg,), register="flag")]
    return GadgetOutput(
        circuit=Circuit(n + 2, ins),
        data_qubits=tuple(range(n)),
        registers={"syndrome": ("syn",), "flags": ("flag",)},
        check_roles=("syndrome", "flags"),
        meta={"variant": "bell_edz_edx", "basis": basis},
    )
