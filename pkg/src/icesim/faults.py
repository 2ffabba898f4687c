"""Deterministic fault injection for exhaustive fault-tolerance checks.

A Fault places a Pauli error immediately *after* one instruction (covering
gate faults and preparation flips) or flips one recorded measurement bit.
``inject_faults`` propagates the resulting sign-free Pauli frame through the
circuit and reports the register flips (relative to a fault-free run) plus the
residual Pauli left on the qubits at the end.

Propagation is linear over GF(2): the effect of a set of faults is the XOR of
the effects of the individual faults.  Exhaustive order-two enumeration
exploits this by combining precomputed single-fault effects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .noise import PAULI2_LABELS
from .pauli import (Circuit, GATE_2Q, Instruction, MEASUREMENTS, PauliString,
                    PREPS, ROTATIONS, _quarter_turns)


@dataclass(frozen=True)
class Fault:
    """One elementary fault location.

    loc: instruction index in the circuit.
    pauli: error applied after that instruction (None for a record flip).
    flip_record: True to flip the measurement bit recorded at loc.
    """
    loc: int
    pauli: Optional[PauliString] = None
    flip_record: bool = False

    def describe(self, c: Circuit) -> str:
        ins = c.instructions[self.loc]
        if self.flip_record:
            return f"@{self.loc} {ins.kind} ->{ins.register}: record flip"
        body = "".join(self.pauli.kind_at(q) for q in self.pauli.support()
                       ) or "I"
        sup = ",".join(str(q) for q in self.pauli.support())
        return f"@{self.loc} {ins.kind} {ins.targets}: {body} on ({sup})"


@dataclass
class FaultEffect:
    """Propagated consequence of a fault set: register flips + residual frame."""
    residual_x: int = 0
    residual_z: int = 0
    register_flips: int = 0  # bitmask over register slots

    def key(self) -> Tuple[int, int, int]:
        return (self.residual_x, self.residual_z, self.register_flips)

    def xor(self, other: "FaultEffect") -> "FaultEffect":
        return FaultEffect(self.residual_x ^ other.residual_x,
                           self.residual_z ^ other.residual_z,
                           self.register_flips ^ other.register_flips)

    def residual(self, num_qubits: int) -> PauliString:
        return PauliString(num_qubits, self.residual_x, self.residual_z)

    def flipped_labels(self, c: Circuit) -> Tuple[str, ...]:
        return tuple(lab for lab, slot in c.register_map.items()
                     if (self.register_flips >> slot) & 1)


def fault_sites(c: Circuit, include_idle: bool = False) -> List[Fault]:
    """Every elementary fault of the standard noise model, one entry each.

    Two-qubit gates get all fifteen two-qubit Paulis on their targets;
    preparations get the flip that leaves the prepared basis (X after PrepZ,
    Z after PrepX); measurements get a record flip.  Rotations count as
    two-qubit gates.
    """
    out: List[Fault] = []
    n = c.num_qubits
    for idx, ins in enumerate(c.instructions):
        k = ins.kind
        if k in GATE_2Q or k in ROTATIONS:
            a, b = ins.targets
            for lab in PAULI2_LABELS:
                p = PauliString.from_label(lab[0], 1).embedded(n, (a,)) * \
                    PauliString.from_label(lab[1], 1).embedded(n, (b,))
                out.append(Fault(idx, p.unsigned()))
        elif k == "PrepZ":
            out.append(Fault(idx, PauliString.single(n, ins.targets[0], "X")))
        elif k == "PrepX":
            out.append(Fault(idx, PauliString.single(n, ins.targets[0], "Z")))
        elif k in MEASUREMENTS:
            out.append(Fault(idx, flip_record=True))
    return out


def inject_faults(c: Circuit, faults: Iterable[Fault]) -> FaultEffect:
    """Propagate a set of faults through the circuit (sign-free frame walk)."""
    by_loc: Dict[int, List[Fault]] = {}
    rec_flips: Dict[int, bool] = {}
    for f in faults:
        if f.flip_record:
            rec_flips[f.loc] = rec_flips.get(f.loc, False) ^ True
        else:
            by_loc.setdefault(f.loc, []).append(f)
    fx = fz = 0
    reg = 0
    for idx, ins in enumerate(c.instructions):
        k = ins.kind
        if k == "CX":
            cq, t = ins.targets
            mc, mt = 1 << cq, 1 << t
            if fx & mc:
                fx ^= mt
            if fz & mt:
                fz ^= mc
        elif k == "SWAP":
            a, b = ins.targets
            ma, mb = 1 << a, 1 << b
            ba, bb = bool(fx & ma), bool(fx & mb)
            fx = (fx & ~ma & ~mb) | (ma if bb else 0) | (mb if ba else 0)
            ba, bb = bool(fz & ma), bool(fz & mb)
            fz = (fz & ~ma & ~mb) | (ma if bb else 0) | (mb if ba else 0)
        elif k == "H":
            m = 1 << ins.targets[0]
            bx, bz = bool(fx & m), bool(fz & m)
            fx = (fx & ~m) | (m if bz else 0)
            fz = (fz & ~m) | (m if bx else 0)
        elif k == "S":
            m = 1 << ins.targets[0]
            if fx & m:
                fz ^= m
        elif k in ("X", "Y", "Z"):
            pass
        elif k in ROTATIONS:
            q = _quarter_turns(ins.angle)
            if q is None:
                raise ValueError(
                    "fault propagation requires Clifford rotation angles")
            a, b = ins.targets
            ma, mb = (1 << a), (1 << b)
            if k == "RotZZ":
                anti = bool(fx & ma) ^ bool(fx & mb)
                if anti and q in (1, 3):
                    fz ^= ma | mb
            else:
                anti = bool(fz & ma) ^ bool(fz & mb)
                if anti and q in (1, 3):
                    fx ^= ma | mb
        elif k == "PrepZ" or k == "PrepX":
            m = 1 << ins.targets[0]
            fx &= ~m
            fz &= ~m
        elif k == "MeasZ":
            m = 1 << ins.targets[0]
            bit = bool(fx & m) ^ rec_flips.get(idx, False)
            if bit:
                reg ^= 1 << c.register_map[ins.register]
        elif k == "MeasX":
            m = 1 << ins.targets[0]
            bit = bool(fz & m) ^ rec_flips.get(idx, False)
            if bit:
                reg ^= 1 << c.register_map[ins.register]
        elif k in ("Tick", "NoiseSite", "Detector", "Observable"):
            pass
        else:
            raise ValueError(f"unhandled instruction {k}")
        for f in by_loc.get(idx, ()):
            fx ^= f.pauli.x
            fz ^= f.pauli.z
    return FaultEffect(fx, fz, reg)


def single_fault_effects(c: Circuit, sites: Optional[Sequence[Fault]] = None,
                         ) -> List[Tuple[Fault, FaultEffect]]:
    """Effect of every elementary fault, for order-1/2 enumeration by XOR."""
    if sites is None:
        sites = fault_sites(c)
    return [(f, inject_faults(c, (f,))) for f in sites]
