"""Shared types and helpers for circuit gadget builders.

A gadget bundles a circuit with the bookkeeping a harness needs to use it:
which qubits carry data at the end, which measurement registers play which
role, and the acceptance rule applied to register *flips* (bits relative to a
noiseless reference run, which is exactly what both the frame sampler and the
fault injector report).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from ..pauli import Circuit, Instruction, MEASUREMENTS, PauliString

# Register roles that must read back noiseless values for a shot to be kept.
CHECK_ROLE_DEFAULT = ("checks",)


@dataclass
class GadgetOutput:
    """A built gadget: circuit plus the contract needed to operate it.

    registers maps a role name (e.g. "HighX", "LowXFlags", "checks") to the
    ordered tuple of register labels holding that role's bits.  check_roles
    lists the roles whose bits must equal the noiseless reference for the
    default accept predicate; rus_roles lists roles whose firing means the
    enclosed preparation is re-run rather than the shot being discarded.
    """

    circuit: Circuit
    data_qubits: Tuple[int, ...]
    registers: Dict[str, Tuple[str, ...]]
    check_roles: Tuple[str, ...] = ()
    rus_roles: Tuple[str, ...] = ()
    # each entry: labels whose flip parity (XOR) must vanish to accept
    parity_checks: Tuple[Tuple[str, ...], ...] = ()
    frame: Optional[PauliString] = None  # recorded Pauli frame, if any
    meta: Dict[str, object] = field(default_factory=dict)

    def role_labels(self, *roles: str) -> Tuple[str, ...]:
        out: List[str] = []
        for r in roles:
            out.extend(self.registers.get(r, ()))
        return tuple(out)

    def role_slots(self, *roles: str) -> Tuple[int, ...]:
        rm = self.circuit.register_map
        return tuple(rm[lab] for lab in self.role_labels(*roles))

    def accept_predicate(self, flips: Mapping[str, int]) -> bool:
        """True when no checked register flipped relative to the reference
        and every declared parity combination of flips is even."""
        if any(flips.get(lab, 0) != 0
               for lab in self.role_labels(*self.check_roles)):
            return False
        for group in self.parity_checks:
            if sum(flips.get(lab, 0) for lab in group) % 2 != 0:
                return False
        return True

    def accepts_flip_mask(self, flip_mask: int) -> bool:
        """Accept predicate on a register-slot flip bitmask (fault injector
        and frame-sampler convention)."""
        if flip_mask & self.check_mask():
            return False
        rm = self.circuit.register_map
        for group in self.parity_checks:
            par = 0
            for lab in group:
                par ^= (flip_mask >> rm[lab]) & 1
            if par:
                return False
        return True

    def check_mask(self) -> int:
        """Bitmask over register slots covered by the direct zero checks."""
        m = 0
        for s in self.role_slots(*self.check_roles):
            m |= 1 << s
        return m

    def rus_mask(self) -> int:
        m = 0
        for s in self.role_slots(*self.rus_roles):
            m |= 1 << s
        return m


def remap_instructions(instructions: Sequence[Instruction],
                       qubit_map: Mapping[int, int],
                       rename: Optional[Callable[[str], str]] = None,
                       ) -> List[Instruction]:
    """Relocate instructions onto new qubit indices, optionally renaming
    measurement registers (needed when a sub-gadget is instantiated twice)."""
    out: List[Instruction] = []
    for ins in instructions:
        targets = tuple(qubit_map[t] for t in ins.targets)
        reg = ins.register
        refs = ins.register_refs
        if rename is not None:
            if reg is not None:
                reg = rename(reg)
            if refs:
                refs = tuple(rename(r) for r in refs)
        out.append(Instruction(ins.kind, targets, angle=ins.angle,
                               register=reg, register_refs=refs))
    return out


def rename_roles(registers: Mapping[str, Tuple[str, ...]],
                 rename: Callable[[str], str]) -> Dict[str, Tuple[str, ...]]:
    return {role: tuple(rename(l) for l in labels)
            for role, labels in registers.items()}


def cx_chain(path: Sequence[int]) -> List[Instruction]:
    """CX gates walking along path: each qubit seeds the next."""
    return [Instruction("CX", (a, b)) for a, b in zip(path, path[1:])]


def zz_check(q1: int, q2: int, ancilla: int, register: str) -> List[Instruction]:
    """Parity check of Z_q1 Z_q2 via a fresh ancilla; reads 0 on even parity."""
    return [
        Instruction("PrepZ", (ancilla,)),
        Instruction("CX", (q1, ancilla)),
        Instruction("CX", (q2, ancilla)),
        Instruction("MeasZ", (ancilla,), register=register),
    ]
