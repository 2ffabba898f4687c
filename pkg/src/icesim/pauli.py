"""Pauli algebra, circuit intermediate representation, and text serialization.

Pauli operators are stored bit-packed: arbitrary-precision integers hold the X
and Z support masks (bit q = qubit q), so all group operations are word-parallel
mask arithmetic.  A Pauli is ``i^phase_exp * prod_q W_q`` where ``W_q`` is the
Hermitian single-qubit Pauli selected by the (x, z) bit pair at q (1,1 -> Y).
Real operators carry ``phase_exp`` 0 or 2; imaginary phases appear transiently
inside products and tableau row arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple

_PAULI_FROM_BITS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS_FROM_PAULI = {v: k for k, v in _PAULI_FROM_BITS.items()}


def popcount(v: int) -> int:
    return v.bit_count()


def phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent g of i contributed when multiplying canonical Paulis (x1,z1)*(x2,z2).

    Per-qubit contributions follow the standard tableau row-sum rule; the result
    is returned mod 4 and excludes the operands' own phases.
    """
    plus = popcount((x1 & z1 & z2 & ~x2) | (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2))
    minus = popcount((x1 & z1 & x2 & ~z2) | (x1 & ~z1 & z2 & ~x2) | (~x1 & z1 & x2 & z2))
    return (plus - minus) % 4


@dataclass(frozen=True)
class PauliString:
    """Bit-packed n-qubit Pauli operator with phase i^phase_exp."""

    num_qubits: int
    x: int = 0
    z: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        mask = (1 << self.num_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("support exceeds num_qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- constructors ------------------------------------------------------
    @staticmethod
    def identity(num_qubits: int) -> "PauliString":
        return PauliString(num_qubits)

    @staticmethod
    def single(num_qubits: int, qubit: int, kind: str) -> "PauliString":
        xb, zb = _BITS_FROM_PAULI[kind]
        return PauliString(num_qubits, xb << qubit, zb << qubit)

    @staticmethod
    def from_label(label: str, num_qubits: Optional[int] = None) -> "PauliString":
        """Parse literal form like ``+XXZI`` or ``-IYZ`` (qubit 0 first)."""
        sign = 0
        body = label
        if body and body[0] in "+-":
            sign = 2 if body[0] == "-" else 0
            body = body[1:]
        if num_qubits is None:
            num_qubits = len(body)
        if len(body) != num_qubits:
            raise ValueError("label length mismatch")
        x = z = 0
        for q, ch in enumerate(body):
            xb, zb = _BITS_FROM_PAULI[ch]
            x |= xb << q
            z |= zb << q
        return PauliString(num_qubits, x, z, sign)

    @staticmethod
    def from_support(num_qubits: int, kind: str, qubits: Iterable[int]) -> "PauliString":
        mask = 0
        for q in qubits:
            mask |= 1 << q
        xb, zb = _BITS_FROM_PAULI[kind]
        return PauliString(num_qubits, mask if xb else 0, mask if zb else 0)

    # -- queries -----------------------------------------------------------
    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def sign(self) -> int:
        if self.phase_exp == 0:
            return 1
        if self.phase_exp == 2:
            return -1
        raise ValueError("operator has an imaginary phase")

    @property
    def phase(self) -> complex:
        return 1j ** self.phase_exp

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def kind_at(self, qubit: int) -> str:
        return _PAULI_FROM_BITS[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def to_label(self) -> str:
        body = "".join(self.kind_at(q) for q in range(self.num_qubits))
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase_exp]
        return prefix + body

    def support(self) -> Tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.num_qubits) if (m >> q) & 1)

    # -- algebra -----------------------------------------------------------
    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def commutes(self, other: "PauliString") -> bool:
        return pauli_commutes(self, other)

    def unsigned(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z)

    def restricted(self, qubits: Sequence[int]) -> "PauliString":
        """Project onto the given qubits, reindexed 0..len-1 (phase dropped)."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliString(len(qubits), x, z)

    def embedded(self, num_qubits: int, qubits: Sequence[int]) -> "PauliString":
        """Embed this operator into a larger register at the given positions."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> i) & 1) << q
            z |= ((self.z >> i) & 1) << q
        return PauliString(num_qubits, x, z, self.phase_exp)


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    if a.num_qubits != b.num_qubits:
        raise ValueError("size mismatch")
    g = phase_exponent(a.x, a.z, b.x, b.z)
    return PauliString(a.num_qubits, a.x ^ b.x, a.z ^ b.z, a.phase_exp + b.phase_exp + g)


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    if a.num_qubits != b.num_qubits:
        raise ValueError("size mismatch")
    return (popcount(a.x & b.z) + popcount(a.z & b.x)) % 2 == 0


# ---------------------------------------------------------------------------
# Circuit IR
# ---------------------------------------------------------------------------

GATE_1Q = {"H", "X", "Y", "Z", "S"}
GATE_2Q = {"CX", "SWAP"}
ROTATIONS = {"RotZZ", "RotXX"}
PREPS = {"PrepZ", "PrepX"}
MEASUREMENTS = {"MeasZ", "MeasX"}
ANNOTATIONS = {"Tick", "NoiseSite", "Detector", "Observable"}
ALL_KINDS = GATE_1Q | GATE_2Q | ROTATIONS | PREPS | MEASUREMENTS | ANNOTATIONS


@dataclass(frozen=True)
class Instruction:
    kind: str
    targets: Tuple[int, ...] = ()
    angle: Optional[float] = None
    register: Optional[str] = None
    register_refs: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown instruction kind {self.kind!r}")
        if self.kind in ROTATIONS:
            if len(self.targets) != 2:
                raise ValueError(f"{self.kind} needs exactly two targets")
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        if self.kind in GATE_2Q and len(self.targets) != 2:
            raise ValueError(f"{self.kind} needs exactly two targets")
        if self.kind in (GATE_1Q | PREPS | MEASUREMENTS) and len(self.targets) != 1:
            raise ValueError(f"{self.kind} needs exactly one target")
        if self.kind in MEASUREMENTS and not self.register:
            raise ValueError(f"{self.kind} needs a register label")

    @property
    def is_unitary(self) -> bool:
        return self.kind in GATE_1Q | GATE_2Q | ROTATIONS

    @property
    def is_clifford_unitary(self) -> bool:
        if self.kind in GATE_1Q | GATE_2Q:
            return True
        if self.kind in ROTATIONS:
            return _quarter_turns(self.angle) is not None
        return False


def _quarter_turns(angle: float, tol: float = 1e-9) -> Optional[int]:
    """Return k with angle = k*(pi/2) (mod 2*pi) if within tol, else None."""
    k = angle / (math.pi / 2)
    kr = round(k)
    if abs(k - kr) < tol:
        return kr % 4
    return None


class Circuit:
    """Ordered instruction list with a register map (label -> slot index)."""

    def __init__(self, num_qubits: int, instructions: Iterable[Instruction] = ()):
        self.num_qubits = num_qubits
        self.instructions: Tuple[Instruction, ...] = tuple(instructions)
        self.register_map = {}
        for ins in self.instructions:
            for t in ins.targets:
                if not (0 <= t < num_qubits):
                    raise ValueError(f"target {t} out of range for {num_qubits} qubits")
            if ins.kind in MEASUREMENTS:
                if ins.register in self.register_map:
                    raise ValueError(f"duplicate register label {ins.register!r}")
                self.register_map[ins.register] = len(self.register_map)
            if ins.kind in ("Detector", "Observable"):
                for ref in ins.register_refs:
                    if ref not in self.register_map:
                        raise ValueError(f"register {ref!r} referenced before written")

    @property
    def num_registers(self) -> int:
        return len(self.register_map)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ValueError("size mismatch")
        return Circuit(self.num_qubits, self.instructions + other.instructions)

    def register_labels(self) -> Tuple[str, ...]:
        return tuple(self.register_map)

    # -- text serialization -------------------------------------------------
    def to_text(self) -> str:
        lines = [f"# qubits {self.num_qubits}"]
        for ins in self.instructions:
            parts = [ins.kind]
            if ins.targets:
                parts.append(",".join(str(t) for t in ins.targets))
            elif ins.register_refs:
                parts.append(",".join(ins.register_refs))
            if ins.angle is not None:
                parts.append(f"@{ins.angle!r}")
            if ins.register is not None:
                parts.append(f"->{ins.register}")
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Circuit":
        num_qubits = None
        instructions = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("qubits"):
                    num_qubits = int(body.split()[1])
                continue
            tokens = line.split()
            kind = tokens[0]
            targets: Tuple[int, ...] = ()
            register_refs: Tuple[str, ...] = ()
            angle = None
            register = None
            for tok in tokens[1:]:
                if tok.startswith("@"):
                    angle = float(tok[1:])
                elif tok.startswith("->"):
                    register = tok[2:]
                else:
                    items = tok.split(",")
                    if kind in ("Detector", "Observable"):
                        register_refs = tuple(items)
                    else:
                        targets = tuple(int(v) for v in items)
            instructions.append(
                Instruction(kind, targets, angle=angle, register=register,
                            register_refs=register_refs)
            )
        if num_qubits is None:
            num_qubits = 1 + max((t for ins in instructions for t in ins.targets), default=-1)
        return Circuit(num_qubits, instructions)


# ---------------------------------------------------------------------------
# Clifford conjugation and circuit inversion
# ---------------------------------------------------------------------------


def conjugate_through(gate: Instruction, p: PauliString) -> PauliString:
    """Return U p U^dagger for a Clifford gate U (heisenberg-forward propagation)."""
    if not gate.is_clifford_unitary:
        raise ValueError(f"{gate.kind} is not a Clifford unitary")
    n, x, z, ph = p.num_qubits, p.x, p.z, p.phase_exp
    if gate.kind in ROTATIONS:
        k = _quarter_turns(gate.angle)
        axis_kind = "Z" if gate.kind == "RotZZ" else "X"
        axis = PauliString.from_support(n, axis_kind, gate.targets)
        if pauli_commutes(p, axis) or k == 0:
            return p
        if k == 2:  # exp(-i pi/2 A): P -> A P A = -P for anticommuting P
            return PauliString(n, x, z, ph + 2)
        # k = 1: P -> -i A P ; k = 3: P -> +i A P
        extra = 3 if k == 1 else 1
        prod = pauli_multiply(axis, p)
        return PauliString(n, prod.x, prod.z, prod.phase_exp + extra)

    q = gate.targets[0]
    m = 1 << q
    if gate.kind == "H":
        if x & z & m:
            ph += 2
        nx = (x & ~m) | (m if z & m else 0)
        nz = (z & ~m) | (m if x & m else 0)
        return PauliString(n, nx, nz, ph)
    if gate.kind == "S":
        if x & z & m:
            ph += 2
        return PauliString(n, x, z ^ (x & m), ph)
    if gate.kind == "X":
        return PauliString(n, x, z, ph + (2 if z & m else 0))
    if gate.kind == "Z":
        return PauliString(n, x, z, ph + (2 if x & m else 0))
    if gate.kind == "Y":
        return PauliString(n, x, z, ph + (2 if ((x ^ z) & m) else 0))

    c, t = gate.targets
    mc, mt = 1 << c, 1 << t
    if gate.kind == "SWAP":
        def swapbits(v):
            bc, bt = (v >> c) & 1, (v >> t) & 1
            return (v & ~mc & ~mt) | (bt << c) | (bc << t)
        return PauliString(n, swapbits(x), swapbits(z), ph)
    if gate.kind == "CX":
        xc, zt = bool(x & mc), bool(z & mt)
        xt, zc = bool(x & mt), bool(z & mc)
        if xc and zt and (xt == zc):
            ph += 2
        nx = x ^ (mt if xc else 0)
        nz = z ^ (mc if zt else 0)
        return PauliString(n, nx, nz, ph)
    raise ValueError(f"unhandled gate {gate.kind}")


def conjugate_through_circuit(instructions: Iterable[Instruction], p: PauliString) -> PauliString:
    for ins in instructions:
        if ins.is_unitary:
            p = conjugate_through(ins, p)
    return p


def invert_instruction(ins: Instruction) -> Tuple[Instruction, ...]:
    if ins.kind in ROTATIONS:
        return (Instruction(ins.kind, ins.targets, angle=-ins.angle),)
    if ins.kind == "S":
        # S^-1 = Z . S (diagonal, order irrelevant)
        return (Instruction("S", ins.targets), Instruction("Z", ins.targets))
    if ins.kind in GATE_1Q | GATE_2Q:
        return (ins,)
    raise ValueError(f"{ins.kind} is not invertible")


def invert_circuit(c: Circuit) -> Circuit:
    out = []
    for ins in reversed(c.instructions):
        if ins.kind == "Tick":
            out.append(ins)
            continue
        if not ins.is_unitary:
            raise ValueError("circuit contains non-unitary instructions")
        out.extend(invert_instruction(ins))
    return Circuit(c.num_qubits, out)
