"""Bit-packed stabilizer tableau simulator (column-major layout).

The tableau keeps, for each qubit q, two integers ``colx[q]`` / ``colz[q]``
whose bit h is the X/Z component of row h.  Rows 0..n-1 are destabilizers,
rows n..2n-1 stabilizers, row 2n a scratch row for deterministic measurement
resolution.  Signs live in a single integer bitmask over rows.  Unitary gates
are then O(1) integer mask operations regardless of n; measurements are O(n).
"""

from __future__ import annotations

import math
import random
from typing import Dict, List, Optional, Tuple

from .pauli import (Circuit, Instruction, PauliString, _quarter_turns,
                    pauli_multiply)


class StabilizerTableau:
    def __init__(self, num_qubits: int):
        n = num_qubits
        self.n = n
        self.colx: List[int] = [1 << q for q in range(n)]          # destab q = X_q
        self.colz: List[int] = [1 << (n + q) for q in range(n)]    # stab q = Z_q
        self.r = 0  # sign bits: bit h set means row h has sign -1
        self.scratch = 2 * n
        self.all_rows = (1 << (2 * n)) - 1
        self.stab_rows = ((1 << n) - 1) << n

    # -- row access --------------------------------------------------------
    def row(self, h: int) -> PauliString:
        x = z = 0
        for q in range(self.n):
            x |= ((self.colx[q] >> h) & 1) << q
            z |= ((self.colz[q] >> h) & 1) << q
        return PauliString(self.n, x, z, 2 * ((self.r >> h) & 1))

    def _set_row(self, h: int, p: PauliString) -> None:
        bit = 1 << h
        for q in range(self.n):
            if (p.x >> q) & 1:
                self.colx[q] |= bit
            else:
                self.colx[q] &= ~bit
            if (p.z >> q) & 1:
                self.colz[q] |= bit
            else:
                self.colz[q] &= ~bit
        if p.phase_exp == 2:
            self.r |= bit
        else:
            self.r &= ~bit

    # -- phase-tracked row multiplication ----------------------------------
    def _rowsum_into(self, mask: int, p_row: int) -> None:
        """For every row h in mask: row_h := row_h * row_p (phase-correct)."""
        if mask == 0:
            return
        px = pz = 0
        # mod-4 counter over rows: cnt = 2*cnt1 + cnt0
        cnt0 = cnt1 = 0

        def add(m: int, v: int) -> None:
            nonlocal cnt0, cnt1
            if v == 1:
                carry = cnt0 & m
                cnt0 ^= m
                cnt1 ^= carry
            else:  # v == 3, i.e. subtract one
                borrow = ~cnt0 & m
                cnt0 ^= m
                cnt1 ^= borrow

        pbit = 1 << p_row
        for q in range(self.n):
            c = (self.colx[q] >> p_row) & 1
            d = (self.colz[q] >> p_row) & 1
            if not (c or d):
                continue
            a, b = self.colx[q], self.colz[q]
            if c and d:      # operand Y: +1 for X rows, -1 for Z rows
                add(mask & a & ~b, 1)
                add(mask & ~a & b, 3)
            elif c:          # operand X: +1 for Z rows, -1 for Y rows
                add(mask & ~a & b, 1)
                add(mask & a & b, 3)
            else:            # operand Z: +1 for Y rows, -1 for X rows
                add(mask & a & b, 1)
                add(mask & a & ~b, 3)
            if c:
                px |= 1 << q
            if d:
                pz |= 1 << q
        for q in range(self.n):
            if (px >> q) & 1:
                self.colx[q] ^= mask
            if (pz >> q) & 1:
                self.colz[q] ^= mask
        # new sign = old sign xor p's sign xor high bit of the i-exponent count
        p_sign = -(self.r >> p_row) & 1
        if p_sign:
            self.r ^= mask
        self.r ^= cnt1 & mask

    def _mult_axis_rows(self, mask: int, axis: str, qubits: Tuple[int, int],
                        extra_exp: int) -> None:
        """For rows in mask: row := i^extra_exp * Axis * row, Axis = ZZ or XX."""
        if mask == 0:
            return
        cnt0 = cnt1 = 0

        def add(m: int, v: int) -> None:
            nonlocal cnt0, cnt1
            if v == 1:
                carry = cnt0 & m
                cnt0 ^= m
                cnt1 ^= carry
            else:
                borrow = ~cnt0 & m
                cnt0 ^= m
                cnt1 ^= borrow

        if extra_exp % 4 == 1:
            add(mask, 1)
        elif extra_exp % 4 == 3:
            add(mask, 3)
        elif extra_exp % 4 == 2:
            self.r ^= mask
        for q in qubits:
            a, b = self.colx[q], self.colz[q]
            if axis == "Z":   # operand1 Z: +1 if row has X, -1 if row has Y
                add(mask & a & ~b, 1)
                add(mask & a & b, 3)
            else:             # operand1 X: +1 if row has Y, -1 if row has Z
                add(mask & a & b, 1)
                add(mask & ~a & b, 3)
        for q in qubits:
            if axis == "Z":
                self.colz[q] ^= mask
            else:
                self.colx[q] ^= mask
        self.r ^= cnt1 & mask

    # -- gates -------------------------------------------------------------
    def h(self, q: int) -> None:
        self.r ^= self.colx[q] & self.colz[q]
        self.colx[q], self.colz[q] = self.colz[q], self.colx[q]

    def s(self, q: int) -> None:
        self.r ^= self.colx[q] & self.colz[q]
        self.colz[q] ^= self.colx[q]

    def x(self, q: int) -> None:
        self.r ^= self.colz[q]

    def z(self, q: int) -> None:
        self.r ^= self.colx[q]

    def y(self, q: int) -> None:
        self.r ^= self.colx[q] ^ self.colz[q]

    def cx(self, c: int, t: int) -> None:
        self.r ^= self.colx[c] & self.colz[t] & ~(self.colx[t] ^ self.colz[c])
        self.colx[t] ^= self.colx[c]
        self.colz[c] ^= self.colz[t]

    def swap(self, a: int, b: int) -> None:
        self.colx[a], self.colx[b] = self.colx[b], self.colx[a]
        self.colz[a], self.colz[b] = self.colz[b], self.colz[a]

    def rot(self, kind: str, angle: float, a: int, b: int) -> None:
        k = _quarter_turns(angle)
        if k is None:
            raise ValueError("tableau only supports rotations at multiples of pi/2")
        if k == 0:
            return
        if kind == "RotZZ":
            anti = self.colx[a] ^ self.colx[b]
            axis = "Z"
        else:
            anti = self.colz[a] ^ self.colz[b]
            axis = "X"
        anti &= self.all_rows | (1 << self.scratch)
        if k == 2:
            self.r ^= anti
            return
        # k=1: P -> -i*Axis*P ; k=3: P -> +i*Axis*P  (anticommuting rows only)
        self._mult_axis_rows(anti, axis, (a, b), 3 if k == 1 else 1)

    # -- measurement -------------------------------------------------------
    def measure_z(self, q: int, rng: random.Random,
                  forced: Optional[int] = None) -> int:
        anti_stab = self.colx[q] & self.stab_rows
        if anti_stab:
            p_row = anti_stab.bit_length() - 1  # pick one anticommuting stabilizer
            others = (self.colx[q] & ~(1 << p_row)) & self.all_rows
            self._rowsum_into(others, p_row)
            # destabilizer partner <- old stabilizer row p
            self._set_row(p_row - self.n, self.row(p_row))
            outcome = rng.getrandbits(1) if forced is None else forced
            self._set_row(p_row, PauliString(self.n, 0, 1 << q, 2 * outcome))
            return outcome
        # deterministic: accumulate product of stabilizers flagged by destabilizers
        self._set_row(self.scratch, PauliString.identity(self.n))
        flag = self.colx[q] & ((1 << self.n) - 1)
        sbit = 1 << self.scratch
        while flag:
            i = flag & -flag
            self._rowsum_into(sbit, i.bit_length() - 1 + self.n)
            flag ^= i
        return (self.r >> self.scratch) & 1

    def prep_z(self, q: int, rng: random.Random) -> None:
        if self.measure_z(q, rng) == 1:
            self.x(q)

    # -- state queries -----------------------------------------------------
    def stabilizers(self) -> List[PauliString]:
        return [self.row(self.n + i) for i in range(self.n)]

    def canonical_stabilizers(self) -> List[PauliString]:
        """Gaussian-eliminated, sign-tracked canonical generating set."""
        rows = self.stabilizers()
        return canonicalize(rows)

    def expectation(self, p: PauliString) -> Optional[int]:
        """+1/-1 if p (Hermitian, real sign) is fixed by the state, else None."""
        canon = self.canonical_stabilizers()
        work = p
        for g in canon:
            if _has_bit(work, _pivot_bit(g)):
                work = pauli_multiply(g, work)
        if work.x == 0 and work.z == 0:
            # work = G * p with G a +1-eigenvalue stabilizer product, so
            # p = i^phase * G and the residual phase is the eigenvalue.
            return 1 if work.phase_exp == 0 else -1
        return None


def _pauli_key(p: PauliString) -> int:
    # interleave for a canonical pivot ordering: (x,z) per qubit
    key = 0
    for q in range(p.num_qubits):
        key |= ((p.x >> q) & 1) << (2 * q + 1)
        key |= ((p.z >> q) & 1) << (2 * q)
    return key


def _pivot_bit(p: PauliString) -> int:
    return _pauli_key(p).bit_length() - 1


def _has_bit(p: PauliString, bit: int) -> bool:
    return (_pauli_key(p) >> bit) & 1 == 1


def canonicalize(rows: List[PauliString]) -> List[PauliString]:
    """Reduce a commuting generating set to a canonical sign-tracked basis."""
    pool = [r for r in rows if r.x or r.z]
    basis: List[PauliString] = []
    while pool:
        pool.sort(key=_pauli_key)
        row = pool.pop()
        pb = _pivot_bit(row)
        pool = [pauli_multiply(row, g) if _has_bit(g, pb) else g for g in pool]
        pool = [g for g in pool if g.x or g.z]
        basis.append(row)
    # back-substitute for full echelon form (pivots unique to their row)
    for i in range(len(basis) - 1, -1, -1):
        pb = _pivot_bit(basis[i])
        for j in range(i):
            if _has_bit(basis[j], pb):
                basis[j] = pauli_multiply(basis[i], basis[j])
    return basis


def groups_equal(a: List[PauliString], b: List[PauliString]) -> bool:
    ca, cb = canonicalize(list(a)), canonicalize(list(b))
    if len(ca) != len(cb):
        return False
    return all(p.x == q.x and p.z == q.z and p.phase_exp == q.phase_exp
               for p, q in zip(ca, cb))


def tableau_run(c: Circuit, seed: int = 0,
                forced_outcomes: Optional[Dict[str, int]] = None,
                error_stream: Optional[Dict[int, PauliString]] = None,
                meas_flips: Optional[set] = None,
                ) -> Tuple[Dict[str, int], StabilizerTableau]:
    """Noiseless (or explicitly-faulted) stabilizer run.

    error_stream maps instruction index -> Pauli applied after that instruction
    (used by the noisy-tableau oracle); meas_flips is a set of register labels
    whose recorded bit is flipped (classical measurement error).
    """
    rng = random.Random(seed)
    tab = StabilizerTableau(c.num_qubits)
    record: Dict[str, int] = {}
    for idx, ins in enumerate(c.instructions):
        k = ins.kind
        if k == "H":
            tab.h(ins.targets[0])
        elif k == "S":
            tab.s(ins.targets[0])
        elif k == "X":
            tab.x(ins.targets[0])
        elif k == "Y":
            tab.y(ins.targets[0])
        elif k == "Z":
            tab.z(ins.targets[0])
        elif k == "CX":
            tab.cx(*ins.targets)
        elif k == "SWAP":
            tab.swap(*ins.targets)
        elif k in ("RotZZ", "RotXX"):
            tab.rot(k, ins.angle, *ins.targets)
        elif k == "PrepZ":
            tab.prep_z(ins.targets[0], rng)
        elif k == "PrepX":
            tab.prep_z(ins.targets[0], rng)
            tab.h(ins.targets[0])
        elif k == "MeasZ":
            forced = forced_outcomes.get(ins.register) if forced_outcomes else None
            bit = tab.measure_z(ins.targets[0], rng, forced)
            if meas_flips and ins.register in meas_flips:
                bit ^= 1
            record[ins.register] = bit
        elif k == "MeasX":
            q = ins.targets[0]
            tab.h(q)
            forced = forced_outcomes.get(ins.register) if forced_outcomes else None
            bit = tab.measure_z(q, rng, forced)
            tab.h(q)
            if meas_flips and ins.register in meas_flips:
                bit ^= 1
            record[ins.register] = bit
        elif k in ("Tick", "NoiseSite", "Detector", "Observable"):
            pass
        else:
            raise ValueError(f"unhandled instruction {k}")
        if error_stream and idx in error_stream:
            err = error_stream[idx]
            for q in range(c.num_qubits):
                kind = err.kind_at(q)
                if kind == "X":
                    tab.x(q)
                elif kind == "Y":
                    tab.y(q)
                elif kind == "Z":
                    tab.z(q)
    return record, tab
