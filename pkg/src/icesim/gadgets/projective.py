"""Projective preparation of CSS codewords by flagged stabilizer measurement.

Starting from the physical all-zero state, every stabilizer of the target
state (the code generators plus the logical stabilizers that pin down the
codeword) is measured with a one-flag gadget: one syndrome ancilla collects
the parity across the stabilizer's support in a zigzag order over the grid
coordinates, and one flag ancilla is coupled to the syndrome ancilla by two
extra CX gates, one at the beginning and one at the end of the extraction.
Any single ancilla fault that could spread into a multi-qubit data error
trips the flag.

The full set is measured for several rounds (three by default): a single
measurement error makes consecutive rounds disagree, so acceptance requires
every flag to read trivial and every check to repeat its first-round value.
First-round values of the X-type checks are genuinely random; the recorded
frame fixes (meta["frame_fixes"], one destabilizer per first-round register)
turn the projected state into the canonical +1-eigenvalue codeword in
software.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple, Union

from ..codes import ConcatIceberg
from ..pauli import Circuit, Instruction, PauliString
from .base import GadgetOutput

_NAMED_TARGETS = ("zero", "plus_zero_alternating", "ghz")


def build_projective_prep(code: ConcatIceberg,
                          target: Union[str, Sequence[PauliString]] = "zero",
                          rounds: int = 3) -> GadgetOutput:
    if not isinstance(code, ConcatIceberg):
        raise ValueError("projective preparation targets the two-level code")
    if rounds < 1:
        raise ValueError("rounds must be positive")
    logical = _target_stabilizers(code, target)
    checks = list(code.stabilizers) + logical
    _validate_checks(code, checks)
    destab = _solve_destabilizers(checks, code.n)

    n = code.n
    syn, flg = n, n + 1
    ins: List[Instruction] = [Instruction("PrepZ", (q,)) for q in range(n)]
    syn_labels: List[str] = []
    flag_labels: List[str] = []
    parity: List[Tuple[str, ...]] = []
    for t in range(rounds):
        for i, chk in enumerate(checks):
            rlab, flab = f"r{t}_{i}", f"f{t}_{i}"
            ins += _flag_check(code, chk, syn, flg, rlab, flab)
            syn_labels.append(rlab)
            flag_labels.append(flab)
            if t:
                parity.append((f"r{t - 1}_{i}", rlab))

    fixes = {f"r0_{i}": destab[i] for i in range(len(checks))}
    return GadgetOutput(
        circuit=Circuit(n + 2, ins),
        data_qubits=tuple(range(n)),
        registers={"syndromes": tuple(syn_labels),
                   "flags": tuple(flag_labels)},
        check_roles=("flags",),
        rus_roles=("flags",),
        parity_checks=tuple(parity),
        meta={"variant": "projective_prep", "rounds": rounds,
              "target": target if isinstance(target, str) else "custom",
              "num_checks": len(checks),
              "frame_fixes": fixes},
    )


def _target_stabilizers(code: ConcatIceberg,
                        target: Union[str, Sequence[PauliString]],
                        ) -> List[PauliString]:
    if not isinstance(target, str):
        return [p.unsigned() for p in target]
    if target == "zero":
        return list(code.logical_z)
    if target == "plus_zero_alternating":
        return [code.logical_x[j] if j % 2 == 0 else code.logical_z[j]
                for j in range(code.k)]
    if target == "ghz":
        out = [(code.logical_z[i] * code.logical_z[i + 1]).unsigned()
               for i in range(code.k - 1)]
        gx = code.logical_x[0]
        for i in range(1, code.k):
            gx = (gx * code.logical_x[i]).unsigned()
        out.append(gx)
        return out
    raise ValueError(f"unknown target {target!r} (named: {_NAMED_TARGETS})")


def _check_kind(chk: PauliString) -> str:
    if chk.z and not chk.x:
        return "Z"
    if chk.x and not chk.z:
        return "X"
    raise ValueError(f"check {chk.to_label()} is not CSS (pure X or Z type)")


def _validate_checks(code: ConcatIceberg, checks: List[PauliString]) -> None:
    if len(checks) != code.n:
        raise ValueError("target under- or over-determined: "
                         f"{len(checks)} checks for {code.n} qubits")
    for i, a in enumerate(checks):
        _check_kind(a)
        for b in checks[i + 1:]:
            if not a.commutes(b):
                raise ValueError("target stabilizers do not commute")


def _zigzag(code: ConcatIceberg, support: Sequence[int]) -> List[int]:
    """Boustrophedon order over the grid: by row, alternating x direction."""
    def key(q: int) -> Tuple[int, int]:
        x, y = code.coords(q)
        return (y, -x if y % 2 else x)
    return sorted(support, key=key)


def _flag_check(code: ConcatIceberg, chk: PauliString, syn: int, flg: int,
                rlab: str, flab: str) -> List[Instruction]:
    kind = _check_kind(chk)
    order = _zigzag(code, chk.support())
    if kind == "Z":
        ins = [Instruction("PrepZ", (syn,)), Instruction("PrepX", (flg,)),
               Instruction("CX", (flg, syn))]
        ins += [Instruction("CX", (q, syn)) for q in order]
        ins += [Instruction("CX", (flg, syn)),
                Instruction("MeasZ", (syn,), register=rlab),
                Instruction("MeasX", (flg,), register=flab)]
    else:
        ins = [Instruction("PrepX", (syn,)), Instruction("PrepZ", (flg,)),
               Instruction("CX", (syn, flg))]
        ins += [Instruction("CX", (syn, q)) for q in order]
        ins += [Instruction("CX", (syn, flg)),
                Instruction("MeasX", (syn,), register=rlab),
                Instruction("MeasZ", (flg,), register=flab)]
    return ins


def _solve_destabilizers(gens: Sequence[PauliString],
                         n: int) -> List[PauliString]:
    """One destabilizer per generator: anticommutes with exactly that one.

    Gaussian elimination over GF(2) on the symplectic products; raises if the
    generators are dependent (the target would be over-determined).
    """
    m = len(gens)
    # row j dotted with the candidate [dx | dz] gives its commutation with g_j
    rows = [g.z | (g.x << n) for g in gens]
    rhs = [1 << j for j in range(m)]
    pivots: List[int] = []
    r = 0
    for col in range(2 * n):
        sel = next((i for i in range(r, m) if (rows[i] >> col) & 1), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        rhs[r], rhs[sel] = rhs[sel], rhs[r]
        for i in range(m):
            if i != r and (rows[i] >> col) & 1:
                rows[i] ^= rows[r]
                rhs[i] ^= rhs[r]
        pivots.append(col)
        r += 1
        if r == m:
            break
    if r < m:
        raise ValueError("dependent stabilizer set")
    out = []
    for j in range(m):
        vx = vz = 0
        for i, col in enumerate(pivots):
            if (rhs[i] >> j) & 1:
                if col < n:
                    vx |= 1 << col
                else:
                    vz |= 1 << (col - n)
        out.append(PauliString(n, vx, vz, 0))
    return out
