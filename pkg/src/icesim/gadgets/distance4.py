"""Distance-4 gadgets for the two-level grid code.

``qec_cycle_d4`` runs one full cycle of error detection/correction data
collection.  Each half couples an encoded inner-block ancilla transversally to
every row and reads it out destructively, extracting all high-level
stabilizers of one type, then sweeps every row with a two-leg Bell-pair check
extracting the low-level stabilizer of the same type:

* first half  (X type, detects Z errors): ancilla block in the encoded
  all-plus state acts as CX control into every row; destructive X readout
  yields the HighX bits (high-level syndromes are column-pair parities of
  those bits).  Per-row checks then fill the LowX bits.
* second half (Z type, detects X errors): the exact Hadamard conjugate -
  ancilla block in the encoded all-zero state as CX target, destructive Z
  readout (HighZ), then per-row LowZ checks.

Every ancilla-block qubit carries a flag partner sandwiching the transversal
coupling, so a single ancilla fault that could spread a column of errors into
the data always raises the matching flag register (HighXFlags / HighZFlags).
The row checks carry their own flag legs (LowXFlags / LowZFlags).

``two_branch_d4`` prepares the encoded all-zero state block by block: every
row is first prepared in the inner all-zero state by its own checked d=2
two-branch circuit, the top row is rotated to the encoded all-plus state,
and the rows are then chained together with transversal CX gates in two
branches (so each block controls at most one chain link and only the root
controls two).  An extra inner-code ancilla block reads the logical ZZ
operators of the two branch terminals through transversal CXs and a
transversal Z measurement, catching any bit-flip cascade down a branch.
Finally every row passes a Bell-pair X-type check (catching the two-block Z
pairs a single chain-gate fault can leave) and one interior row passes a
Z-type check (catching the full-column bit-flip pattern a fault on the
root's first chain link can leave).  Accepted single faults leave at most a
weight-one error; accepted pairs leave line strings or weight-two errors.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from ..codes import ConcatIceberg, IcebergCode
from ..pauli import Circuit, Instruction
from .base import GadgetOutput, remap_instructions


def _require_concat(code) -> None:
    if not isinstance(code, ConcatIceberg):
        raise ValueError("distance-4 gadgets require a two-level grid code")


def qec_cycle_d4(code: ConcatIceberg) -> GadgetOutput:
    _require_concat(code)
    from .prep import build_prep
    from .se import build_se

    inner = IcebergCode(code.k1)
    n, n1, n2 = code.n, code.n1, code.n2
    A = [n + x for x in range(n1)]            # ancilla block
    F = [n + n1 + x for x in range(n1)]       # per-qubit flags for the block
    b0, b1 = n + 2 * n1, n + 2 * n1 + 1       # Bell-pair legs, reused per row
    total = n + 2 * n1 + 2
    amap = {x: A[x] for x in range(n1)}
    amap[inner.n] = b0  # the block prep's check ancilla rides a Bell leg

    ins: List[Instruction] = []

    def block_prep(register: str) -> List[Instruction]:
        prep = build_prep(inner, "two_branch_d2")
        return remap_instructions(prep.circuit.instructions, amap,
                                  lambda _r: register)

    def transversal(a_controls: bool) -> List[Instruction]:
        out = []
        for y in range(n2):
            for x in range(n1):
                d = code.qubit_index(x, y)
                out.append(Instruction("CX", (A[x], d) if a_controls
                                       else (d, A[x])))
        return out

    def row_checks(basis: str, prefix: str) -> List[Instruction]:
        out = []
        for y in range(n2):
            se = build_se(inner, "bell_edz_edx", basis=basis)
            qmap = {x: code.qubit_index(x, y) for x in range(n1)}
            qmap[inner.n] = b0
            qmap[inner.n + 1] = b1
            names = {"syn": f"{prefix}{y}", "flag": f"{prefix}f{y}"}
            out += remap_instructions(se.circuit.instructions, qmap,
                                      names.__getitem__)
        return out

    # ---- X-type half: detects Z errors --------------------------------
    ins += block_prep("pchk0")
    ins += [Instruction("H", (q,)) for q in A]      # encoded all-plus
    ins += [Instruction("PrepZ", (f,)) for f in F]
    ins += [Instruction("CX", (A[x], F[x])) for x in range(n1)]
    ins += transversal(a_controls=True)
    ins += [Instruction("CX", (A[x], F[x])) for x in range(n1)]
    ins += [Instruction("MeasX", (A[x],), register=f"hx{x}")
            for x in range(n1)]
    ins += [Instruction("MeasZ", (F[x],), register=f"hxf{x}")
            for x in range(n1)]
    ins += row_checks("X", "lx")

    # ---- Z-type half: detects X errors --------------------------------
    ins += block_prep("pchk1")                      # encoded all-zero
    ins += [Instruction("PrepX", (f,)) for f in F]
    ins += [Instruction("CX", (F[x], A[x])) for x in range(n1)]
    ins += transversal(a_controls=False)
    ins += [Instruction("CX", (F[x], A[x])) for x in range(n1)]
    ins += [Instruction("MeasZ", (A[x],), register=f"hz{x}")
            for x in range(n1)]
    ins += [Instruction("MeasX", (F[x],), register=f"hzf{x}")
            for x in range(n1)]
    ins += row_checks("Z", "lz")

    registers: Dict[str, Tuple[str, ...]] = {
        "HighX": tuple(f"hx{x}" for x in range(n1)),
        "HighXFlags": tuple(f"hxf{x}" for x in range(n1)),
        "LowX": tuple(f"lx{y}" for y in range(n2)),
        "LowXFlags": tuple(f"lxf{y}" for y in range(n2)),
        "HighZ": tuple(f"hz{x}" for x in range(n1)),
        "HighZFlags": tuple(f"hzf{x}" for x in range(n1)),
        "LowZ": tuple(f"lz{y}" for y in range(n2)),
        "LowZFlags": tuple(f"lzf{y}" for y in range(n2)),
        "pchk": ("pchk0", "pchk1"),
    }
    return GadgetOutput(
        circuit=Circuit(total, ins),
        data_qubits=tuple(range(n)),
        registers=registers,
        check_roles=(),
        rus_roles=("pchk",),
        meta={"variant": "qec_cycle_d4", "n1": n1, "n2": n2,
              "block_qubits": tuple(A), "flag_qubits": tuple(F),
              "bell_qubits": (b0, b1)},
    )


def two_branch_d4(code: ConcatIceberg) -> GadgetOutput:
    _require_concat(code)
    from .prep import build_prep
    from .se import build_se

    inner = IcebergCode(code.k1)
    n, n1, n2 = code.n, code.n1, code.n2
    k1 = code.k1
    A = [n + x for x in range(n1)]             # logical-ZZ readout block
    b0, b1 = n + n1, n + n1 + 1                # reusable check ancillas
    total = n + n1 + 2

    def block_map(qubits: List[int]) -> Dict[int, int]:
        m = {x: qubits[x] for x in range(n1)}
        m[inner.n] = b0
        return m

    ins: List[Instruction] = []
    inner_prep = build_prep(inner, "two_branch_d2")
    for y in range(n2):
        ins += remap_instructions(inner_prep.circuit.instructions,
                                  block_map(list(code.row_qubits(y))),
                                  lambda _r, y=y: f"bchk{y}")
    ins += remap_instructions(inner_prep.circuit.instructions, block_map(A),
                              lambda _r: "achk")
    # root block to the encoded all-plus state
    ins += [Instruction("H", (q,)) for q in code.row_qubits(0)]

    # two-branch chain of transversal CX gates (root row 0 controls the
    # first link of each branch, interior blocks control exactly one link)
    h = n2 // 2
    branch_a = list(range(1, h + 1))
    branch_b = list(range(h + 1, n2))
    for branch in (branch_a, branch_b):
        path = [0] + branch
        for src, dst in zip(path, path[1:]):
            ins += [Instruction("CX", (code.qubit_index(x, src),
                                       code.qubit_index(x, dst)))
                    for x in range(n1)]

    # transversal logical-ZZ readout of the two branch terminals
    for term in (branch_a[-1], branch_b[-1]):
        ins += [Instruction("CX", (code.qubit_index(x, term), A[x]))
                for x in range(n1)]
    ins += [Instruction("MeasZ", (A[x],), register=f"azz{x}")
            for x in range(n1)]

    # per-row X-type checks, then one Z-type check on an interior row
    edz = build_se(inner, "bell_edz_edx", basis="X")
    for y in range(n2):
        qmap = {x: code.qubit_index(x, y) for x in range(n1)}
        qmap[inner.n] = b0
        qmap[inner.n + 1] = b1
        names = {"syn": f"lx{y}", "flag": f"lxf{y}"}
        ins += remap_instructions(edz.circuit.instructions, qmap,
                                  names.__getitem__)
    edx = build_se(inner, "bell_edz_edx", basis="Z")
    qmap = {x: code.qubit_index(x, 2) for x in range(n1)}
    qmap[inner.n] = b0
    qmap[inner.n + 1] = b1
    ins += remap_instructions(edx.circuit.instructions, qmap,
                              {"syn": "edx", "flag": "edxf"}.__getitem__)

    registers: Dict[str, Tuple[str, ...]] = {
        "block_checks": tuple(f"bchk{y}" for y in range(n2)) + ("achk",),
        "LowX": tuple(f"lx{y}" for y in range(n2)),
        "LowXFlags": tuple(f"lxf{y}" for y in range(n2)),
        "EDX": ("edx",),
        "EDXFlags": ("edxf",),
        "finalZZ": tuple(f"azz{x}" for x in range(n1)),
    }
    azz = registers["finalZZ"]
    parity = tuple((azz[j], azz[k1 + 1]) for j in range(1, k1 + 1)) + (azz,)
    return GadgetOutput(
        circuit=Circuit(total, ins),
        data_qubits=tuple(range(n)),
        registers=registers,
        check_roles=("block_checks", "LowX", "LowXFlags", "EDX", "EDXFlags"),
        rus_roles=(),
        parity_checks=parity,
        meta={"variant": "two_branch_d4", "n1": n1, "n2": n2,
              "branches": (tuple(branch_a), tuple(branch_b)),
              "edx_row": 2},
    )
