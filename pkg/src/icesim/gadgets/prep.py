"""Logical state preparation gadgets for the block codes.

All preparations target either the logical all-zero state or the logical GHZ
state of a single block.  Each variant carries parity checks whose registers
form the accept predicate: a shot (or a repeat-until-success iteration) is
kept only when every check reads its noiseless value.

Variants:

* ``two_branch_d2``  — seed one qubit in |+> and copy it outward along two CX
  chains; a ZZ parity check on the two chain terminals catches any bit-flip
  fault that spread along a chain.
* ``log_depth_d2``   — the same state via a balanced fan-out tree (depth
  ~log2 n) with terminal ZZ checks pairing leaves across the two halves of
  the tree.  Options: ``dfs_flips`` (record an X frame keeping intermediate
  states balanced; flips the expected sign of the Z-type checks),
  ``dd_pulses`` (insert self-cancelling X-pulse pairs on idle qubits).
* ``ghz_block_d2``   — the logical GHZ state of one block: a Bell pair on the
  outer qubits tensored with a physical GHZ on the inner qubits.
* ``two_branch_d4``  — distance-4 block preparation (built in the distance-4
  module; re-exported through build_prep).
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from ..codes import IcebergCode
from ..pauli import Circuit, Instruction, PauliString
from .base import GadgetOutput, cx_chain, zz_check

_CHECK_ROLE = "checks"


def build_prep(code, variant: str, *, dfs_flips: bool = False,
               dd_pulses: bool = False) -> GadgetOutput:
    if variant == "two_branch_d2":
        _require_iceberg(code, variant)
        return _two_branch_d2(code)
    if variant == "log_depth_d2":
        _require_iceberg(code, variant)
        return _log_depth_d2(code, dfs_flips=dfs_flips, dd_pulses=dd_pulses)
    if variant == "ghz_block_d2":
        _require_iceberg(code, variant)
        return _ghz_block_d2(code)
    if variant == "two_branch_d4":
        from .distance4 import two_branch_d4
        return two_branch_d4(code)
    raise ValueError(f"unsupported prep variant {variant!r}")


def _require_iceberg(code, variant):
    if not isinstance(code, IcebergCode):
        raise ValueError(f"{variant} requires a single-block code")


def _two_branch_d2(code: IcebergCode) -> GadgetOutput:
    n = code.n
    anc = n
    m = n // 2
    ins: List[Instruction] = [Instruction("PrepX", (0,))]
    ins += [Instruction("PrepZ", (q,)) for q in range(1, n)]
    branch_a = list(range(0, m + 1))          # 0 -> 1 -> ... -> m
    branch_b = [0] + list(range(m + 1, n))    # 0 -> m+1 -> ... -> n-1
    ins += cx_chain(branch_a)
    ins += cx_chain(branch_b)
    ins += zz_check(branch_a[-1], branch_b[-1], anc, "chk0")
    return GadgetOutput(
        circuit=Circuit(n + 1, ins),
        data_qubits=tuple(range(n)),
        registers={_CHECK_ROLE: ("chk0",)},
        check_roles=(_CHECK_ROLE,),
        rus_roles=(_CHECK_ROLE,),
        meta={"variant": "two_branch_d2"},
    )


def _ghz_block_d2(code: IcebergCode) -> GadgetOutput:
    """Logical GHZ state: Bell pair on (q0, q_{n-1}), GHZ on the inner chain."""
    n = code.n
    anc = n
    ins: List[Instruction] = [
        Instruction("PrepX", (0,)),
        Instruction("PrepZ", (n - 1,)),
        Instruction("CX", (0, n - 1)),
        Instruction("PrepX", (1,)),
    ]
    ins += [Instruction("PrepZ", (q,)) for q in range(2, n - 1)]
    h = (n - 1) // 2
    branch_a = list(range(1, h + 1))
    branch_b = [1] + list(range(h + 1, n - 1))
    ins += cx_chain(branch_a)
    ins += cx_chain(branch_b)
    ins += zz_check(branch_a[-1], branch_b[-1], anc, "chk0")
    return GadgetOutput(
        circuit=Circuit(n + 1, ins),
        data_qubits=tuple(range(n)),
        registers={_CHECK_ROLE: ("chk0",)},
        check_roles=(_CHECK_ROLE,),
        rus_roles=(_CHECK_ROLE,),
        meta={"variant": "ghz_block_d2"},
    )


def _build_tree(n: int) -> Tuple[List[List[Tuple[int, int]]], List[int], List[int]]:
    """Balanced fan-out tree over qubits 0..n-1 rooted at 0.

    Returns (layers of CX edges, leaves of side A, leaves of side B).  Side A
    is the subtree seeded by the first copy (qubit 1); side B is everything
    rooted at qubit 0.  Each layer every previously reached qubit copies to
    one fresh qubit, most recently reached qubits first, which keeps the two
    sides the same size and makes every non-final-layer node an interior node.
    """
    layers: List[List[Tuple[int, int]]] = [[(0, 1)]]
    side = {0: "B", 1: "A"}
    # reached qubits in reverse order of arrival (fresh qubits fan out first)
    recent: List[int] = [1, 0]
    children: Dict[int, List[int]] = {0: [1], 1: []}
    nxt = 2
    while nxt < n:
        layer: List[Tuple[int, int]] = []
        sources = list(recent)
        added: List[int] = []
        for src in sources:
            if nxt >= n:
                break
            layer.append((src, nxt))
            side[nxt] = side[src]
            children[nxt] = []
            children[src].append(nxt)
            added.append(nxt)
            nxt += 1
        recent = added + [q for q in recent if q not in added]
        layers.append(layer)
    leaves_a = sorted(q for q in range(n) if not children.get(q) and side[q] == "A")
    leaves_b = sorted(q for q in range(n) if not children.get(q) and side[q] == "B")
    return layers, leaves_a, leaves_b


def _log_depth_d2(code: IcebergCode, *, dfs_flips: bool,
                  dd_pulses: bool) -> GadgetOutput:
    n = code.n
    layers, leaves_a, leaves_b = _build_tree(n)
    ins: List[Instruction] = [Instruction("PrepX", (0,))]
    ins += [Instruction("PrepZ", (q,)) for q in range(1, n)]
    seeded: List[int] = []
    pulse_parity = [0] * n
    reached = {0}
    for layer in layers:
        for src, dst in layer:
            ins.append(Instruction("CX", (src, dst)))
            seeded.append(dst)
        reached.update(dst for _, dst in layer)
        if dd_pulses:
            busy = {q for e in layer for q in e}
            for q in sorted(reached - busy):
                ins.append(Instruction("X", (q,)))
                pulse_parity[q] ^= 1
    if dd_pulses:  # close every echo so the pulses cancel exactly
        for q in range(n):
            if pulse_parity[q]:
                ins.append(Instruction("X", (q,)))

    frame: Optional[PauliString] = None
    if dfs_flips:
        flip_set = set(seeded[0::2])
        if len(flip_set) % 2 == 0:  # force the Z-type stabilizer sign to -1
            flip_set.symmetric_difference_update({seeded[-1]})
        for q in sorted(flip_set):
            ins.append(Instruction("X", (q,)))
        frame = PauliString.from_support(n, "X", sorted(flip_set))

    # terminal parity checks: pair leaves across the two sides so any chain
    # of bit-flip spread hits some check an odd number of times
    pairs = list(zip(leaves_a, leaves_b))
    extra_a = leaves_a[len(pairs):]
    extra_b = leaves_b[len(pairs):]
    pairs += [(leaf, 0) for leaf in extra_a]   # partner on the other side
    pairs += [(leaf, 1) for leaf in extra_b]
    labels = []
    for i, (u, v) in enumerate(pairs):
        lab = f"chk{i}"
        ins += zz_check(u, v, n + i, lab)
        labels.append(lab)
    return GadgetOutput(
        circuit=Circuit(n + len(pairs), ins),
        data_qubits=tuple(range(n)),
        registers={_CHECK_ROLE: tuple(labels)},
        check_roles=(_CHECK_ROLE,),
        rus_roles=(_CHECK_ROLE,),
        frame=frame,
        meta={"variant": "log_depth_d2", "cx_layers": len(layers),
              "check_ancillas": len(pairs), "dfs_flips": dfs_flips,
              "dd_pulses": dd_pulses},
    )
