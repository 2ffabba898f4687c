"""Logical GHZ state preparation protocols.

Variants of :func:`build_ghz`:

* ``single_block``      — the logical GHZ state of one block, which factorizes
  into a Bell pair on the outer qubits and a physical GHZ chain on the inner
  qubits (delegates to the checked d=2 preparation gadget).
* ``parity_readout``    — non-destructive repeated measurement of the global
  product-X logical stabilizer over a row of blocks.  Per block the operator
  reduces, modulo the block stabilizer, to X on the top and bottom qubits, so
  one ancilla per repetition suffices: it is coupled to every top qubit in
  block order and then to every bottom qubit in the opposite order, which
  leaves any X hook error detectable on at least one block.  Acceptance
  requires consecutive repetitions to agree.
* ``multi_block_fanout_tree`` — GHZ over the logical qubits of many blocks:
  block 0 is prepared in its logical GHZ state, every other block in logical
  all-zero, and a balanced log-depth tree of FANOUT gadgets extends the
  entanglement block by block; a repeated parity readout of the global
  product-X stabilizer closes the protocol.
* ``concat_d4``         — GHZ over all logical qubits of the two-level grid
  code.  The logical all-zero state already carries every pairwise logical-ZZ
  stabilizer of the target; the missing global product-X stabilizer is
  stabilizer-equivalent to X on the four grid corners, and is measured with an
  inner-code ancilla block prepared in its logical GHZ state: the ancilla's
  top/bottom Bell stabilizer is imprinted on the corners through transversal
  CX gates into the top and bottom rows, then the ancilla block is read out
  destructively in the Z basis after one CX plus a Hadamard rotate the Bell
  X-parity onto the first ancilla qubit.  A plain transversal X readout would
  not be fault tolerant: an X error on one ancilla qubit spreads through both
  of its coupling CX gates into two data cells invisibly.  The Z-basis
  readout keeps the ancilla's own pairwise-Z GHZ stabilizers as deterministic
  register parities, so every such X hook is located by the readout record
  and the spread is correctable.  Because the code has distance 4, the
  measurement is repeated and shots where the repetitions disagree by a
  logical are discarded; the first repetition's random sign is fixed in
  software by a conditional logical-Z frame (recorded in meta["frame_fix"]).
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from ..codes import ConcatIceberg, IcebergCode
from ..pauli import Circuit, Instruction, PauliString
from .base import GadgetOutput, remap_instructions


def build_ghz(kind: str, *, k: Optional[int] = None,
              block_sizes: Optional[Sequence[int]] = None,
              k2: Optional[int] = None, k1: Optional[int] = None,
              repetitions: int = 2) -> GadgetOutput:
    if kind == "single_block":
        if k is None:
            raise ValueError("single_block needs k")
        return _single_block(IcebergCode(k))
    if kind == "parity_readout":
        if not block_sizes:
            raise ValueError("parity_readout needs block_sizes")
        return _parity_readout([IcebergCode(s) for s in block_sizes],
                               repetitions)
    if kind == "multi_block_fanout_tree":
        if not block_sizes:
            raise ValueError("multi_block_fanout_tree needs block_sizes")
        return _multi_block([IcebergCode(s) for s in block_sizes], repetitions)
    if kind == "concat_d4":
        if k2 is None or k1 is None:
            raise ValueError("concat_d4 needs k2 and k1")
        return _concat_d4(k2, k1, repetitions)
    raise ValueError(f"unsupported ghz kind {kind!r}")


def _single_block(code: IcebergCode) -> GadgetOutput:
    from .prep import build_prep
    g = build_prep(code, "ghz_block_d2")
    g.meta = dict(g.meta, variant="ghz_single_block")
    return g


def _offsets(codes: Sequence[IcebergCode]) -> List[int]:
    offs, acc = [], 0
    for c in codes:
        offs.append(acc)
        acc += c.n
    return offs


def _readout_instructions(codes: Sequence[IcebergCode], offs: Sequence[int],
                          anc: int, reg: str) -> List[Instruction]:
    tops = [offs[i] for i in range(len(codes))]
    bots = [offs[i] + codes[i].n - 1 for i in range(len(codes))]
    ins = [Instruction("PrepX", (anc,))]
    ins += [Instruction("CX", (anc, t)) for t in tops]
    ins += [Instruction("CX", (anc, b)) for b in reversed(bots)]
    ins.append(Instruction("MeasX", (anc,), register=reg))
    return ins


def _parity_readout(codes: Sequence[IcebergCode],
                    repetitions: int) -> GadgetOutput:
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    offs = _offsets(codes)
    n_data = offs[-1] + codes[-1].n
    ins: List[Instruction] = []
    labels = []
    for r in range(repetitions):
        lab = f"gx{r}"
        ins += _readout_instructions(codes, offs, n_data + r, lab)
        labels.append(lab)
    agree = tuple((labels[r], labels[r + 1]) for r in range(repetitions - 1))
    return GadgetOutput(
        circuit=Circuit(n_data + repetitions, ins),
        data_qubits=tuple(range(n_data)),
        registers={"ghz_parity": tuple(labels)},
        check_roles=(),
        parity_checks=agree,
        meta={"variant": "ghz_parity_readout", "repetitions": repetitions,
              "parity_labels": tuple(labels)},
    )


def _multi_block(codes: Sequence[IcebergCode],
                 repetitions: int) -> GadgetOutput:
    from .gate import build_gate
    from .prep import _build_tree, build_prep

    nb = len(codes)
    offs = _offsets(codes)
    n_data = offs[-1] + codes[-1].n
    prep_anc = [n_data + i for i in range(nb)]
    read_anc = [n_data + nb + r for r in range(repetitions)]
    total = n_data + nb + repetitions

    ins: List[Instruction] = []
    chk_labels = []
    for i, code in enumerate(codes):
        variant = "ghz_block_d2" if i == 0 else "two_branch_d2"
        prep = build_prep(code, variant)
        qmap = {q: offs[i] + q for q in range(code.n)}
        qmap[code.n] = prep_anc[i]
        lab = f"bchk{i}"
        ins += remap_instructions(prep.circuit.instructions, qmap,
                                  lambda _r, lab=lab: lab)
        chk_labels.append(lab)

    # balanced fan-out tree over blocks, seeded by the GHZ-carrying block 0
    if nb > 1:
        layers, _, _ = _build_tree(nb)
        for layer in layers:
            for src, dst in layer:
                fan = build_gate("fanout", [codes[src], codes[dst]], control=1)
                qmap = {q: offs[src] + q for q in range(codes[src].n)}
                qmap.update({codes[src].n + q: offs[dst] + q
                             for q in range(codes[dst].n)})
                ins += remap_instructions(fan.circuit.instructions, qmap)

    par_labels = []
    for r in range(repetitions):
        lab = f"gx{r}"
        ins += _readout_instructions(codes, offs, read_anc[r], lab)
        par_labels.append(lab)

    return GadgetOutput(
        circuit=Circuit(total, ins),
        data_qubits=tuple(range(n_data)),
        registers={"block_checks": tuple(chk_labels),
                   "ghz_parity": tuple(par_labels)},
        check_roles=("block_checks", "ghz_parity"),
        rus_roles=("block_checks",),
        meta={"variant": "ghz_multi_block", "block_sizes":
              tuple(c.k for c in codes), "offsets": tuple(offs),
              "repetitions": repetitions,
              "parity_labels": tuple(par_labels)},
    )


def _concat_d4(k2: int, k1: int, repetitions: int) -> GadgetOutput:
    from .distance4 import two_branch_d4
    from .prep import build_prep
    from .se import build_se

    code = ConcatIceberg(k2, k1)
    inner = IcebergCode(k1)
    n, n1, n2 = code.n, code.n1, code.n2
    base = two_branch_d4(code)
    base_total = base.circuit.num_qubits
    A = [base_total + x for x in range(n1)]    # inner-code ancilla block
    aux = base_total + n1                      # its preparation check ancilla
    total = base_total + n1 + 1

    ins: List[Instruction] = list(base.circuit.instructions)
    anc_prep = build_prep(inner, "ghz_block_d2")
    amap = {x: A[x] for x in range(n1)}
    amap[inner.n] = aux

    bell = base.circuit.num_qubits - 2   # the base prep's Bell-check legs
    inner_check = build_se(inner, "bell_edz_edx", basis="X")

    def row_check(y: int, syn: str, flg: str) -> List[Instruction]:
        qmap = {x: code.qubit_index(x, y) for x in range(n1)}
        qmap[inner.n] = bell
        qmap[inner.n + 1] = bell + 1
        return remap_instructions(inner_check.circuit.instructions, qmap,
                                  {"syn": syn, "flag": flg}.__getitem__)

    chk_labels: List[str] = []
    mid_labels: List[str] = []
    gp_labels: List[str] = []
    meas_groups: List[Tuple[str, ...]] = []
    for r in range(repetitions):
        chk = f"gchk{r}"
        ins += remap_instructions(anc_prep.circuit.instructions, amap,
                                  lambda _reg, chk=chk: chk)
        chk_labels.append(chk)
        # imprint the ancilla's top/bottom Bell stabilizer on the grid corners
        ins += [Instruction("CX", (A[x], code.qubit_index(x, 0)))
                for x in range(n1)]
        ins += [Instruction("CX", (A[x], code.qubit_index(x, n2 - 1)))
                for x in range(n1)]
        # non-destructive Bell X-parity readout through a bare ancilla: a
        # second, independent record of the payload, so a single flipped
        # readout bit is caught inside its own repetition
        gp = f"gp{r}"
        ins += [Instruction("PrepX", (aux,)),
                Instruction("CX", (aux, A[0])),
                Instruction("CX", (aux, A[n1 - 1])),
                Instruction("MeasX", (aux,), register=gp)]
        gp_labels.append(gp)
        # rotate the Bell X-parity onto ancilla qubit 0 and read out in Z,
        # so the ancilla's pairwise-Z stabilizers stay visible as checks
        ins.append(Instruction("CX", (A[0], A[n1 - 1])))
        ins.append(Instruction("H", (A[0],)))
        labels = tuple(f"gm{r}_{x}" for x in range(n1))
        ins += [Instruction("MeasZ", (A[x],), register=labels[x])
                for x in range(n1)]
        meas_groups.append(labels)
        if r < repetitions - 1:
            # X-type checks on the two coupled rows: Z residuals created in
            # this repetition's coupling are flagged before the next one, so
            # no single fault mimics a pair of parity measurement errors
            for tag, y in (("t", 0), ("b", n2 - 1)):
                syn, flg = f"mc{r}{tag}", f"mc{r}{tag}f"
                ins += row_check(y, syn, flg)
                mid_labels += [syn, flg]

    registers: Dict[str, Tuple[str, ...]] = dict(base.registers)
    registers["ghz_checks"] = tuple(chk_labels)
    registers["mid_checks"] = tuple(mid_labels)
    registers["ghz_meas"] = tuple(l for g in meas_groups for l in g)
    registers["ghz_parity_qnd"] = tuple(gp_labels)

    parity: List[Tuple[str, ...]] = list(base.parity_checks)
    payload = [g[0] for g in meas_groups]
    for r, g in enumerate(meas_groups):
        parity.append((g[-1],))                       # rotated Bell Z-parity
        parity += [(g[i], g[i + 1]) for i in range(1, n1 - 2)]  # inner chain
        parity.append((gp_labels[r], payload[r]))     # in-repetition agreement
    parity += [(payload[r], payload[r + 1])           # repetitions must agree
               for r in range(repetitions - 1)]

    return GadgetOutput(
        circuit=Circuit(total, ins),
        data_qubits=tuple(range(n)),
        registers=registers,
        check_roles=base.check_roles + ("ghz_checks", "mid_checks"),
        rus_roles=base.rus_roles,
        parity_checks=tuple(parity),
        frame=None,
        meta={"variant": "ghz_concat_d4", "k2": k2, "k1": k1,
              "repetitions": repetitions,
              "parity_labels": tuple(payload),
              "frame_fix": code.logical_z[0],
              "ancilla_qubits": tuple(A)},
    )
