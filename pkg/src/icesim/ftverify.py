"""Exhaustive fault enumeration and fault-tolerance certification.

Every check here is a pure, deterministic enumeration: all elementary faults
(order 1) or all unordered fault pairs (order 2) are injected, their
register flips and residual data errors computed, and the gadget-specific
acceptance criterion evaluated.  A report lists every violating fault set;
an empty list is the certificate.

Criteria implemented:

* distance-2 preparations: a fault that does not trip the accept predicate
  must leave a residual that is either in the prepared state's stabilizer
  group (acts trivially) or carries a nontrivial code syndrome (caught by any
  later round of error detection).  The only forbidden outcome is a silent
  logical error.
* distance-2 syndrome extraction: same, with the code stabilizer group as
  the harmless set (the data state is an arbitrary codeword).
* destructive readout: an accepted fault must leave every logical readout
  parity unflipped.
* distance-4 preparation: accepted single faults leave residuals of
  generalized weight <= 1, accepted pairs <= 2, both measured against the
  prepared state (logical operators that stabilize the target count as
  trivial).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .codes import GenWeight, StabilizerCodeBase
from .faults import Fault, FaultEffect, fault_sites, inject_faults
from .gadgets.base import GadgetOutput
from .gf2 import echelon, in_span
from .pauli import Circuit, GATE_1Q, PauliString


def ft_fault_sites(c: Circuit) -> List[Fault]:
    """Adversarial fault locations: the standard sites plus every single-qubit
    Pauli after every single-qubit gate."""
    out = fault_sites(c)
    n = c.num_qubits
    for idx, ins in enumerate(c.instructions):
        if ins.kind in GATE_1Q:
            q = ins.targets[0]
            for kind in "XYZ":
                out.append(Fault(idx, PauliString.single(n, q, kind)))
    out.sort(key=lambda f: f.loc)
    return out


def enumerate_faults(c: Circuit, order: int,
                     sites: Optional[Sequence[Fault]] = None,
                     ) -> Iterator[Tuple[Fault, ...]]:
    """All fault sets of the given order (1 or 2) over the site census."""
    if order not in (1, 2):
        raise ValueError("only orders 1 and 2 are supported")
    if sites is None:
        sites = ft_fault_sites(c)
    if order == 1:
        for f in sites:
            yield (f,)
    else:
        for pair in itertools.combinations(sites, 2):
            yield pair


@dataclass
class Counterexample:
    faults: Tuple[Fault, ...]
    effect: FaultEffect
    detail: str = ""

    def to_json(self, c: Circuit) -> Dict[str, object]:
        return {
            "faults": [f.describe(c) for f in self.faults],
            "flipped_registers": list(self.effect.flipped_labels(c)),
            "residual": self.effect.residual(c.num_qubits).to_label(),
            "detail": self.detail,
        }


@dataclass
class FTReport:
    gadget_id: str
    prop: str
    locations: int
    counterexamples: List[Counterexample] = field(default_factory=list)
    circuit: Optional[Circuit] = None
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> str:
        body = {
            "gadget": self.gadget_id,
            "property": self.prop,
            "locations": self.locations,
            "passed": self.passed,
            "counterexamples": [
                ce.to_json(self.circuit) for ce in self.counterexamples
            ],
        }
        if self.circuit is not None:
            body["circuit"] = self.circuit.to_text()
        return json.dumps(body, indent=2, sort_keys=True)


def _data_residual(effect: FaultEffect, gadget: GadgetOutput,
                   n_code: int) -> PauliString:
    """Residual restricted to the data qubits, re-indexed onto the code."""
    full = effect.residual(gadget.circuit.num_qubits)
    return full.restricted(gadget.data_qubits) if gadget.data_qubits else \
        PauliString.identity(n_code)


def _state_group_masks(code: StabilizerCodeBase, target: str,
                       ) -> Tuple[List[int], List[int]]:
    """(x-masks, z-masks) generating the target state's stabilizer group."""
    xs = [p.x for p in code.stabilizers if p.x]
    zs = [p.z for p in code.stabilizers if p.z]
    if target == "zero":
        zs += [p.z for p in code.logical_z]
    elif target == "ghz":
        allx = 0
        for p in code.logical_x:
            allx ^= p.x
        xs.append(allx)
        for a, b in zip(code.logical_z, code.logical_z[1:]):
            zs.append(a.z ^ b.z)
    elif target == "codeword":
        pass  # arbitrary codeword: only the code stabilizers are harmless
    else:
        raise ValueError(f"unknown target {target!r}")
    return xs, zs


def _in_state_group(residual: PauliString, xs: Sequence[int],
                    zs: Sequence[int], n: int) -> bool:
    gens = [m for m in xs] + [m << n for m in zs]
    return in_span(echelon(gens), residual.x | (residual.z << n))


def check_prep_ft(gadget: GadgetOutput, code: StabilizerCodeBase,
                  distance: int, target: str = "zero") -> FTReport:
    """Certify a preparation gadget against its distance's FT contract."""
    c = gadget.circuit
    sites = ft_fault_sites(c)
    name = gadget.meta.get("variant", "prep")
    if distance == 2:
        rep = FTReport(f"{name}", "d2-prep-single-fault", len(sites), circuit=c)
        xs, zs = _state_group_masks(code, target)
        for f in sites:
            eff = inject_faults(c, (f,))
            if not gadget.accepts_flip_mask(eff.register_flips):
                continue  # fired: re-run / discard
            res = _data_residual(eff, gadget, code.n)
            if gadget.frame is not None:
                pass  # frame is pure relabeling; flips are frame-independent
            if any(code.syndrome_of(res)):
                continue  # detectable by any later error-detection round
            if _in_state_group(res, xs, zs, code.n):
                continue  # acts trivially on the prepared state
            rep.counterexamples.append(Counterexample(
                (f,), eff, "silent logical error on prepared state"))
        return rep
    if distance == 4:
        return _check_prep_d4(gadget, code, target)
    raise ValueError("distance must be 2 or 4")


def _d4_extras(code, target: str) -> Tuple[List[int], List[int]]:
    """Extra per-basis quotient masks: logicals stabilizing the target."""
    if target == "zero":
        return [], [p.z for p in code.logical_z]
    if target == "ghz":
        allx = 0
        for p in code.logical_x:
            allx ^= p.x
        return [allx], [a.z ^ b.z for a, b in
                        zip(code.logical_z, code.logical_z[1:])]
    return [], []


def _check_prep_d4(gadget: GadgetOutput, code, target: str) -> FTReport:
    c = gadget.circuit
    sites = ft_fault_sites(c)
    name = gadget.meta.get("variant", "prep")
    rep = FTReport(f"{name}", "d4-prep-weight-bounds", len(sites), circuit=c)
    extra_x, extra_z = _d4_extras(code, target)
    singles = [(f, inject_faults(c, (f,))) for f in sites]

    def residual_ok(res: PauliString, bound: GenWeight) -> bool:
        # a residual is tolerable when, per basis, it is a generalized-weight
        # <= bound line string or a plain error of that many qubits
        cls = code.classify_error(res, extra_x=extra_x, extra_z=extra_z)
        for part, supp in ((cls.x_part, res.x), (cls.z_part, res.z)):
            if part.weight > bound and bin(supp).count("1") > int(bound):
                return False
        return True

    for f, eff in singles:
        if not gadget.accepts_flip_mask(eff.register_flips):
            continue
        res = _data_residual(eff, gadget, code.n)
        if not residual_ok(res, GenWeight.ONE):
            rep.counterexamples.append(Counterexample(
                (f,), eff, "accepted single fault with weight > 1"))
    for (f1, e1), (f2, e2) in itertools.combinations(singles, 2):
        eff = e1.xor(e2)
        if not gadget.accepts_flip_mask(eff.register_flips):
            continue
        res = _data_residual(eff, gadget, code.n)
        if not residual_ok(res, GenWeight.TWO):
            rep.counterexamples.append(Counterexample(
                (f1, f2), eff, "accepted fault pair with weight > 2"))
    return rep


def check_se_ft(gadget: GadgetOutput, code: StabilizerCodeBase) -> FTReport:
    """Single faults in a non-destructive SE gadget must fire the accept
    predicate, be detectable by the code later, or act trivially."""
    c = gadget.circuit
    sites = ft_fault_sites(c)
    name = gadget.meta.get("variant", "se")
    rep = FTReport(f"{name}", "d2-se-single-fault", len(sites), circuit=c)
    xs, zs = _state_group_masks(code, "codeword")
    for f in sites:
        eff = inject_faults(c, (f,))
        if not gadget.accepts_flip_mask(eff.register_flips):
            continue
        res = _data_residual(eff, gadget, code.n)
        if any(code.syndrome_of(res)):
            continue
        if _in_state_group(res, xs, zs, code.n):
            continue
        rep.counterexamples.append(Counterexample(
            (f,), eff, "silent logical error on codeword"))
    return rep


def build_memory_chain(code, cycles: int = 2, basis: str = "Z",
                       cycle_gadget=None):
    """Chain `cycles` correction cycles and a destructive transversal
    readout into one circuit; registers are prefixed c{t}_ per cycle."""
    from .gadgets import build_se, remap_instructions
    from .pauli import Instruction
    cyc = cycle_gadget or build_se(code, "qec_cycle_d4")
    n_all = cyc.circuit.num_qubits
    ident = {q: q for q in range(n_all)}
    ins: List = []
    for t in range(cycles):
        ins += remap_instructions(cyc.circuit.instructions, ident,
                                  lambda r, t=t: f"c{t}_{r}")
    meas = "MeasZ" if basis == "Z" else "MeasX"
    for q in range(code.n):
        ins.append(Instruction(meas, (q,), register=f"m{q}"))
    return Circuit(n_all, ins)


class _ChainDecoder:
    """Decode a chained-memory register-flip mask; results cached by mask."""

    def __init__(self, code, circuit: Circuit, cycles: int, basis: str):
        from .decoders import CycleRegisters  # local import: no cycle at load
        self.code = code
        self.cycles = cycles
        self.basis = basis
        self._CycleRegisters = CycleRegisters
        rm = circuit.register_map
        n1, n2 = code.n1, code.n2
        self._slots = []
        for t in range(cycles):
            p = f"c{t}_"
            self._slots.append({
                name: tuple(rm[f"{p}{name}{i}"] for i in range(count))
                for name, count in (("hx", n1), ("lx", n2), ("hz", n1),
                                    ("lz", n2), ("hxf", n1), ("lxf", n2),
                                    ("hzf", n1), ("lzf", n2))})
            self._slots[-1]["pchk"] = tuple(
                rm[f"{p}pchk{i}"] for i in range(2))
        self._m_slots = tuple(rm[f"m{q}"] for q in range(code.n))
        self._cache: Dict[int, Tuple[str, Tuple[int, ...]]] = {}

    def decide(self, mask: int) -> Tuple[str, Tuple[int, ...]]:
        """("rerun"|"discard"|"accept", logical flip bits)."""
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        from .decoders import decode_memory_chain
        bits = lambda slots: tuple((mask >> s) & 1 for s in slots)
        verdict: Tuple[str, Tuple[int, ...]]
        if any(bits(sl["pchk"]) != (0, 0) for sl in self._slots):
            verdict = ("rerun", ())
        else:
            regs = [self._CycleRegisters(
                high_x=bits(sl["hx"]), low_x=bits(sl["lx"]),
                high_z=bits(sl["hz"]), low_z=bits(sl["lz"]),
                high_x_flags=bits(sl["hxf"]), low_x_flags=bits(sl["lxf"]),
                high_z_flags=bits(sl["hzf"]), low_z_flags=bits(sl["lzf"]))
                for sl in self._slots]
            out, readout = decode_memory_chain(
                self.code, regs, bits(self._m_slots), self.basis)
            if not out.accepted:
                verdict = ("discard", ())
            else:
                verdict = ("accept", readout)
        self._cache[mask] = verdict
        return verdict


def _gw1_inputs(code) -> List[PauliString]:
    """Every generalized-weight-<=1 input error (plus the identity)."""
    out = [PauliString.identity(code.n)]
    for q in range(code.n):
        for kind in "XYZ":
            out.append(PauliString.single(code.n, q, kind))
    for kind in "XZ":
        for x in range(code.n1):
            out.append(PauliString.from_support(
                code.n, kind, code.column_qubits(x)))
    return out


def _line_inputs(code) -> List[PauliString]:
    """All single-type errors supported on one row or one column."""
    out = []
    for kind in "XZ":
        for x in range(code.n1):
            cells = code.column_qubits(x)
            for r in range(1, 1 << len(cells)):
                sup = [c for i, c in enumerate(cells) if (r >> i) & 1]
                out.append(PauliString.from_support(code.n, kind, sup))
        for y in range(code.n2):
            cells = code.row_qubits(y)
            for r in range(1, 1 << len(cells)):
                sup = [c for i, c in enumerate(cells) if (r >> i) & 1]
                out.append(PauliString.from_support(code.n, kind, sup))
    return out


def check_qec_props(code, cycles: int = 2, pair_stride: int = 1,
                    cycle_gadget=None) -> FTReport:
    """Certify the correction-cycle propositions on a chained memory run.

    1. Static: a noiseless cycle corrects every generalized-weight-<=1
       input exactly and halts on every heavier line error.
    2. Distance-3 window, one error: a clean-input run with one internal
       fault, or a fault-free run with a generalized-weight-<=1 input
       error, never halts and always reads out correctly (re-runs of the
       ancilla preparation excepted).
    3. Distance-3/4 window, two errors: any input error combined with one
       internal fault, and any internal fault pair with clean input, may
       halt but never yields an accepted shot with a flipped logical
       readout.

    Both readout bases are checked (each is blind to same-type residuals).
    pair_stride > 1 subsamples the first element of the pair sweep;
    cycle_gadget substitutes a (possibly mutated) correction-cycle gadget.
    """
    from .decoders import CycleRegisters, decode_cycle

    n1, n2 = code.n1, code.n2
    rep = FTReport("qec_cycle_d4", "qec-propositions", 0)

    # ---- item 1: static single-cycle behaviour ------------------------
    def static_regs(e: PauliString) -> CycleRegisters:
        hx, lx = [0] * n1, [0] * n2
        hz, lz = [0] * n1, [0] * n2
        for q in range(code.n):
            x, y = code.coords(q)
            if (e.z >> q) & 1:
                hx[x] ^= 1
                lx[y] ^= 1
            if (e.x >> q) & 1:
                hz[x] ^= 1
                lz[y] ^= 1
        z4 = (0,) * n1
        return CycleRegisters(tuple(hx), tuple(lx), tuple(hz), tuple(lz),
                              z4, (0,) * n2, z4, (0,) * n2)

    for e in _gw1_inputs(code):
        out = decode_cycle(code, static_regs(e))
        res = (e * out.correction).unsigned() if out.accepted else None
        if res is None or not code.in_stabilizer_group(res):
            rep.counterexamples.append(Counterexample(
                (), FaultEffect(e.x, e.z, 0),
                f"weight-<=1 input not corrected: {e.to_label()}"))
    for e in _line_inputs(code):
        cls = code.classify_error(e)
        out = decode_cycle(code, static_regs(e))
        if cls.overall <= GenWeight.ONE:
            ok = out.accepted and code.in_stabilizer_group(
                (e * out.correction).unsigned())
        else:
            ok = not out.accepted
        if not ok:
            rep.counterexamples.append(Counterexample(
                (), FaultEffect(e.x, e.z, 0),
                f"line input mishandled: {e.to_label()} ({cls.overall.name})"))

    # ---- chained-memory sweeps ---------------------------------------
    for basis in ("Z", "X"):
        chain = build_memory_chain(code, cycles, basis, cycle_gadget)
        dec = _ChainDecoder(code, chain, cycles, basis)
        sites = ft_fault_sites(chain)
        rep.locations += len(sites)
        # verdicts depend on the register-flip mask only: deduplicate
        by_mask: Dict[int, Fault] = {}
        for f in sites:
            m = inject_faults(chain, (f,)).register_flips
            by_mask.setdefault(m, f)
        masks = sorted(by_mask)

        inputs = [(e, inject_faults(chain, (Fault(0, e),)).register_flips)
                  for e in _gw1_inputs(code)]

        def flag(faults, mask, detail):
            rep.counterexamples.append(Counterexample(
                tuple(faults), FaultEffect(0, 0, mask), detail))

        # one error total: must accept with a correct readout
        for e, im in inputs:
            verdict, readout = dec.decide(im)
            if verdict != "rerun" and (verdict == "discard" or any(readout)):
                flag([Fault(0, e)], im,
                     f"single input ({basis}): "
                     + ("halt" if verdict == "discard" else "logical flip"))
        for m in masks:
            verdict, readout = dec.decide(m)
            if verdict != "rerun" and (verdict == "discard" or any(readout)):
                flag([by_mask[m]], m,
                     f"single fault ({basis}): "
                     + ("halt" if verdict == "discard" else "logical flip"))

        # two errors total: accepting with a flipped readout is forbidden
        for e, im in inputs:
            for m in masks:
                verdict, readout = dec.decide(im ^ m)
                if verdict == "accept" and any(readout):
                    flag([Fault(0, e), by_mask[m]], im ^ m,
                         f"input+fault ({basis}): accepted logical flip")
        for i in range(0, len(masks), pair_stride):
            for j in range(i + 1, len(masks)):
                m = masks[i] ^ masks[j]
                verdict, readout = dec.decide(m)
                if verdict == "accept" and any(readout):
                    flag([by_mask[masks[i]], by_mask[masks[j]]], m,
                         f"fault pair ({basis}): accepted logical flip")
    return rep


def _wrap_gate_with_se(gadget: GadgetOutput) -> Circuit:
    """Gate gadget followed by a full syndrome-extraction round per block
    (both stabilizer types), sharing one reused ancilla register."""
    from .gadgets import build_se, remap_instructions
    blocks = gadget.meta["blocks"]
    offsets = gadget.meta["offsets"]
    n_data = gadget.circuit.num_qubits
    anc = 4
    total = n_data + anc
    ins = list(gadget.circuit.instructions)
    for bi, (code, off) in enumerate(zip(blocks, offsets)):
        for basis in ("Z", "X"):
            se = build_se(code, "ghz_ancilla_d2", basis=basis,
                          ancilla_size=anc)
            qmap = {q: off + q for q in range(code.n)}
            for a in range(anc):
                qmap[code.n + a] = n_data + a
            ins += remap_instructions(
                se.circuit.instructions, qmap,
                lambda r, bi=bi, basis=basis: f"b{bi}{basis}_{r}")
    return Circuit(total, ins)


def check_gate_ft(gadget: GadgetOutput) -> FTReport:
    """Exhaustive single-fault census of a logical-gate gadget followed by a
    syndrome-extraction round on every block.

    A fault is *detected* when it flips any syndrome or flag register, and
    *harmless* when its data residual restricts to a stabilizer on every
    block.  Remaining faults are undetected logical errors; the report's
    counterexamples hold those outside the gadget's declared partial-FT
    allowance (the same-type two-qubit component of the spanning rotation,
    whose residual equals the gadget's own logical action, and the
    single-rotation two-qubit components of an intra-block rotation).  The
    full undetected census is exposed in extra["undetected"].
    """
    blocks = gadget.meta["blocks"]
    offsets = gadget.meta["offsets"]
    variant = gadget.meta["variant"]
    c = _wrap_gate_with_se(gadget)
    n_gate = len(gadget.circuit.instructions)
    sites = [f for f in ft_fault_sites(gadget.circuit)]
    rep = FTReport(variant, "gate-single-fault", len(sites), circuit=c)

    rot_loc = gadget.meta.get("rotation_loc")
    allowed: set = set()
    if variant in ("inter_uzz", "inter_uxx"):
        allowed = {(rot_loc, "ZZ" if variant == "inter_uzz" else "XX")}
    elif variant in ("intra_uzz", "intra_uxx"):
        allowed = {(rot_loc, p) for p in ("XX", "YY", "ZZ")}

    def fault_key(f: Fault):
        ins = gadget.circuit.instructions[f.loc]
        label = "".join(f.pauli.kind_at(q) for q in ins.targets)
        return (f.loc, label)

    undetected: List[Tuple[int, str]] = []
    for f in sites:
        eff = inject_faults(c, (f,))
        if eff.register_flips:
            continue  # caught by the following syndrome extraction
        res = eff.residual(c.num_qubits)
        harmless = all(
            code.in_stabilizer_group(
                res.restricted(tuple(range(off, off + code.n))))
            for code, off in zip(blocks, offsets))
        if harmless:
            continue
        key = fault_key(f)
        undetected.append(key)
        if key not in allowed:
            rep.counterexamples.append(Counterexample(
                (f,), eff, f"undetected logical fault {key}"))
    rep.extra["undetected"] = tuple(sorted(set(undetected)))
    return rep


def check_readout_ft(gadget: GadgetOutput, code: StabilizerCodeBase) -> FTReport:
    """Accepted single faults must leave every logical readout parity intact."""
    c = gadget.circuit
    sites = ft_fault_sites(c)
    rep = FTReport("readout_d2", "readout-single-fault", len(sites), circuit=c)
    rm = c.register_map
    labels = gadget.registers["final-Z"]
    k_plus_1 = code.k + 1
    pair_slots = [(rm[labels[j]], rm[labels[k_plus_1]])
                  for j in range(1, code.k + 1)]
    for f in sites:
        eff = inject_faults(c, (f,))
        if not gadget.accepts_flip_mask(eff.register_flips):
            continue
        for a, b in pair_slots:
            if ((eff.register_flips >> a) ^ (eff.register_flips >> b)) & 1:
                rep.counterexamples.append(Counterexample(
                    (f,), eff, "accepted fault flips a logical readout"))
                break
    return rep
