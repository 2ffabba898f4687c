"""Monte-Carlo experiment harnesses built on the Pauli-frame sampler.

Each harness assembles a gadget circuit, samples register flips (and, where
needed, residual Pauli frames) with `FrameSampler`, applies the matching
acceptance rule and decoder, and returns an `ExperimentRecord` holding
aggregate-count rows plus estimator-ready aggregates.

Cycle benchmarking uses a residual-frame shortcut valid under stochastic
Pauli noise: instead of physically preparing and measuring eigenstates of
each sampled logical Pauli P, a shot "matches" when the accumulated
end-of-circuit Pauli frame commutes with an embedded representative of P.
On shots accepted by the terminal syndrome round the commutation parity is
representative-independent, and its expectation equals the same A_P f_P^L
decay the eigenstate protocol estimates.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..codes import ConcatIceberg, IcebergCode
from ..frame import FrameSampler
from ..noise import NoiseModel
from ..pauli import Circuit, Instruction, PauliString
from . import estimators as est

KINDS = ("spam", "memory", "ghz", "cb", "xy_mirror", "lookup_scaling")


# ---------------------------------------------------------------------------
# record plumbing
# ---------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    """Aggregate-count rows for one experiment plus derived statistics.

    rows holds one tuple per experimental condition (per cycle depth, error
    rate, ...), with counts only; aggregates are always recomputed from the
    rows by `aggregate`, so re-running aggregation is idempotent.
    """
    kind: str
    config: Dict[str, object]
    columns: Tuple[str, ...]
    rows: List[Tuple]
    aggregates: Dict[str, object] = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for key in sorted(self.config):
                fh.write(f"# {key}={self.config[key]}\n")
            fh.write(f"# kind={self.kind}\n")
            w = csv.writer(fh)
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow(row)

    def to_json(self, path=None) -> str:
        payload = {
            "kind": self.kind,
            "config": _jsonable(self.config),
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "aggregates": _jsonable(self.aggregates),
        }
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    def summary(self) -> str:
        lines = [f"{self.kind}: {len(self.rows)} condition(s)"]
        for key in sorted(self.aggregates):
            lines.append(f"  {key} = {_fmt(self.aggregates[key])}")
        return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return str(value)
    return str(value)


def _jsonable(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, PauliString):
        return value.to_label()
    return value


def noise_model(p: float, bias: str = "uniform") -> NoiseModel:
    if bias == "uniform":
        return NoiseModel.depolarizing(p)
    if bias == "zz":
        return NoiseModel.zz_biased(p)
    raise ValueError(f"unknown bias {bias!r} (use 'uniform' or 'zz')")


# ---------------------------------------------------------------------------
# shared sampling helpers
# ---------------------------------------------------------------------------

def _label_cols(circuit: Circuit, labels: Sequence[str]) -> List[int]:
    rm = circuit.register_map
    return [rm[lab] for lab in labels]


def _accept_mask(gadget, flips: np.ndarray) -> np.ndarray:
    """Vectorized accept predicate over a (shots, R) flip array."""
    ok = np.ones(flips.shape[0], dtype=bool)
    cols = list(gadget.role_slots(*gadget.check_roles))
    if cols:
        ok &= ~flips[:, cols].any(axis=1)
    rm = gadget.circuit.register_map
    for group in gadget.parity_checks:
        par = np.zeros(flips.shape[0], dtype=bool)
        for lab in group:
            par ^= flips[:, rm[lab]]
        ok &= ~par
    return ok


def _row_masks(rows: np.ndarray) -> List[int]:
    """Register-slot bitmask integers for each row of a bool array."""
    packed = np.packbits(rows, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def _pack_cols(bits: np.ndarray) -> np.ndarray:
    """(shots, m) bit array -> integer per shot (little-endian)."""
    out = np.zeros(bits.shape[0], dtype=np.int64)
    for i in range(bits.shape[1]):
        out |= bits[:, i].astype(np.int64) << i
    return out


def _mask_matrix(masks: Sequence[int], n: int) -> np.ndarray:
    return np.array([[(m >> q) & 1 for q in range(n)] for m in masks],
                    dtype=np.uint8)


def _anticommute_bits(ex: np.ndarray, ez: np.ndarray,
                      ops: Sequence[PauliString], n: int) -> np.ndarray:
    """(shots, len(ops)) symplectic products of residuals with operators."""
    opx = _mask_matrix([p.x for p in ops], n)
    opz = _mask_matrix([p.z for p in ops], n)
    return (ex.astype(np.uint8) @ opz.T + ez.astype(np.uint8) @ opx.T) % 2


# ---------------------------------------------------------------------------
# run_experiment dispatch
# ---------------------------------------------------------------------------

def run_experiment(kind: str, config: Optional[Mapping[str, object]] = None,
                   noise: Optional[NoiseModel] = None, shots: int = 1000,
                   seed: int = 0) -> ExperimentRecord:
    """Run one benchmarking experiment and return its record.

    kind selects the harness; config carries kind-specific options (see the
    individual harness functions); noise defaults to the trivial model.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown experiment kind {kind!r} (choose {KINDS})")
    if shots < 1:
        raise ValueError("shots must be positive")
    cfg = dict(config or {})
    nm = noise or NoiseModel()
    runner = {
        "spam": _run_spam,
        "memory": _run_memory,
        "ghz": _run_ghz,
        "cb": _run_cb,
        "xy_mirror": _run_xy_mirror,
        "lookup_scaling": _run_lookup_scaling,
    }[kind]
    columns, rows, extra_cfg = runner(cfg, nm, shots, seed)
    cfg.update(extra_cfg)
    cfg.setdefault("shots", shots)
    cfg.setdefault("seed", seed)
    cfg.setdefault("p_2q", nm.p_2q)
    record = ExperimentRecord(kind, cfg, columns, rows)
    record.aggregates = aggregate(kind, columns, rows)
    return record


# ---------------------------------------------------------------------------
# SPAM
# ---------------------------------------------------------------------------

def _spam_gadget(code: IcebergCode):
    """Encoded preparation chained into the destructive flagged readout."""
    from ..gadgets import build_prep, build_se, remap_instructions
    from ..gadgets.base import GadgetOutput
    prep = build_prep(code, "two_branch_d2")
    ro = build_se(code, "readout_d2")
    n = code.n
    width = max(prep.circuit.num_qubits, ro.circuit.num_qubits)
    ident = {q: q for q in range(width)}
    ins = list(prep.circuit.instructions)
    ins += remap_instructions(ro.circuit.instructions, ident)
    return GadgetOutput(
        circuit=Circuit(width, ins),
        data_qubits=tuple(range(n)),
        registers={"checks": prep.registers["checks"],
                   "flags": ro.registers["flags"],
                   "final-Z": ro.registers["final-Z"]},
        check_roles=("checks", "flags"),
        parity_checks=ro.parity_checks,
        meta={"variant": "spam_d2"},
    )


def _run_spam(cfg, nm, shots, seed):
    k = int(cfg.get("k", 4))
    code = IcebergCode(k)
    gadget = _spam_gadget(code)
    flips = FrameSampler(gadget.circuit, nm, seed=seed).sample(shots)
    ok = _accept_mask(gadget, flips)
    labels = gadget.registers["final-Z"]
    mcols = _label_cols(gadget.circuit, labels)
    bottom = mcols[code.n - 1]
    err = np.zeros(shots, dtype=bool)
    for j in range(1, k + 1):   # logical Z_j readout = m_j xor m_bottom
        err |= flips[:, mcols[j]] ^ flips[:, bottom]
    rows = [(shots, int(ok.sum()), int((ok & err).sum()))]
    return ("shots", "accepted", "errors"), rows, {"k": k}


# ---------------------------------------------------------------------------
# memory (distance-4 chain decoding and distance-2 post-selection)
# ---------------------------------------------------------------------------

def _cycles_list(cfg) -> List[int]:
    cycles = cfg.get("cycles", (1, 2, 4, 8))
    if isinstance(cycles, int):
        cycles = (cycles,)
    out = [int(c) for c in cycles]
    if not out or any(c < 1 for c in out):
        raise ValueError("cycles must be positive")
    return out


def _run_memory(cfg, nm, shots, seed):
    basis = str(cfg.get("basis", "Z"))
    cycles = _cycles_list(cfg)
    if "k" in cfg and "k1" not in cfg:
        code = IcebergCode(int(cfg["k"]))
        runner, extra = _memory_d2_counts, {"k": code.k, "distance": 2}
    else:
        code = ConcatIceberg(int(cfg.get("k2", 2)), int(cfg.get("k1", 2)))
        runner, extra = _memory_d4_counts, {
            "k2": code.k2, "k1": code.k1, "distance": 4}
    rows = []
    for i, c in enumerate(cycles):
        rows.append((c,) + runner(code, c, basis, nm, shots, seed + 7919 * i))
    extra["basis"] = basis
    extra["cycles"] = tuple(cycles)
    return ("cycles", "shots", "reruns", "accepted", "survivors"), rows, extra


def _memory_d4_counts(code, cycles, basis, nm, shots, seed):
    from ..ftverify import _ChainDecoder, build_memory_chain
    circuit = build_memory_chain(code, cycles, basis)
    decoder = _ChainDecoder(code, circuit, cycles, basis)
    flips = FrameSampler(circuit, nm, seed=seed).sample(shots)
    uniq, inverse = np.unique(flips, axis=0, return_inverse=True)
    verdicts = [decoder.decide(m) for m in _row_masks(uniq)]
    reruns = accepted = survivors = 0
    counts = np.bincount(inverse, minlength=len(uniq))
    for (verdict, readout), cnt in zip(verdicts, counts):
        if verdict == "rerun":
            reruns += cnt
        elif verdict == "accept":
            accepted += cnt
            if not any(readout):
                survivors += cnt
    return shots, int(reruns), int(accepted), int(survivors)


def _memory_d2_gadget(code: IcebergCode, cycles: int):
    """prep |0..0> logical, `cycles` two-basis QED rounds, flagged readout."""
    from ..gadgets import build_prep, build_se, remap_instructions
    from ..gadgets.base import GadgetOutput
    prep = build_prep(code, "two_branch_d2")
    ro = build_se(code, "readout_d2")
    n = code.n
    width = max(prep.circuit.num_qubits, ro.circuit.num_qubits)
    ins = list(prep.circuit.instructions)
    se_labels: List[str] = []
    for t in range(cycles):
        for b in ("Z", "X"):
            se = build_se(code, "ghz_ancilla_d2", basis=b)
            width = max(width, se.circuit.num_qubits)
            ident = {q: q for q in range(se.circuit.num_qubits)}
            pre = f"c{t}{b.lower()}_"
            ins += remap_instructions(se.circuit.instructions, ident,
                                      lambda r, pre=pre: pre + r)
            se_labels += [pre + lab for lab in
                          se.role_labels("syndrome", "flags")]
    ident = {q: q for q in range(ro.circuit.num_qubits)}
    ins += remap_instructions(ro.circuit.instructions, ident)
    return GadgetOutput(
        circuit=Circuit(width, ins),
        data_qubits=tuple(range(n)),
        registers={"checks": prep.registers["checks"],
                   "syndromes": tuple(se_labels),
                   "flags": ro.registers["flags"],
                   "final-Z": ro.registers["final-Z"]},
        check_roles=("checks", "syndromes", "flags"),
        parity_checks=ro.parity_checks,
        meta={"variant": "memory_d2", "cycles": cycles},
    )


def _memory_d2_counts(code, cycles, basis, nm, shots, seed):
    if basis != "Z":
        raise ValueError("the distance-2 memory harness reads out in Z")
    gadget = _memory_d2_gadget(code, cycles)
    flips = FrameSampler(gadget.circuit, nm, seed=seed).sample(shots)
    ok = _accept_mask(gadget, flips)
    mcols = _label_cols(gadget.circuit, gadget.registers["final-Z"])
    bottom = mcols[code.n - 1]
    err = np.zeros(shots, dtype=bool)
    for j in range(1, code.k + 1):
        err |= flips[:, mcols[j]] ^ flips[:, bottom]
    return shots, 0, int(ok.sum()), int((ok & ~err).sum())


# ---------------------------------------------------------------------------
# entangled-state preparation (distance-4 protocol)
# ---------------------------------------------------------------------------

def _ghz_volume_decoder(gadget, code: ConcatIceberg):
    """Correlated single-fault decoder over the full protocol volume.

    The decoded circuit is the preparation protocol followed by the
    destructive transversal Z-basis readout.  The detector pattern a real
    decoder can observe is every internal register flip plus the readout
    parities of the Z-type code stabilizers (deterministic bits); the
    target state's own Z-type stabilizers are the payload and are kept out
    of the pattern.  Enumerating all single faults maps each reachable
    pattern to the logical-parity correction its representative fault
    implies; patterns where two single faults disagree on that correction
    are ambiguous and decode as discards, as does every pattern outside
    the single-fault set.

    Returns (circuit, internal register slots, readout qubit slots,
    z-stabilizer supports, logical-parity supports, pattern table).
    """
    from ..faults import inject_faults
    from ..ftverify import ft_fault_sites
    n = code.n
    ins = list(gadget.circuit.instructions)
    ins += [Instruction("MeasZ", (q,), register=f"dz{q}") for q in range(n)]
    circuit = Circuit(gadget.circuit.num_qubits, ins)
    rm = circuit.register_map
    internal = [rm[lab] for lab in gadget.circuit.register_map]
    dz = [rm[f"dz{q}"] for q in range(n)]
    zstab_sup = [[q for q in range(n) if (s.z >> q) & 1]
                 for s in code.stabilizers if s.x == 0]
    zlog_sup = [[q for q in range(n) if (zz.z >> q) & 1]
                for zz in ((code.logical_z[i] * code.logical_z[i + 1])
                           .unsigned() for i in range(code.k - 1))]

    def split(mask: int) -> Tuple[int, int]:
        key = 0
        for i, s in enumerate(internal):
            key |= ((mask >> s) & 1) << i
        off = len(internal)
        for sup in zstab_sup:
            bit = 0
            for q in sup:
                bit ^= (mask >> dz[q]) & 1
            key |= bit << off
            off += 1
        log = 0
        for j, sup in enumerate(zlog_sup):
            bit = 0
            for q in sup:
                bit ^= (mask >> dz[q]) & 1
            log |= bit << j
        return key, log

    table: Dict[int, Optional[int]] = {0: 0}
    for f in ft_fault_sites(circuit):
        eff = inject_faults(circuit, (f,))
        key, log = split(eff.register_flips)
        if key not in table:
            table[key] = log
        elif table[key] is not None and table[key] != log:
            table[key] = None   # ambiguous: discard this pattern
    return circuit, internal, dz, zstab_sup, zlog_sup, table


def _run_ghz(cfg, nm, shots, seed):
    """Distance-4 entangled-state preparation with Z-basis verification.

    stabilizers_ok counts accepted shots whose corrected readout satisfies
    every Z-type stabilizer of the target state; the X-type generator is
    not observable in this basis and is not checked.  Any single fault is
    corrected; patterns needing two or more faults are discarded.
    """
    from ..gadgets import build_ghz
    kind = str(cfg.get("protocol", "concat_d4"))
    if kind != "concat_d4":
        raise ValueError("the sampling harness drives the concat_d4 protocol")
    k2, k1 = int(cfg.get("k2", 2)), int(cfg.get("k1", 2))
    code = ConcatIceberg(k2, k1)
    gadget = build_ghz(kind, k2=k2, k1=k1,
                       repetitions=int(cfg.get("repetitions", 2)))
    cache_key = "_volume_decoder"
    bundle = gadget.meta.get(cache_key)
    if bundle is None:
        bundle = _ghz_volume_decoder(gadget, code)
        gadget.meta[cache_key] = bundle
    circuit, internal, dz, zstab_sup, zlog_sup, table = bundle

    flips = FrameSampler(circuit, nm, seed=seed).sample(shots)
    dzf = flips[:, dz].astype(np.uint8)
    pattern_cols = [flips[:, internal].astype(np.uint8)]
    for sup in zstab_sup:
        pattern_cols.append(dzf[:, sup].sum(axis=1, keepdims=True) % 2)
    pattern = np.concatenate(pattern_cols, axis=1)
    zlog = np.zeros((shots, len(zlog_sup)), dtype=np.uint8)
    for j, sup in enumerate(zlog_sup):
        zlog[:, j] = dzf[:, sup].sum(axis=1) % 2

    uniq, inverse = np.unique(pattern, axis=0, return_inverse=True)
    accepted = good = 0
    for i, row in enumerate(uniq):
        key = 0
        for b, bit in enumerate(row):
            key |= int(bit) << b
        expect = table.get(key, None)
        if expect is None:
            continue
        sel = inverse == i
        accepted += int(sel.sum())
        exp_bits = np.array([(expect >> j) & 1
                             for j in range(len(zlog_sup))], dtype=np.uint8)
        good += int((zlog[sel] == exp_bits).all(axis=1).sum())
    rows = [(shots, accepted, good)]
    return (("shots", "accepted", "stabilizers_ok"), rows,
            {"protocol": kind, "k2": k2, "k1": k1, "basis": "Z"})


# ---------------------------------------------------------------------------
# logical cycle benchmarking
# ---------------------------------------------------------------------------

_CB_GATES = {
    # kind -> (block count, 2Q gates per cycle, default depths)
    "intra_uzz": (1, 2, (8, 16, 32, 64)),
    "inter_uzz": (2, 1, (8, 16, 32, 48)),
    "fanout": (2, 1, (8, 16, 32, 48)),
}


def _cb_cycle(gate: str, blocks: Sequence[IcebergCode]) -> List[Instruction]:
    from ..gadgets import build_gate
    if gate == "intra_uzz":
        code = blocks[0]
        ins = list(build_gate(gate, blocks, i=1, j=2).circuit.instructions)
        if code.k >= 4:
            ins += build_gate(gate, blocks, i=3, j=4).circuit.instructions
        return ins
    if gate == "fanout":
        return list(build_gate(gate, blocks, control=1).circuit.instructions)
    return list(build_gate(gate, blocks, i=1, j=1).circuit.instructions)


def _cb_circuit(gate: str, blocks: Sequence[IcebergCode], depth: int,
                se_period: int):
    """depth gate cycles with syndrome rounds every se_period cycles plus a
    terminal round; returns (circuit, SE register labels)."""
    from ..gadgets import build_se, remap_instructions
    offs, total = [], 0
    for b in blocks:
        offs.append(total)
        total += b.n
    n_data = total
    cycle = _cb_cycle(gate, blocks)
    ins: List[Instruction] = []
    se_labels: List[str] = []
    width = n_data

    def se_round(tag: str):
        nonlocal width
        out: List[Instruction] = []
        for bi, code in enumerate(blocks):
            for basis in ("Z", "X"):
                se = build_se(code, "ghz_ancilla_d2", basis=basis)
                n_anc = se.circuit.num_qubits - code.n
                width = max(width, n_data + n_anc)
                qmap = {q: offs[bi] + q for q in range(code.n)}
                qmap.update({code.n + i: n_data + i for i in range(n_anc)})
                pre = f"se{tag}b{bi}{basis.lower()}_"
                out += remap_instructions(se.circuit.instructions, qmap,
                                          lambda r, pre=pre: pre + r)
                se_labels.extend(pre + lab for lab in
                                 se.role_labels("syndrome", "flags"))
        return out

    rnd = 0
    for c in range(1, depth + 1):
        ins += cycle
        if c % se_period == 0 and c < depth:
            ins += se_round(str(rnd))
            rnd += 1
    ins += se_round("t")
    return Circuit(width, ins), tuple(se_labels), n_data


def _cb_paulis(k: int, count: int, seed: int) -> List[str]:
    """Uniformly sampled non-identity k-qubit Pauli labels."""
    if not 1 <= count < 4 ** k:
        raise ValueError("pauli count must lie in [1, 4^k - 1]")
    rng = np.random.default_rng(seed)
    out: List[str] = []
    seen = set()
    while len(out) < count:
        digits = rng.integers(0, 4, size=k)
        label = "".join("IXYZ"[d] for d in digits)
        if digits.any() and label not in seen:
            seen.add(label)
            out.append(label)
    return out


def _embed_pauli(label: str, blocks: Sequence[IcebergCode],
                 offs: Sequence[int], n_data: int) -> PauliString:
    acc = PauliString.identity(n_data)
    per_block = blocks[0].k
    for g, ch in enumerate(label):
        if ch == "I":
            continue
        bi = g // per_block
        j = g % per_block
        code = blocks[bi]
        emb = tuple(range(offs[bi], offs[bi] + code.n))
        if ch in "XY":
            acc = acc * code.logical_x[j].embedded(n_data, emb)
        if ch in "ZY":
            acc = acc * code.logical_z[j].embedded(n_data, emb)
    return acc.unsigned()


def _run_cb(cfg, nm, shots, seed):
    gate = str(cfg.get("gate", "intra_uzz"))
    if gate not in _CB_GATES:
        raise ValueError(f"unknown cb gate {gate!r} (choose {set(_CB_GATES)})")
    n_blocks, gates_per_cycle, default_depths = _CB_GATES[gate]
    depths = tuple(int(d) for d in cfg.get("depths", default_depths))
    if not depths or any(d < 1 for d in depths):
        raise ValueError("depths must be positive")
    se_period = int(cfg.get("se_period", 8))
    blocks = [IcebergCode(int(cfg.get("k", 4))) for _ in range(n_blocks)]
    offs = [i * blocks[0].n for i in range(n_blocks)]
    k_total = sum(b.k for b in blocks)
    paulis = _cb_paulis(k_total, int(cfg.get("paulis", 20)), seed + 17)
    embedded = {p: _embed_pauli(p, blocks, offs, blocks[0].n * n_blocks)
                for p in paulis}

    rows = []
    for di, depth in enumerate(depths):
        circuit, se_labels, n_data = _cb_circuit(gate, blocks, depth,
                                                 se_period)
        sampler = FrameSampler(circuit, nm, seed=seed + 104729 * di)
        flips, rx, rz = sampler.sample_with_residual(shots)
        cols = _label_cols(circuit, se_labels)
        ok = ~flips[:, cols].any(axis=1)
        accepted = int(ok.sum())
        ex = rx[ok][:, :n_data]
        ez = rz[ok][:, :n_data]
        anti = _anticommute_bits(ex, ez, [embedded[p] for p in paulis],
                                 n_data)
        for pi, p in enumerate(paulis):
            matches = accepted - int(anti[:, pi].sum())
            rows.append((p, depth, shots, accepted, matches))
    extra = {"gate": gate, "depths": depths, "se_period": se_period,
             "paulis": len(paulis), "gates_per_cycle": gates_per_cycle}
    return ("pauli", "depth", "shots", "accepted", "matches"), rows, extra


# ---------------------------------------------------------------------------
# XY-model mirror benchmarking
# ---------------------------------------------------------------------------

def _run_xy_mirror(cfg, nm, shots, seed):
    from ..gadgets import XYSpec, build_xy_mirror
    dims = tuple(int(d) for d in cfg.get("dims", (2, 2, 2)))
    theta = float(cfg.get("theta", math.pi / 8))
    steps_list = [int(s) for s in cfg.get("steps", (2, 4, 8))]
    encoding = str(cfg.get("encoding", "unencoded"))
    se_config = str(cfg.get("se_config",
                            "midpoint_se" if encoding == "iceberg"
                            else "none"))
    rows = []
    for si, steps in enumerate(steps_list):
        g = build_xy_mirror(XYSpec(dims, theta, steps), encoding=encoding,
                            se_config=se_config)
        flips = FrameSampler(g.circuit, nm, seed=seed + 31 * si).sample(shots)
        ok = _accept_mask(g, flips)
        fm_cols = _label_cols(g.circuit, g.registers["final-Z"])
        alive = np.ones(shots, dtype=bool)
        for sup in g.meta["readout_supports"]:
            bit = flips[:, fm_cols[sup[0]]]
            for q in sup[1:]:
                bit = bit ^ flips[:, fm_cols[q]]
            alive &= ~bit
        gates = steps * g.meta["rotations_per_step"]
        rows.append((steps, gates, shots, int(ok.sum()),
                     int((ok & alive).sum())))
    extra = {"dims": dims, "theta": theta, "steps": tuple(steps_list),
             "encoding": encoding, "se_config": se_config}
    return ("steps", "gates", "shots", "accepted", "survivors"), rows, extra


# ---------------------------------------------------------------------------
# lookup-decoder error-rate scaling
# ---------------------------------------------------------------------------

def _run_lookup_scaling(cfg, nm, shots, seed):
    from ..decoders import _min_weight_syndromes, lookup_build, lookup_decode
    from ..gadgets import build_prep
    k2, k1 = int(cfg.get("k2", 2)), int(cfg.get("k1", 2))
    grid = [float(p) for p in cfg.get("p_grid", (3e-4, 1e-3, 3e-3, 1e-2))]
    bias = str(cfg.get("bias", "uniform"))
    table_samples = int(cfg.get("table_samples", max(shots, 10000)))
    code = ConcatIceberg(k2, k1)
    gadget = build_prep(code, "two_branch_d4")
    n = code.n
    stab_x = _mask_matrix([s.x for s in code.stabilizers], n)
    stab_z = _mask_matrix([s.z for s in code.stabilizers], n)
    logz = _mask_matrix([p.z for p in code.logical_z], n)
    keep = (_ambiguous_w2_syndromes(code)
            - set(_min_weight_syndromes(code))
            - _single_fault_syndromes(gadget, code))

    rows = []
    ratios: List[Tuple[float, float]] = []   # (modal share, weight) per p
    for pi, p in enumerate(grid):
        noise = noise_model(p, bias)
        table = lookup_build(gadget, code, noise, table_samples,
                             seed=seed + 13 * pi)
        sampler = FrameSampler(gadget.circuit, noise, seed=seed + 13 * pi + 7)
        flips, rx, rz = sampler.sample_with_residual(shots)
        ok = _accept_mask(gadget, flips)
        flagged = shots - int(ok.sum())
        ex = rx[ok][:, :n].astype(np.uint8)
        ez = rz[ok][:, :n].astype(np.uint8)
        syn = (ex @ stab_z.T + ez @ stab_x.T) % 2
        cls = (ex @ logz.T) % 2
        s_int = _pack_cols(syn)
        c_int = _pack_cols(cls)
        post = accepted = errors = 0
        for s in np.unique(s_int):
            sel = s_int == s
            out = lookup_decode(table, code, int(s))
            if not out.accepted:
                post += int(sel.sum())
                continue
            accepted += int(sel.sum())
            corr_cls = 0
            for j, zbar in enumerate(code.logical_z):
                if bin(out.correction.x & zbar.z).count("1") % 2:
                    corr_cls |= 1 << j
            errors += int((c_int[sel] != corr_cls).sum())
        rows.append((p, shots, flagged, post, accepted, errors))
        ratios.append(_w2_confidence(table, keep))
    extra = {"k2": k2, "k1": k1, "p_grid": tuple(grid), "bias": bias,
             "table_samples": table_samples,
             "w2_confidence": tuple(ratios)}
    return (("p", "shots", "flagged", "post_discards", "accepted", "errors"),
            rows, extra)


def _single_fault_syndromes(gadget, code) -> set:
    """Static syndromes reachable by one unflagged circuit fault.

    A single two-qubit gate fault can leave a weight-2 data error that
    passes every check; its syndrome is reliably attributable to that one
    fault, so it does not belong to the two-independent-error set whose
    modal-class share the confidence-ratio statistic characterizes.
    """
    from ..faults import inject_faults
    from ..ftverify import ft_fault_sites
    out = set()
    for f in ft_fault_sites(gadget.circuit):
        eff = inject_faults(gadget.circuit, (f,))
        if not gadget.accepts_flip_mask(eff.register_flips):
            continue
        syn = 0
        for i, s in enumerate(code.stabilizers):
            bit = (bin(eff.residual_x & s.z).count("1")
                   + bin(eff.residual_z & s.x).count("1")) % 2
            syn |= bit << i
        out.add(syn)
    return out


def _ambiguous_w2_syndromes(code) -> set:
    """Syndromes whose weight-2 data-error explanations span more than one
    logical class.

    On small codes some two-fault syndromes have all their weight-2
    explanations in a single class (e.g. both errors inside one inner
    block, differing only by a stabilizer); a decoder could resolve those
    reliably, so the near-coin-flip confidence claim only concerns the
    syndromes that are ambiguous in principle.
    """
    from ..decoders import _pack_bits
    n = code.n
    classes: Dict[int, set] = {}
    for q1 in range(n):
        for q2 in range(q1 + 1, n):
            for k1 in "XYZ":
                for k2 in "XYZ":
                    e = (PauliString.single(n, q1, k1)
                         * PauliString.single(n, q2, k2)).unsigned()
                    s = _pack_bits(code.syndrome_of(e))
                    cls = 0
                    for j, zbar in enumerate(code.logical_z):
                        if bin(e.x & zbar.z).count("1") % 2:
                            cls |= 1 << j
                    classes.setdefault(s, set()).add(cls)
    return {s for s, c in classes.items() if len(c) > 1}


def _w2_confidence(table, keep, min_count: int = 50) -> Tuple[float, float]:
    """(weighted mean, max) modal-class share over the kept syndrome set:
    syndromes that need two or more independent faults and whose weight-2
    explanations are ambiguous between logical classes."""
    shares, weights = [], []
    for s, counts in table.entries.items():
        if s not in keep:
            continue
        total = sum(counts.values())
        if total < min_count:
            continue
        shares.append(max(counts.values()) / total)
        weights.append(total)
    if not shares:
        return (0.0, 0.0)
    mean = float(np.average(shares, weights=weights))
    return (mean, float(max(shares)))


# ---------------------------------------------------------------------------
# aggregation (pure in the rows)
# ---------------------------------------------------------------------------

def aggregate(kind: str, columns: Sequence[str],
              rows: Sequence[Tuple]) -> Dict[str, object]:
    """Derived statistics from aggregate-count rows; pure and idempotent."""
    col = {c: i for i, c in enumerate(columns)}

    def get(row, name):
        return row[col[name]]

    out: Dict[str, object] = {}
    if kind in ("spam", "ghz"):
        shots = sum(get(r, "shots") for r in rows)
        accepted = sum(get(r, "accepted") for r in rows)
        out["acceptance"] = accepted / shots
        out["acceptance_ci"] = est.wilson_interval(accepted, shots)
        if kind == "spam":
            errors = sum(get(r, "errors") for r in rows)
            if accepted:
                out["infidelity"] = errors / accepted
                out["infidelity_ci"] = est.wilson_interval(errors, accepted)
        else:
            good = sum(get(r, "stabilizers_ok") for r in rows)
            if accepted:
                out["fidelity"] = est.ghz_fidelity(
                    {"accepted": accepted, "stabilizers_ok": good},
                    mode="logical_single_shot")
    elif kind == "memory":
        surv, acc = {}, {}
        for r in rows:
            c = get(r, "cycles")
            kept = get(r, "shots") - get(r, "reruns")
            acc[c] = (get(r, "accepted"), kept)
            if get(r, "accepted"):
                surv[c] = (get(r, "survivors"), get(r, "accepted"))
        out["acceptance"] = {c: a / t for c, (a, t) in acc.items() if t}
        usable = {c: v for c, v in surv.items()}
        if len(usable) >= 2:
            out["survival_fit"] = est.fit_survival(usable, bootstrap=0)
        rej = {c: (t - a, t) for c, (a, t) in acc.items() if t and t > a}
        if len(rej) >= 2:
            # acceptance ~ (1 - r)^c: weighted log-linear fit
            cs = np.array(sorted(rej))
            ev = np.array([acc[c][1] - acc[c][0] for c in cs], dtype=float)
            tr = np.array([acc[c][1] for c in cs], dtype=float)
            a_rate = 1 - ev / tr
            w = tr * a_rate / np.clip(1 - a_rate, 1e-12, None)
            slope, _ = est._weighted_line(cs.astype(float), np.log(a_rate), w)
            out["rejection_per_cycle"] = 1 - math.exp(min(slope, 0.0))
    elif kind == "cb":
        counts: Dict[str, Dict[int, Tuple[int, int]]] = {}
        acc: Dict[int, Tuple[int, int]] = {}
        for r in rows:
            p, d = get(r, "pauli"), get(r, "depth")
            counts.setdefault(p, {})[d] = (get(r, "matches"),
                                           get(r, "accepted"))
            acc[d] = (get(r, "accepted"), get(r, "shots"))
        out["acceptance"] = {d: a / s for d, (a, s) in acc.items() if s}
        fits = {}
        for p, c in counts.items():
            if len([1 for _, (_, n) in c.items() if n]) >= 2:
                fits[p] = est.fit_decay_mle(c, bootstrap=0)
        if fits:
            out["pauli_fidelities"] = {p: f.fidelity for p, f in fits.items()}
            out["f_pro"] = float(np.mean([f.fidelity for f in fits.values()]))
    elif kind == "xy_mirror":
        acc, surv = {}, {}
        for r in rows:
            g, s = get(r, "gates"), get(r, "shots")
            acc[get(r, "steps")] = get(r, "accepted") / s if s else 0.0
            if get(r, "accepted"):
                surv[g] = (get(r, "survivors"), get(r, "accepted"))
        out["acceptance"] = acc
        out["survival"] = {g: a / t for g, (a, t) in surv.items()}
        if len(surv) >= 3:
            try:
                out["depol_fit"] = est.fit_depolarizing(surv)
            except ValueError:
                pass
    elif kind == "lookup_scaling":
        pf, pp, pl = {}, {}, {}
        for r in rows:
            p, s = get(r, "p"), get(r, "shots")
            unflagged = s - get(r, "flagged")
            pf[p] = (get(r, "flagged"), s)
            if unflagged:
                pp[p] = (get(r, "post_discards"), unflagged)
            if get(r, "accepted"):
                pl[p] = (get(r, "errors"), get(r, "accepted"))
        out["p_flag"] = {p: e / t for p, (e, t) in pf.items()}
        out["p_post"] = {p: e / t for p, (e, t) in pp.items()}
        out["p_l"] = {p: e / t for p, (e, t) in pl.items()}
        # flag/post rates reach deep saturation at the top of the grid;
        # fit their exponential intensity so the power law stays linear
        for name, pts, tf in (("flag_slope", pf, "intensity"),
                              ("post_slope", pp, "intensity"),
                              ("logical_slope", pl, "identity")):
            nz = {p: c for p, c in pts.items() if c[0] > 0}
            if len(nz) >= 3:
                import warnings
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    try:
                        out[name] = est.fit_powerlaw(
                            nz, bootstrap=0, transform=tf).slope
                    except ValueError:
                        pass
    return out
