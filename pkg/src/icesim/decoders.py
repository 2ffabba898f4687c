"""Classical decoders for the grid code and its building blocks.

Conventions used throughout:

* An error of type Z at grid cell (x, y) flips the destructive first-half
  block-readout bit for column x ("hx" register) and the row-y Bell check
  bit ("lx"); X errors do the same to the second-half registers ("hz",
  "lz").  Only *differences* of the destructive readout bits are
  deterministic (the bits themselves absorb the measured block's quantum
  randomness), so column information is always extracted from the bit
  vector relative to bit 0.
* The high-level static syndrome of a single column-x error of type Z is:
  all bits for x = 0, bit x alone for 0 < x < n1-1, no bits for x = n1-1
  (type X is the mirror image).  Low-level bits mark the rows touched an
  odd number of times.
* A full column of same-type errors is equivalent, modulo stabilizers, to
  the same string on any other column; column 0 is the canonical correction.
* A horizontal string and its within-row complement differ by the row
  stabilizer and are interchangeable as corrections.

Hook timing: the two cycle halves see each other's hook errors at different
delays.  An X-type hook (first-half ancilla fault, flagged by the hxf/lxf
registers) spreads X errors that the *same* cycle's second half observes in
full, so those flags are consumed within their own cycle.  A Z-type hook
(second-half fault, hzf/lzf) spreads Z errors that only the *next* cycle's
first half can see, so those coordinates are carried forward one cycle.
Carried state also records whether a cycle ended with an unresolved
internal fault (partial syndrome passed through uncorrected) so that a
second fault inside the same two-cycle window forces a discard rather than
a mis-correction.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import (Dict, Iterable, List, Mapping, Optional, Sequence, Tuple,
                    Union)

from .codes import ConcatIceberg, StabilizerCodeBase
from .pauli import PauliString

__all__ = [
    "Carried",
    "CoordInfo",
    "CycleRegisters",
    "DecodeOutcome",
    "LookupTable",
    "SideState",
    "compute_coords",
    "decode_cycle",
    "decode_d2",
    "decode_ghz_d4",
    "decode_memory_chain",
    "decode_noiseless",
    "lookup_build",
    "lookup_decode",
]


# ---------------------------------------------------------------------------
# outcome and register types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SideState:
    """Per-error-type state carried between consecutive cycles."""
    failures: bool = False            # previous cycle had an internal fault
    input_error_allowed: bool = True  # a data input error is still in budget


@dataclass(frozen=True)
class Carried:
    z: SideState = SideState()
    x: SideState = SideState()
    # coordinates flagged by the previous cycle's second half: Z-type line
    # errors that only become visible in this cycle's first half
    z_vhooks: Tuple[int, ...] = ()
    z_hhooks: Tuple[int, ...] = ()


@dataclass
class DecodeOutcome:
    accepted: bool
    correction: Optional[PauliString] = None
    carried: Optional[Carried] = None
    reason: str = ""
    info: Dict[str, object] = field(default_factory=dict)

    @staticmethod
    def accept(correction: PauliString,
               carried: Optional[Carried] = None,
               **info) -> "DecodeOutcome":
        return DecodeOutcome(True, correction, carried, info=dict(info))

    @staticmethod
    def discard(reason: str) -> "DecodeOutcome":
        return DecodeOutcome(False, reason=reason)


@dataclass(frozen=True)
class CycleRegisters:
    """One cycle's syndrome and flag registers (all from the same cycle).

    high_* are the raw destructive block-readout bit vectors (length n1);
    low_* are the per-row Bell check bits (length n2).  The flag vectors
    point at hook line errors: the first-half pair (high_x_flags,
    low_x_flags) marks X strings this cycle's own second half sees, the
    second-half pair (high_z_flags, low_z_flags) marks Z strings the next
    cycle must correct.
    """
    high_x: Tuple[int, ...]
    low_x: Tuple[int, ...]
    high_z: Tuple[int, ...]
    low_z: Tuple[int, ...]
    high_x_flags: Tuple[int, ...] = ()
    low_x_flags: Tuple[int, ...] = ()
    high_z_flags: Tuple[int, ...] = ()
    low_z_flags: Tuple[int, ...] = ()

    def validate(self, code: ConcatIceberg) -> None:
        n1, n2 = code.n1, code.n2
        sizes = {"high_x": n1, "high_z": n1, "low_x": n2, "low_z": n2,
                 "high_x_flags": n1, "high_z_flags": n1,
                 "low_x_flags": n2, "low_z_flags": n2}
        for name, want in sizes.items():
            got = getattr(self, name)
            if name.endswith("flags") and not got:
                continue  # empty means "no previous cycle"
            if len(got) != want:
                raise ValueError(f"{name} has {len(got)} bits, expected {want}")

    @staticmethod
    def from_records(code: ConcatIceberg, record: Mapping[str, int],
                     ) -> "CycleRegisters":
        """Build from the register naming of the d=4 cycle gadget."""
        n1, n2 = code.n1, code.n2

        def grab(name, count):
            return tuple(record[f"{name}{i}"] for i in range(count))

        return CycleRegisters(
            high_x=grab("hx", n1), low_x=grab("lx", n2),
            high_z=grab("hz", n1), low_z=grab("lz", n2),
            high_x_flags=grab("hxf", n1), low_x_flags=grab("lxf", n2),
            high_z_flags=grab("hzf", n1), low_z_flags=grab("lzf", n2),
        )


# ---------------------------------------------------------------------------
# static (noiseless) decoding
# ---------------------------------------------------------------------------

def _silent_column(code: ConcatIceberg, kind: str) -> int:
    """Column invisible to the high-level syndrome bits for this error type."""
    return code.n1 - 1 if kind == "Z" else 0


def _loud_column(code: ConcatIceberg, kind: str) -> int:
    """Column flipping every high-level syndrome bit for this error type."""
    return 0 if kind == "Z" else code.n1 - 1


def _static_signature(code: ConcatIceberg, x: int, kind: str,
                      ) -> Tuple[int, ...]:
    """High-level static syndrome bits of one type-`kind` error in column x."""
    mids = range(1, code.n1 - 1)
    if x == _loud_column(code, kind):
        return tuple(1 for _ in mids)
    return tuple(1 if x == i else 0 for i in mids)


def _cells_op(code: ConcatIceberg, kind: str,
              cells: Iterable[Tuple[int, int]]) -> PauliString:
    return PauliString.from_support(
        code.n, kind, [code.qubit_index(x, y) for x, y in cells])


def decode_noiseless(code: ConcatIceberg, high: Sequence[int],
                     low: Sequence[int], basis: str,
                     known_x: Optional[int] = None,
                     known_y: Optional[int] = None) -> DecodeOutcome:
    """Decode one error type from noiselessly extracted static syndromes.

    basis is the Pauli type being corrected ("Z": X-type stabilizer bits,
    "X": Z-type).  high holds the n1-2 high-level bits, low the n2 row
    bits.  With known_x (known_y) the syndrome is interpreted as a vertical
    (horizontal) string on that coordinate, which makes any row (column)
    pattern correctable; without coordinate knowledge only single cells and
    full columns are, and everything else is discarded.
    """
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    n1, n2 = code.n1, code.n2
    if len(high) != n1 - 2 or len(low) != n2:
        raise ValueError("syndrome length mismatch")
    high = tuple(int(b) for b in high)
    low = tuple(int(b) for b in low)
    ys = [y for y in range(n2) if low[y]]

    if known_x is not None:
        want = _static_signature(code, known_x, basis) if len(ys) % 2 \
            else (0,) * (n1 - 2)
        if high != want:
            return DecodeOutcome.discard(
                "column syndrome inconsistent with a known-column string")
        return DecodeOutcome.accept(
            _cells_op(code, basis, ((known_x, y) for y in ys)))

    if known_y is not None:
        if any(low[y] for y in range(n2) if y != known_y):
            return DecodeOutcome.discard(
                "row syndrome outside the known row")
        cols = {i for i in range(1, n1 - 1) if high[i - 1]}
        if high == tuple(1 for _ in range(n1 - 2)):
            # also explainable by the loud column alone; pick the lighter set
            alt = {_loud_column(code, basis)}
            if len(alt) % 2 == low[known_y]:
                cols = alt
        if len(cols) % 2 != low[known_y]:
            cols.add(_silent_column(code, basis))
        return DecodeOutcome.accept(
            _cells_op(code, basis, ((x, known_y) for x in cols)))

    if not any(high) and not ys:
        return DecodeOutcome.accept(PauliString.identity(code.n))
    if not any(high) and len(ys) == n2:
        # full-column string; all columns are equivalent, use column 0
        return DecodeOutcome.accept(
            _cells_op(code, basis, ((0, y) for y in range(n2))))
    hits = {i for i in range(1, n1 - 1) if high[i - 1]}
    if len(hits) == n1 - 2 and n1 > 3:
        xcand: Optional[int] = _loud_column(code, basis)
    elif len(hits) == 1:
        xcand = next(iter(hits))
    elif not hits:
        xcand = _silent_column(code, basis)
    else:
        return DecodeOutcome.discard("multiple x coordinates")
    if len(ys) == 1:
        return DecodeOutcome.accept(_cells_op(code, basis, ((xcand, ys[0]),)))
    if not ys:
        return DecodeOutcome.discard("column syndrome without row information")
    return DecodeOutcome.discard("multiple y coordinates")


# ---------------------------------------------------------------------------
# circuit-level helpers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoordInfo:
    """Distilled coordinate information for one error type of one cycle."""
    vertical_hooks: Tuple[int, ...]    # known x coordinates (block flags)
    horizontal_hooks: Tuple[int, ...]  # known y coordinates (row-check flags)
    column_diff: Tuple[int, ...]       # readout bit x XOR bit 0, x = 1..n1-1
    ys: Tuple[int, ...]                # rows with a set Bell-check bit


def _side_inputs(regs: CycleRegisters, side: str):
    if side == "Z":
        return (regs.high_x, regs.low_x, regs.high_z_flags, regs.low_z_flags)
    return (regs.high_z, regs.low_z, regs.high_x_flags, regs.low_x_flags)


def compute_coords(code: ConcatIceberg, regs: CycleRegisters,
                   side: str = "Z") -> CoordInfo:
    """Pure register-to-coordinates distillation for one error type.

    side "Z" pairs the first-half syndrome registers with the second-half
    flags (which record where type-Z line errors were created); side "X"
    is the mirror image.  Hook timing (which cycle's flags to pair with
    which syndromes) is the caller's responsibility.
    """
    if side not in ("Z", "X"):
        raise ValueError("side must be 'Z' or 'X'")
    regs.validate(code)
    high, low, vflags, hflags = _side_inputs(regs, side)
    d = tuple(high[x] ^ high[0] for x in range(1, code.n1))
    return CoordInfo(
        vertical_hooks=tuple(x for x, b in enumerate(vflags) if b),
        horizontal_hooks=tuple(y for y, b in enumerate(hflags) if b),
        column_diff=d,
        ys=tuple(y for y, b in enumerate(low) if b),
    )


def _column_candidate(d: Sequence[int], n1: int) -> Union[None, int, str]:
    """Single-column explanation of the readout differences.

    Returns None (no column parity change), a column index, or "multi".
    """
    hits = {x for x in range(1, n1) if d[x - 1]}
    if not hits:
        return None
    if len(hits) == 1:
        return next(iter(hits))
    if len(hits) == n1 - 1:
        return 0  # an error in column 0 moves the reference bit itself
    return "multi"


def _is_row_suffix(ys: Sequence[int], n2: int) -> bool:
    """True when ys is empty or a contiguous block ending at the last row,
    the only shapes a single flagged block fault can spread to."""
    if not ys:
        return True
    return set(ys) == set(range(min(ys), n2)) and max(ys) == n2 - 1


def _leg_groups(n1: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Columns covered by the two legs of a row Bell check."""
    return (tuple(range(0, n1, 2)), tuple(range(1, n1, 2)))


def _decode_side(code: ConcatIceberg, kind: str, high: Sequence[int],
                 low: Sequence[int], vhooks: Sequence[int],
                 hhooks: Sequence[int], state: SideState):
    """Decode one error type of one cycle.

    Returns (cells, SideState) on success or a DecodeOutcome discard.
    """
    n1, n2 = code.n1, code.n2
    d = [high[x] ^ high[0] for x in range(1, n1)]
    ys = [y for y in range(n2) if low[y]]

    if vhooks or hhooks:
        if state.failures:
            return DecodeOutcome.discard(
                "hook flag on top of an earlier internal fault")
        if vhooks:
            x_h = vhooks[0]
            if not _is_row_suffix(ys, n2):
                return DecodeOutcome.discard(
                    "flagged column string with impossible row pattern")
            want = [0] * (n1 - 1)
            if len(ys) % 2:
                if x_h == 0:
                    want = [1] * (n1 - 1)
                else:
                    want[x_h - 1] = 1
            if d != want:
                return DecodeOutcome.discard(
                    "another error in addition to the hook error")
            cells = {(x_h, y) for y in ys}
            return cells, SideState(False, True)
        y_h = hhooks[0]
        if any(low[y] for y in range(n2) if y != y_h):
            return DecodeOutcome.discard(
                "another error in addition to the hook error")
        cand_a = {x for x in range(1, n1) if d[x - 1]}
        cand_b = {0} | {x for x in range(1, n1) if not d[x - 1]}
        evens, odds = _leg_groups(n1)
        for cand in (cand_a, cand_b):
            if len(cand) % 2 != low[y_h]:
                continue
            if cand <= set(evens) or cand <= set(odds):
                return ({(x, y_h) for x in cand}, SideState(False, True))
        return DecodeOutcome.discard(
            "flagged row string with impossible column pattern")

    xc = _column_candidate(d, n1)
    if xc == "multi":
        return DecodeOutcome.discard("multiple x coordinates")
    if xc is None:
        if not ys:
            return set(), SideState(False, True)
        if len(ys) == n2:
            if not state.input_error_allowed:
                return DecodeOutcome.discard("input error outside budget")
            return ({(0, y) for y in range(n2)}, SideState(False, True))
        if len(ys) == 1:
            # row bit with no column information: either a check-measurement
            # error or an error arising after the block readout; let it pass
            if state.failures:
                return DecodeOutcome.discard(
                    "second consecutive internal fault")
            return set(), SideState(True, True)
        return DecodeOutcome.discard("multiple y coordinates")
    if len(ys) == 1:
        if not state.input_error_allowed:
            return DecodeOutcome.discard("input error outside budget")
        return ({(xc, ys[0])}, SideState(False, True))
    if not ys:
        # column information with no row: a readout-measurement error
        if state.failures:
            return DecodeOutcome.discard("second consecutive internal fault")
        return set(), SideState(True, True)
    return DecodeOutcome.discard("x coordinate with multiple y coordinates")


def decode_cycle(code: ConcatIceberg, regs: CycleRegisters,
                 carried: Optional[Carried] = None) -> DecodeOutcome:
    """Decode both error types of one cycle.

    Accept carries the correction for this cycle plus the state handed to
    the next cycle; Discard signals post-selection of the shot.
    """
    carried = carried or Carried()
    regs.validate(code)
    own = (sum(regs.high_x_flags) + sum(regs.low_x_flags) +
           sum(regs.high_z_flags) + sum(regs.low_z_flags))
    pending = len(carried.z_vhooks) + len(carried.z_hhooks)
    if own + pending >= 2:
        return DecodeOutcome.discard("multiple hook flags")

    out_z = _decode_side(code, "Z", regs.high_x, regs.low_x,
                         carried.z_vhooks, carried.z_hhooks, carried.z)
    if isinstance(out_z, DecodeOutcome):
        return out_z
    out_x = _decode_side(code, "X", regs.high_z, regs.low_z,
                         [x for x, b in enumerate(regs.high_x_flags) if b],
                         [y for y, b in enumerate(regs.low_x_flags) if b],
                         carried.x)
    if isinstance(out_x, DecodeOutcome):
        return out_x
    z_cells, z_state = out_z
    x_cells, x_state = out_x
    corr = (_cells_op(code, "Z", z_cells) *
            _cells_op(code, "X", x_cells)).unsigned()
    nxt = Carried(
        z=z_state, x=x_state,
        z_vhooks=tuple(x for x, b in enumerate(regs.high_z_flags) if b),
        z_hhooks=tuple(y for y, b in enumerate(regs.low_z_flags) if b))
    return DecodeOutcome.accept(corr, nxt)


# ---------------------------------------------------------------------------
# memory-experiment chaining
# ---------------------------------------------------------------------------

def _apply_frame(code: ConcatIceberg, regs: CycleRegisters,
                 frame: PauliString) -> CycleRegisters:
    """Cancel the expected register flips of already-corrected errors."""
    hx, lx = list(regs.high_x), list(regs.low_x)
    hz, lz = list(regs.high_z), list(regs.low_z)
    for q in range(code.n):
        x, y = code.coords(q)
        if (frame.z >> q) & 1:
            hx[x] ^= 1
            lx[y] ^= 1
        if (frame.x >> q) & 1:
            hz[x] ^= 1
            lz[y] ^= 1
    return CycleRegisters(tuple(hx), tuple(lx), tuple(hz), tuple(lz),
                          regs.high_x_flags, regs.low_x_flags,
                          regs.high_z_flags, regs.low_z_flags)


def _final_static(code: ConcatIceberg, bits: List[int], kind: str,
                  vhooks: Sequence[int], hhooks: Sequence[int],
                  ) -> DecodeOutcome:
    """Static decode of the transversal readout for `kind` errors."""
    n1, n2 = code.n1, code.n2
    if len(vhooks) + len(hhooks) >= 2:
        return DecodeOutcome.discard("multiple hook flags at readout")
    if kind == "X":   # Z-basis readout: X errors flip bits; Z stabilizers
        high = [sum(bits[code.qubit_index(x, y)]
                    for x in (i, n1 - 1) for y in range(n2)) % 2
                for i in range(1, n1 - 1)]
    else:             # X-basis readout, X stabilizers
        high = [sum(bits[code.qubit_index(x, y)]
                    for x in (0, i) for y in range(n2)) % 2
                for i in range(1, n1 - 1)]
    low = [sum(bits[q] for q in code.row_qubits(y)) % 2 for y in range(n2)]
    kx = vhooks[0] if vhooks else None
    ky = hhooks[0] if hhooks else None
    return decode_noiseless(code, high, low, kind, known_x=kx, known_y=ky)


def decode_memory_chain(code: ConcatIceberg,
                        cycles: Sequence[CycleRegisters],
                        final_bits: Sequence[int], basis: str = "Z",
                        ) -> Tuple[DecodeOutcome, Optional[Tuple[int, ...]]]:
    """Chain-decode a memory experiment and read out the logical qubits.

    cycles carry each cycle's registers (hook timing is resolved
    internally); final_bits is the destructive per-qubit transversal
    measurement in `basis`.  Returns the outcome plus the decoded logical
    bit tuple on acceptance.
    """
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    if len(final_bits) != code.n:
        raise ValueError("final measurement length mismatch")
    frame = PauliString.identity(code.n)
    carried = Carried()
    for regs in cycles:
        out = decode_cycle(code, _apply_frame(code, regs, frame), carried)
        if not out.accepted:
            return out, None
        frame = (frame * out.correction).unsigned()
        carried = out.carried

    bits = list(final_bits)
    flip_kind = "X" if basis == "Z" else "Z"  # error type visible in readout
    flip_mask = frame.x if basis == "Z" else frame.z
    for q in range(code.n):
        bits[q] ^= (flip_mask >> q) & 1
    # only second-half (Z-type) hooks can still be pending after the last
    # cycle; first-half hooks were resolved inside their own cycle
    if flip_kind == "Z":
        vh, hh = list(carried.z_vhooks), list(carried.z_hhooks)
    else:
        vh, hh = [], []
    fin = _final_static(code, bits, flip_kind, vh, hh)
    if not fin.accepted:
        return fin, None
    fmask = fin.correction.x if flip_kind == "X" else fin.correction.z
    for q in range(code.n):
        bits[q] ^= (fmask >> q) & 1
    logicals = code.logical_z if basis == "Z" else code.logical_x
    readout = tuple(
        sum(bits[q] for q in _support_bits(lop, basis)) % 2
        for lop in logicals)
    total = (frame * fin.correction).unsigned()
    return DecodeOutcome.accept(total, carried), readout


def _support_bits(p: PauliString, basis: str) -> List[int]:
    mask = p.z if basis == "Z" else p.x
    return [q for q in range(p.num_qubits) if (mask >> q) & 1]


# ---------------------------------------------------------------------------
# distance-2 post-selection
# ---------------------------------------------------------------------------

def decode_d2(gadget, record: Mapping[str, int]) -> DecodeOutcome:
    """Accept iff every checked register matches the noiseless reference and
    every declared parity combination holds; any deviation discards.

    The reference run includes any recorded preparation frame, so checks
    whose expected value the frame flips are compared against the flipped
    expectation automatically.
    """
    from .frame import reference_record
    ref = reference_record(gadget.circuit)
    flips = {lab: record[lab] ^ ref[lab] for lab in record}
    if gadget.accept_predicate(flips):
        n = len(gadget.data_qubits) or gadget.circuit.num_qubits
        return DecodeOutcome.accept(PauliString.identity(n))
    return DecodeOutcome.discard("nontrivial syndrome or flag")


# ---------------------------------------------------------------------------
# correlated single-fault compatibility decoding
# ---------------------------------------------------------------------------

def _compat_table(gadget, code: StabilizerCodeBase, target: str):
    """Map register-flip mask -> residual correction, over all single faults.

    Two residuals sharing a flip pattern are compatible when they differ by a
    harmless operator: an element of the target state's stabilizer group, or
    a syndrome-visible error that a later decoding round sees.  Patterns
    whose residuals disagree by a silent logical are marked ambiguous and
    decoded as Discard.
    """
    from .faults import inject_faults
    from .ftverify import _in_state_group, _state_group_masks, ft_fault_sites
    c = gadget.circuit
    xs, zs = _state_group_masks(code, target)

    def compatible(diff: PauliString) -> bool:
        # harmless: stabilizes the target state, or is syndrome-visible (a
        # later decoding round sees and corrects it) - never a silent logical
        if _in_state_group(diff, xs, zs, code.n):
            return True
        return any(code.syndrome_of(diff))

    table: Dict[int, Optional[PauliString]] = {}
    for f in ft_fault_sites(c):
        eff = inject_faults(c, (f,))
        res = eff.residual(c.num_qubits).restricted(gadget.data_qubits)
        key = eff.register_flips
        if key not in table:
            table[key] = res
        else:
            prev = table[key]
            if prev is None:
                continue
            if not compatible((prev * res).unsigned()):
                table[key] = None  # ambiguous pattern
    table[0] = PauliString.identity(code.n)
    return table


def decode_ghz_d4(gadget, code: StabilizerCodeBase,
                  flips: Union[int, Mapping[str, int]],
                  target: str = "ghz") -> DecodeOutcome:
    """Correlated decoder for the d=4 entangled-state protocol.

    Iterates (via a cached table) over every possible single fault and
    corrects whenever the observed register flips are compatible with one;
    any pattern outside the single-fault set - including repeated logical
    measurements that disagree - is discarded.
    """
    key = _flip_mask(gadget, flips)
    cache_key = "_compat_" + target
    table = gadget.meta.get(cache_key)
    if table is None:
        table = _compat_table(gadget, code, target)
        gadget.meta[cache_key] = table
    corr = table.get(key, "missing")
    if corr == "missing":
        return DecodeOutcome.discard(
            "register pattern outside the single-fault set")
    if corr is None:
        return DecodeOutcome.discard("ambiguous register pattern")
    return DecodeOutcome.accept(corr)


def _flip_mask(gadget, flips: Union[int, Mapping[str, int]]) -> int:
    if isinstance(flips, int):
        return flips
    rm = gadget.circuit.register_map
    mask = 0
    for lab, bit in flips.items():
        if bit:
            mask |= 1 << rm[lab]
    return mask


# ---------------------------------------------------------------------------
# sampled maximum-likelihood lookup decoding
# ---------------------------------------------------------------------------

@dataclass
class LookupTable:
    """Sampled syndrome statistics: syndrome -> logical-class counts.

    Classes are the k-bit pattern of logical readouts the residual flips on
    the prepared state (content that stabilizes the target is quotiented
    out).  Only observed syndromes have entries.
    """
    entries: Dict[int, Dict[int, int]]
    samples: int
    noise_p: float

    def total(self, syndrome: int) -> int:
        return sum(self.entries.get(syndrome, {}).values())

    def best(self, syndrome: int) -> Optional[Tuple[int, int]]:
        """(class, count) of the modal class; None on a tie."""
        counts = self.entries.get(syndrome)
        if not counts:
            return None
        top = max(counts.values())
        winners = [q for q, c in counts.items() if c == top]
        if len(winners) != 1:
            return None
        return winners[0], top

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["syndrome", "class", "count", "total"])
            for s in sorted(self.entries):
                tot = self.total(s)
                for q in sorted(self.entries[s]):
                    w.writerow([format(s, "x"), format(q, "x"),
                                self.entries[s][q], tot])

    @classmethod
    def from_csv(cls, path, samples: int = 0,
                 noise_p: float = 0.0) -> "LookupTable":
        entries: Dict[int, Dict[int, int]] = {}
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if header[:3] != ["syndrome", "class", "count"]:
                raise ValueError("unrecognized lookup CSV header")
            for row in r:
                s, q, cnt = int(row[0], 16), int(row[1], 16), int(row[2])
                entries.setdefault(s, {})[q] = cnt
        total = sum(cls.total(cls(entries, 0, 0.0), s) for s in entries)
        return cls(entries, samples or total, noise_p)


def _pack_bits(bits: Sequence[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def lookup_build(gadget, code: StabilizerCodeBase, noise, samples: int,
                 seed: int = 0, target: str = "zero") -> LookupTable:
    """Sample accepted shots of a preparation gadget and tally, for every
    observed static syndrome, how often each logical class caused it."""
    import numpy as np

    from .frame import FrameSampler
    sampler = FrameSampler(gadget.circuit, noise, seed=seed)
    flips, rx, rz = sampler.sample_with_residual(samples)

    ok = np.ones(samples, dtype=bool)
    slots = gadget.role_slots(*gadget.check_roles)
    if slots:
        ok &= ~flips[:, list(slots)].any(axis=1)
    rm = gadget.circuit.register_map
    for group in gadget.parity_checks:
        par = np.zeros(samples, dtype=bool)
        for lab in group:
            par ^= flips[:, rm[lab]]
        ok &= ~par

    data = list(gadget.data_qubits)
    ex = rx[:, data][ok]
    ez = rz[:, data][ok]
    n = code.n

    def mask_rows(masks):
        return np.array([[(m >> q) & 1 for q in range(n)] for m in masks],
                        dtype=np.uint8)

    stab_x = mask_rows([s.x for s in code.stabilizers])
    stab_z = mask_rows([s.z for s in code.stabilizers])
    syn = (ex.astype(np.uint8) @ stab_z.T + ez.astype(np.uint8) @ stab_x.T) % 2
    if target == "zero":
        log_masks = [p.z for p in code.logical_z]
        cls = (ex.astype(np.uint8) @ mask_rows(log_masks).T) % 2
    else:
        raise ValueError(f"unsupported lookup target {target!r}")

    s_int = syn.astype(object) @ (1 << np.arange(syn.shape[1], dtype=object))
    q_int = cls.astype(object) @ (1 << np.arange(cls.shape[1], dtype=object))
    entries: Dict[int, Dict[int, int]] = {}
    for s, q in zip(s_int, q_int):
        entries.setdefault(int(s), {})[int(q)] = \
            entries.setdefault(int(s), {}).get(int(q), 0) + 1
    return LookupTable(entries, samples, noise_p=getattr(noise, "p_2q", 0.0))


def _min_weight_syndromes(code: StabilizerCodeBase) -> Dict[int, int]:
    """Syndrome -> minimum error weight over weight-0/1 errors."""
    out = {0: 0}
    for q in range(code.n):
        for kind in "XYZ":
            s = _pack_bits(code.syndrome_of(
                PauliString.single(code.n, q, kind)))
            if s not in out:
                out[s] = 1
    return out


def lookup_decode(table: LookupTable, code: StabilizerCodeBase,
                  syndrome: Union[int, Sequence[int]]) -> DecodeOutcome:
    """Maximum-likelihood decode of a static syndrome against the table.

    Accepts only syndromes whose minimum-weight explanation is a single
    qubit (or none); heavier syndromes, unseen syndromes, and modal-class
    ties all discard.  The reported confidence is the modal class's share
    of the syndrome's samples.
    """
    s = syndrome if isinstance(syndrome, int) else _pack_bits(syndrome)
    light = _min_weight_syndromes(code)
    if s not in light:
        return DecodeOutcome.discard("weight-two-or-higher syndrome")
    if s not in table.entries:
        return DecodeOutcome.discard("unknown syndrome")
    best = table.best(s)
    if best is None:
        return DecodeOutcome.discard("ambiguous class tie")
    qmax, count = best
    rep = _class_representative(code, s, qmax)
    return DecodeOutcome.accept(rep, confidence=count / table.total(s))


def _class_representative(code: StabilizerCodeBase, syndrome: int,
                          cls: int) -> PauliString:
    """A Pauli with the given static syndrome whose flipped-logical-Z
    pattern equals cls."""
    base = PauliString.identity(code.n)
    if syndrome:
        for q in range(code.n):
            for kind in "XYZ":
                e = PauliString.single(code.n, q, kind)
                if _pack_bits(code.syndrome_of(e)) == syndrome:
                    base = e
                    break
            if base.weight:
                break
    have = 0
    for j, zbar in enumerate(code.logical_z):
        if bin(base.x & zbar.z).count("1") % 2:
            have |= 1 << j
    diff = have ^ cls
    for j in range(code.k):
        if (diff >> j) & 1:
            base = (base * code.logical_x[j]).unsigned()
    return base
