"""Code constructors and queries: single blocks and two-level grid codes.

A single block on n = k+2 qubits has two global stabilizers (all-X and all-Z)
and logical pairs Xbar^j = X_0 X_j, Zbar^j = Z_j Z_{k+1}.  The two-level code
arranges n1*n2 qubits on a grid; each row is a low-level block, and column
pairs anchored at column 0 (X type) or column n1-1 (Z type) form the
high-level stabilizers.  Logical operators are 4-corner rectangles.

Grid convention (used by every gadget and decoder): a qubit is addressed as
(x, y) with x in [0, n1) the position within a row and y in [0, n2) the row
index; flat index = y*n1 + x.

Syndrome bit ordering (stable across runs, serialized as documented here):
high-level X-type (i = 1..n1-2), high-level Z-type (i = 1..n1-2), low-level
X-type (y = 0..n2-1), low-level Z-type (y = 0..n2-1).  X-type means the
generator is a product of X operators (it detects Z errors).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import gf2
from .pauli import PauliString, pauli_commutes


class NotInNormalizer(Exception):
    """The operator anticommutes with a stabilizer (nonzero syndrome)."""


# ---------------------------------------------------------------------------
# generalized-weight classification types
# ---------------------------------------------------------------------------

class GenWeight(enum.IntEnum):
    TRIVIAL = 0
    ONE = 1
    TWO = 2
    HEAVIER = 3


@dataclass(frozen=True)
class LineInfo:
    """One line factor of a minimal decomposition."""
    orientation: str          # "col" or "row"
    coordinate: int
    cells: Tuple[Tuple[int, int], ...]
    cost: int                 # 1 = coordinate known / full column, 2 = unknown


@dataclass(frozen=True)
class PartClass:
    weight: GenWeight
    lines: Tuple[LineInfo, ...] = ()


@dataclass(frozen=True)
class ErrorClass:
    x_part: PartClass
    z_part: PartClass

    @property
    def overall(self) -> GenWeight:
        return max(self.x_part.weight, self.z_part.weight)


@dataclass(frozen=True)
class KnownCoords:
    """Coordinate knowledge supplied by flag information."""
    xs: FrozenSet[int] = frozenset()
    ys: FrozenSet[int] = frozenset()


# ---------------------------------------------------------------------------
# code base
# ---------------------------------------------------------------------------

class StabilizerCodeBase:
    n: int
    k: int
    stabilizers: Tuple[PauliString, ...]
    logical_x: Tuple[PauliString, ...]
    logical_z: Tuple[PauliString, ...]

    def _self_check(self) -> None:
        stabs = self.stabilizers
        for i, a in enumerate(stabs):
            for b in stabs[i + 1:]:
                if not pauli_commutes(a, b):
                    raise AssertionError("stabilizers do not commute")
        for p in self.logical_x + self.logical_z:
            for s in stabs:
                if not pauli_commutes(p, s):
                    raise AssertionError("logical anticommutes with stabilizer")
        for i, xi in enumerate(self.logical_x):
            for j, zj in enumerate(self.logical_z):
                want = (i != j)
                if pauli_commutes(xi, zj) != want:
                    raise AssertionError("logical pairing not symplectic")

    # -- queries ------------------------------------------------------------
    def syndrome_of(self, e: PauliString) -> Tuple[int, ...]:
        if e.num_qubits != self.n:
            raise ValueError("operator size mismatch")
        return tuple(0 if pauli_commutes(e, s) else 1 for s in self.stabilizers)

    def _symplectic_basis(self) -> List[int]:
        # stabilizers as 2n-bit vectors (x part low, z part high)
        return gf2.echelon(s.x | (s.z << self.n) for s in self.stabilizers)

    def in_stabilizer_group(self, e: PauliString) -> bool:
        """Unsigned membership of e in the stabilizer group."""
        if e.num_qubits != self.n:
            raise ValueError("operator size mismatch")
        return gf2.in_span(self._symplectic_basis(), e.x | (e.z << self.n))

    def logical_action(self, e: PauliString) -> PauliString:
        """Logical Pauli (over k qubits, unsigned) of a normalizer element."""
        if any(self.syndrome_of(e)):
            raise NotInNormalizer(e.to_label())
        x = z = 0
        for j, zbar in enumerate(self.logical_z):
            if not pauli_commutes(e, zbar):
                x |= 1 << j
        for j, xbar in enumerate(self.logical_x):
            if not pauli_commutes(e, xbar):
                z |= 1 << j
        return PauliString(self.k, x, z)

    def stabilizer_text(self) -> str:
        return "\n".join(s.to_label() for s in self.stabilizers) + "\n"


# ---------------------------------------------------------------------------
# single block
# ---------------------------------------------------------------------------

class IcebergCode(StabilizerCodeBase):
    def __init__(self, k: int):
        if k < 2 or k % 2:
            raise ValueError("k must be even and >= 2")
        self.k = k
        self.n = k + 2
        n = self.n
        self.stabilizers = (
            PauliString.from_support(n, "X", range(n)),
            PauliString.from_support(n, "Z", range(n)),
        )
        self.logical_x = tuple(PauliString.from_support(n, "X", (0, j))
                               for j in range(1, k + 1))
        self.logical_z = tuple(PauliString.from_support(n, "Z", (j, k + 1))
                               for j in range(1, k + 1))
        self._self_check()


def build_iceberg(k: int) -> IcebergCode:
    return IcebergCode(k)


# ---------------------------------------------------------------------------
# two-level grid code
# ---------------------------------------------------------------------------

class ConcatIceberg(StabilizerCodeBase):
    def __init__(self, k2: int, k1: int):
        for k in (k1, k2):
            if k < 2 or k % 2:
                raise ValueError("k1, k2 must be even and >= 2")
        self.k1, self.k2 = k1, k2
        self.n1, self.n2 = k1 + 2, k2 + 2
        n1, n2 = self.n1, self.n2
        self.n = n1 * n2
        self.k = k1 * k2
        n = self.n

        def cells(pairs: Iterable[Tuple[int, int]]) -> List[int]:
            return [self.qubit_index(x, y) for x, y in pairs]

        self.high_x = tuple(
            PauliString.from_support(
                n, "X", cells((0, y) for y in range(n2)) +
                cells((i, y) for y in range(n2)))
            for i in range(1, n1 - 1))
        self.high_z = tuple(
            PauliString.from_support(
                n, "Z", cells((i, y) for y in range(n2)) +
                cells((n1 - 1, y) for y in range(n2)))
            for i in range(1, n1 - 1))
        self.low_x = tuple(
            PauliString.from_support(n, "X", cells((x, y) for x in range(n1)))
            for y in range(n2))
        self.low_z = tuple(
            PauliString.from_support(n, "Z", cells((x, y) for x in range(n1)))
            for y in range(n2))
        self.stabilizers = self.high_x + self.high_z + self.low_x + self.low_z

        lx, lz = [], []
        for j in range(1, k2 + 1):
            for i in range(1, k1 + 1):
                lx.append(PauliString.from_support(
                    n, "X", cells([(0, 0), (i, 0), (0, j), (i, j)])))
                lz.append(PauliString.from_support(
                    n, "Z", cells([(i, j), (n1 - 1, j),
                                   (i, n2 - 1), (n1 - 1, n2 - 1)])))
        self.logical_x = tuple(lx)
        self.logical_z = tuple(lz)
        self._self_check()

        # support masks used by the generalized-weight classifier
        self._x_group = [p.x for p in self.high_x + self.low_x]
        self._z_group = [p.z for p in self.high_z + self.low_z]

    # -- grid addressing ----------------------------------------------------
    def qubit_index(self, x: int, y: int) -> int:
        if not (0 <= x < self.n1 and 0 <= y < self.n2):
            raise ValueError(f"grid coordinate ({x},{y}) out of range")
        return y * self.n1 + x

    def coords(self, q: int) -> Tuple[int, int]:
        return q % self.n1, q // self.n1

    def logical_index(self, i: int, j: int) -> int:
        """Logical slot of the (i, j) rectangle pair, i in 1..k1, j in 1..k2."""
        if not (1 <= i <= self.k1 and 1 <= j <= self.k2):
            raise ValueError("logical coordinate out of range")
        return (j - 1) * self.k1 + (i - 1)

    def row_qubits(self, y: int) -> Tuple[int, ...]:
        return tuple(self.qubit_index(x, y) for x in range(self.n1))

    def column_qubits(self, x: int) -> Tuple[int, ...]:
        return tuple(self.qubit_index(x, y) for y in range(self.n2))

    def column_mask(self, x: int) -> int:
        m = 0
        for q in self.column_qubits(x):
            m |= 1 << q
        return m

    def row_mask(self, y: int) -> int:
        m = 0
        for q in self.row_qubits(y):
            m |= 1 << q
        return m

    # -- generalized weight --------------------------------------------------
    def classify_error(self, e: PauliString,
                       known: Optional[KnownCoords] = None,
                       extra_x: Sequence[int] = (),
                       extra_z: Sequence[int] = ()) -> ErrorClass:
        """Generalized weight of e, optionally modulo extra support masks.

        extra_x / extra_z extend the per-basis quotient group; passing the
        target state's logical supports classifies errors by their action on
        that state rather than on the whole codespace.
        """
        if e.num_qubits != self.n:
            raise ValueError("operator size mismatch")
        known = known or KnownCoords()
        return ErrorClass(
            x_part=self._classify_part(e.x, self._x_group + list(extra_x),
                                       known),
            z_part=self._classify_part(e.z, self._z_group + list(extra_z),
                                       known),
        )

    def _line_masks(self) -> List[Tuple[str, int, int]]:
        out = [("col", x, self.column_mask(x)) for x in range(self.n1)]
        out += [("row", y, self.row_mask(y)) for y in range(self.n2)]
        return out

    def _line_cost(self, orientation: str, coord: int, cells: int,
                   known: KnownCoords) -> int:
        if orientation == "col":
            if cells == self.column_mask(coord) or coord in known.xs:
                return 1
            return 2
        return 1 if coord in known.ys else 2

    def _split_cells(self, mask: int) -> Tuple[Tuple[int, int], ...]:
        return tuple(self.coords(q) for q in range(self.n)
                     if (mask >> q) & 1)

    def _classify_part(self, support: int, group: Sequence[int],
                       known: KnownCoords) -> PartClass:
        if gf2.in_span(gf2.echelon(group), support):
            return PartClass(GenWeight.TRIVIAL)
        lines = self._line_masks()
        best_cost = 99
        best_lines: Tuple[LineInfo, ...] = ()

        def consider(cost: int, infos: Tuple[LineInfo, ...]) -> None:
            nonlocal best_cost, best_lines
            if cost < best_cost:
                best_cost, best_lines = cost, infos

        # candidate line sets of size 1 and 2 (any cost<=2 decomposition
        # uses at most two lines)
        sets: List[Tuple[Tuple[str, int, int], ...]] = [(l,) for l in lines]
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                sets.append((lines[i], lines[j]))
        for line_set in sets:
            union = 0
            for _, _, m in line_set:
                union |= m
            combo = gf2.solve_combination([g & ~union for g in group],
                                          support & ~union)
            if combo is None:
                continue
            g = 0
            for idx in range(len(group)):
                if (combo >> idx) & 1:
                    g ^= group[idx]
            r0 = support ^ g
            inner = gf2.subspace_within(list(group), union)
            if len(inner) > 12:
                raise RuntimeError("classification subgroup too large")
            for variant in range(1 << len(inner)):
                r = r0
                for b in range(len(inner)):
                    if (variant >> b) & 1:
                        r ^= inner[b]
                self._score_residual(r, line_set, known, consider)
        weight = (GenWeight.ONE if best_cost == 1 else
                  GenWeight.TWO if best_cost == 2 else GenWeight.HEAVIER)
        return PartClass(weight, best_lines)

    def _score_residual(self, r: int, line_set, known: KnownCoords,
                        consider) -> None:
        if r == 0:
            return  # handled by the trivial check (group membership)
        if bin(r).count("1") == 1:
            x, y = self._split_cells(r)[0]
            consider(1, (LineInfo("col", x, self._split_cells(r), 1),))
            return
        if len(line_set) == 1:
            o, c, m = line_set[0]
            if r & ~m:
                return
            cost = self._line_cost(o, c, r, known)
            consider(cost, (LineInfo(o, c, self._split_cells(r), cost),))
            return
        (o1, c1, m1), (o2, c2, m2) = line_set
        if r & ~(m1 | m2):
            return
        shared = m1 & m2 & r
        # a cell on both lines may belong to either factor
        for assign in range(2 if shared else 1):
            l1 = (r & m1 & ~m2) | (shared if assign == 0 else 0)
            l2 = (r & m2 & ~m1) | (shared if assign == 1 else 0)
            infos = []
            cost = 0
            ok = True
            for (o, c), l in (((o1, c1), l1), ((o2, c2), l2)):
                if l == 0:
                    continue
                # inside a product each factor must be cost 1 on its own
                # merits (full column or flagged coordinate); lone cells get
                # no special treatment here, so e.g. two single errors on
                # distinct rows and columns stay heavier than weight two
                if self._line_cost(o, c, l, known) != 1:
                    ok = False
                    break
                cost += 1
                infos.append(LineInfo(o, c, self._split_cells(l), 1))
            if ok and infos:
                consider(cost, tuple(infos))


def build_concat(k2: int, k1: int) -> ConcatIceberg:
    return ConcatIceberg(k2, k1)
