"""Small GF(2) linear algebra on bit-packed integer vectors."""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple


def echelon(vectors: Iterable[int]) -> List[int]:
    """Row-reduce to a basis in echelon form (decreasing leading bits)."""
    basis: List[int] = []
    for v in vectors:
        v = reduce(basis, v)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def reduce(basis: Sequence[int], v: int) -> int:
    """Reduce v against an echelon basis; 0 iff v lies in the span."""
    for b in basis:
        if v ^ b < v:
            v ^= b
    return v


def in_span(basis: Sequence[int], v: int) -> bool:
    return reduce(basis, v) == 0


def solve_combination(gens: Sequence[int], target: int) -> Optional[int]:
    """Bitmask over gens whose XOR equals target, or None if unsolvable."""
    rows: List[Tuple[int, int]] = []  # (vector, combo bitmask)
    for i, g in enumerate(gens):
        v, c = g, 1 << i
        for bv, bc in rows:
            if v ^ bv < v:
                v ^= bv
                c ^= bc
        if v:
            rows.append((v, c))
            rows.sort(reverse=True)
    v, c = target, 0
    for bv, bc in rows:
        if v ^ bv < v:
            v ^= bv
            c ^= bc
    return c if v == 0 else None


def subspace_within(gens: Sequence[int], mask: int) -> List[int]:
    """Basis of {v in span(gens) : v & ~mask == 0}.

    Gaussian elimination pivoting on the coordinates outside mask; rows whose
    outside part vanishes after elimination span the wanted subspace.
    """
    rows = list(gens)
    inside: List[int] = []
    while True:
        best = None
        for r in rows:
            out = r & ~mask
            if out and (best is None or out > best & ~mask):
                best = r
        if best is None:
            break
        rows.remove(best)
        pb = 1 << ((best & ~mask).bit_length() - 1)
        rows = [r ^ best if r & pb else r for r in rows]
    for r in rows:
        if r & ~mask == 0:
            inside.append(r)
    return echelon(inside)
