import itertools
import random

import numpy as np
import pytest

from icesim.codes import (ConcatIceberg, ErrorClass, GenWeight, IcebergCode,
                          KnownCoords, NotInNormalizer, build_concat,
                          build_iceberg)
from icesim.pauli import PauliString


def sym_commutes(ax, az, bx, bz):
    """Independent symplectic oracle on numpy bool support vectors."""
    return (int(np.sum(ax & bz)) + int(np.sum(az & bx))) % 2 == 0


def to_vecs(p: PauliString):
    n = p.num_qubits
    x = np.array([(p.x >> q) & 1 for q in range(n)], dtype=bool)
    z = np.array([(p.z >> q) & 1 for q in range(n)], dtype=bool)
    return x, z


class TestIceberg:
    def test_small_generators(self):
        c = build_iceberg(2)
        assert c.n == 4 and c.k == 2
        assert c.logical_x[0].to_label() == "+XXII"
        assert c.logical_z[0].to_label() == "+IZIZ"
        assert c.stabilizers[0].to_label() == "+XXXX"
        assert c.stabilizers[1].to_label() == "+ZZZZ"

    def test_stabilizer_product_is_all_y_support(self):
        c = build_iceberg(2)
        prod = c.stabilizers[0] * c.stabilizers[1]
        assert all(prod.kind_at(q) == "Y" for q in range(4))
        for p in c.logical_x + c.logical_z:
            assert prod.commutes(p)

    def test_invalid_k(self):
        for k in (0, 1, 3, -2):
            with pytest.raises(ValueError):
                build_iceberg(k)

    def test_large_block_commutation_table(self):
        c = build_iceberg(48)
        assert c.n == 50
        logs = c.logical_x + c.logical_z
        vecs = [to_vecs(p) for p in logs]
        for i in range(len(logs)):
            for j in range(i, len(logs)):
                oracle = sym_commutes(*vecs[i], *vecs[j])
                assert logs[i].commutes(logs[j]) == oracle
                # the only anticommuting pairs are matched X/Z partners
                expected = not (j == i + 48)
                assert oracle == expected

    def test_distance_two(self):
        c = build_iceberg(2)
        found = []
        for q1 in range(4):
            for q2 in range(4):
                for k1 in "XYZ":
                    for k2 in "XYZ":
                        p = PauliString.single(4, q1, k1) * PauliString.single(4, q2, k2)
                        p = p.unsigned()
                        if p.weight == 0:
                            continue
                        if any(c.syndrome_of(p)):
                            continue
                        if not c.in_stabilizer_group(p):
                            found.append(p)
        assert found  # weight-2 logicals exist ...
        assert all(f.weight == 2 for f in found)  # ... and nothing lighter
        for q in range(4):
            for kk in "XYZ":
                p = PauliString.single(4, q, kk)
                assert any(c.syndrome_of(p))


class TestConcatConstruction:
    def test_parameters(self):
        c = build_concat(2, 2)
        assert (c.n, c.k) == (16, 4)
        assert len(c.stabilizers) == 12
        c2 = build_concat(8, 6)
        assert (c2.n, c2.k) == (80, 48)
        assert len(c2.stabilizers) == c2.n - c2.k

    def test_grid_round_trip(self):
        c = build_concat(4, 2)
        for q in range(c.n):
            x, y = c.coords(q)
            assert c.qubit_index(x, y) == q

    def test_rectangles_commute_with_stabilizers(self):
        c = build_concat(2, 2)
        for p in c.logical_x + c.logical_z:
            assert p.weight == 4
            for s in c.stabilizers:
                assert p.commutes(s)

    def test_distance_four_exhaustive(self):
        c = build_concat(2, 2)
        n = c.n
        for w in (1, 2, 3):
            for qubits in itertools.combinations(range(n), w):
                for kinds in itertools.product("XYZ", repeat=w):
                    p = PauliString.identity(n)
                    for q, kk in zip(qubits, kinds):
                        p = (p * PauliString.single(n, q, kk)).unsigned()
                    if any(c.syndrome_of(p)):
                        continue
                    assert c.in_stabilizer_group(p), p.to_label()

    def test_min_stabilizer_weight(self):
        # group elements mix X and Z parts; each part is itself a group
        # element of its basis, so per-basis enumeration bounds the minimum
        for (k2, k1), want in (((2, 2), 4), ((8, 6), 8)):
            c = build_concat(k2, k1)
            assert want == min(c.n1, 2 * c.n2)
            for gens in ([p.x for p in c.high_x + c.low_x],
                         [p.z for p in c.high_z + c.low_z]):
                best = c.n + 1
                for combo in range(1, 1 << len(gens)):
                    v = 0
                    m = combo
                    while m:
                        i = (m & -m).bit_length() - 1
                        v ^= gens[i]
                        m &= m - 1
                    if v:
                        best = min(best, bin(v).count("1"))
                assert best == want

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            build_concat(2, 3)
        with pytest.raises(ValueError):
            build_concat(0, 2)


class TestSyndrome:
    def test_identity_trivial(self):
        c = build_concat(2, 2)
        assert c.syndrome_of(PauliString.identity(16)) == (0,) * 12

    def test_single_z_hits_one_high_and_one_low_bit(self):
        c = build_concat(2, 2)
        e = PauliString.single(16, c.qubit_index(1, 1), "Z")
        syn = c.syndrome_of(e)
        # order: high-X (n1-2), high-Z, low-X (n2), low-Z
        high_x = syn[0:2]
        low_x = syn[4:8]
        assert sum(high_x) == 1 and high_x[0] == 1
        assert sum(low_x) == 1 and low_x[1] == 1
        assert sum(syn) == 2

    def test_full_column_z_hits_all_low_x_bits(self):
        # a full-column Z string overlaps each X-type column-pair stabilizer
        # on an even set (n2 is even) but every row on exactly one site
        c = build_concat(2, 2)
        e = PauliString.from_support(16, "Z", c.column_qubits(0))
        syn = c.syndrome_of(e)
        assert syn[0:4] == (0, 0, 0, 0)
        assert syn[4:8] == (1, 1, 1, 1)
        assert syn[8:12] == (0, 0, 0, 0)

    def test_against_symplectic_oracle(self):
        rng = random.Random(61)
        c = build_concat(4, 2)
        stab_vecs = [to_vecs(s) for s in c.stabilizers]
        for _ in range(50):
            e = PauliString(c.n, rng.getrandbits(c.n), rng.getrandbits(c.n))
            ev = to_vecs(e)
            oracle = tuple(0 if sym_commutes(*ev, *sv) else 1
                           for sv in stab_vecs)
            assert c.syndrome_of(e) == oracle

    def test_size_mismatch(self):
        c = build_concat(2, 2)
        with pytest.raises(ValueError):
            c.syndrome_of(PauliString.identity(4))


class TestLogicalAction:
    def test_stabilizer_is_identity(self):
        c = build_iceberg(4)
        act = c.logical_action(c.stabilizers[0])
        assert act.is_identity()

    def test_x_pair_is_logical_x(self):
        c = build_iceberg(4)
        act = c.logical_action(PauliString.from_support(6, "X", (0, 1)))
        assert act == PauliString.single(4, 0, "X")

    def test_rectangle_is_logical_x(self):
        c = build_concat(2, 2)
        for j in range(1, 3):
            for i in range(1, 3):
                act = c.logical_action(c.logical_x[c.logical_index(i, j)])
                assert act == PauliString.single(4, c.logical_index(i, j), "X")

    def test_column_pair_equivalences(self):
        # products of two full columns (same basis) are stabilizers
        c = build_concat(2, 2)
        for basis in ("X", "Z"):
            for x1 in range(c.n1):
                for x2 in range(x1 + 1, c.n1):
                    e = PauliString.from_support(
                        16, basis, c.column_qubits(x1) + c.column_qubits(x2))
                    assert c.in_stabilizer_group(e)
                    assert c.logical_action(e).is_identity()

    def test_not_in_normalizer(self):
        c = build_concat(2, 2)
        with pytest.raises(NotInNormalizer):
            c.logical_action(PauliString.single(16, 5, "X"))

    def test_anticommutation_convention(self):
        # logical action anticommutes consistently: Xbar acts as logical X
        c = build_iceberg(2)
        act = c.logical_action(c.logical_z[1])
        assert act == PauliString.single(2, 1, "Z")


class TestClassify:
    def setup_method(self):
        self.c = build_concat(2, 2)

    def xe(self, cells):
        return PauliString.from_support(
            16, "X", [self.c.qubit_index(x, y) for x, y in cells])

    def test_trivial_iff_stabilizer(self):
        rng = random.Random(67)
        gens = self.c.stabilizers
        for _ in range(30):
            p = PauliString.identity(16)
            for g in gens:
                if rng.random() < 0.5:
                    p = (p * g).unsigned()
            cls = self.c.classify_error(p)
            assert cls.overall == GenWeight.TRIVIAL
        cls = self.c.classify_error(PauliString.single(16, 3, "X"))
        assert cls.overall != GenWeight.TRIVIAL

    def test_single_site_is_one(self):
        for q in range(16):
            cls = self.c.classify_error(PauliString.single(16, q, "X"))
            assert cls.x_part.weight == GenWeight.ONE
            assert cls.z_part.weight == GenWeight.TRIVIAL

    def test_full_column_is_one_without_flags(self):
        for x in range(self.c.n1):
            e = self.xe([(x, y) for y in range(self.c.n2)])
            cls = self.c.classify_error(e)
            assert cls.x_part.weight == GenWeight.ONE

    def test_partial_column_unknown_is_two(self):
        e = self.xe([(1, 0), (1, 2)])
        assert self.c.classify_error(e).x_part.weight == GenWeight.TWO

    def test_partial_column_known_is_one(self):
        e = self.xe([(1, 0), (1, 2)])
        cls = self.c.classify_error(e, KnownCoords(xs=frozenset({1})))
        assert cls.x_part.weight == GenWeight.ONE

    def test_partial_row_known_is_one(self):
        e = self.xe([(0, 1), (2, 1)])
        cls = self.c.classify_error(e, KnownCoords(ys=frozenset({1})))
        assert cls.x_part.weight == GenWeight.ONE
        assert self.c.classify_error(e).x_part.weight == GenWeight.TWO

    def test_two_sites_off_line_is_heavier(self):
        e = self.xe([(1, 1), (2, 2)])
        assert self.c.classify_error(e).x_part.weight == GenWeight.HEAVIER

    def test_two_known_lines_is_two(self):
        e = self.xe([(1, 0), (1, 2), (0, 1), (2, 1)])
        cls = self.c.classify_error(
            e, KnownCoords(xs=frozenset({1}), ys=frozenset({1})))
        assert cls.x_part.weight == GenWeight.TWO

    def test_product_rule_x_and_z(self):
        ex = self.xe([(1, 1)])
        ez = PauliString.from_support(16, "Z", [self.c.qubit_index(2, 2)])
        both = (ex * ez).unsigned()
        cls = self.c.classify_error(both)
        assert cls.x_part.weight == GenWeight.ONE
        assert cls.z_part.weight == GenWeight.ONE
        assert cls.overall == GenWeight.ONE

    def test_full_column_z_is_one(self):
        e = PauliString.from_support(16, "Z", self.c.column_qubits(2))
        cls = self.c.classify_error(e)
        assert cls.z_part.weight == GenWeight.ONE

    def test_line_rectangle_intersection(self):
        # any single line meets any logical rectangle in at most two cells
        for params in ((2, 2), (4, 2)):
            c = build_concat(*params)
            masks = [c.column_mask(x) for x in range(c.n1)]
            masks += [c.row_mask(y) for y in range(c.n2)]
            for p in c.logical_x + c.logical_z:
                sup = p.x | p.z
                for m in masks:
                    assert bin(sup & m).count("1") <= 2


class TestExport:
    def test_stabilizer_text(self):
        c = build_iceberg(2)
        assert c.stabilizer_text() == "+XXXX\n+ZZZZ\n"

    def test_concat_text_round_trip(self):
        c = build_concat(2, 2)
        lines = c.stabilizer_text().strip().split("\n")
        assert len(lines) == 12
        back = [PauliString.from_label(l) for l in lines]
        assert tuple(back) == c.stabilizers
