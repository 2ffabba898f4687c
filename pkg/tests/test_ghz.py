"""Tests for the logical GHZ preparation protocols and their decoder."""

import pytest

from icesim.codes import ConcatIceberg, IcebergCode
from icesim.decoders import decode_ghz_d4
from icesim.faults import inject_faults
from icesim.frame import reference_record
from icesim.ftverify import _in_state_group, _state_group_masks, ft_fault_sites
from icesim.gadgets import build_ghz
from icesim.pauli import PauliString
from icesim.tableau import tableau_run


def ghz_generators(code):
    """Stabilizer generators of the logical GHZ state of `code`."""
    gens = list(code.stabilizers)
    gens += [(code.logical_z[i] * code.logical_z[i + 1]).unsigned()
             for i in range(code.k - 1)]
    gx = code.logical_x[0]
    for i in range(1, code.k):
        gx = (gx * code.logical_x[i]).unsigned()
    gens.append(gx)
    return gens


def run_and_check_group(gadget, code, seed):
    """Noiseless run; apply the recorded frame fix; assert the exact group."""
    rec, tab = tableau_run(gadget.circuit, seed=seed)
    fix = gadget.meta.get("frame_fix")
    if fix is not None and rec[gadget.meta["parity_labels"][0]]:
        for q in range(code.n):
            if (fix.z >> q) & 1:
                tab.z(q)
    total = gadget.circuit.num_qubits
    for p in ghz_generators(code):
        assert tab.expectation(p.embedded(total, tuple(range(code.n)))) == 1
    return rec


def parity_flips_ok(gadget, rec):
    ref = reference_record(gadget.circuit)
    flips = {lab: rec[lab] ^ ref[lab] for lab in rec}
    return all(sum(flips[lab] for lab in grp) % 2 == 0
               for grp in gadget.parity_checks)


class TestSingleBlock:
    def test_factorizes_into_bell_and_physical_ghz(self):
        # k=4: Bell pair on the outer qubits (0, 5), GHZ chain on 1..4
        g = build_ghz("single_block", k=4)
        _, tab = tableau_run(g.circuit, seed=0)
        total = g.circuit.num_qubits
        gens = [("X", (0, 5)), ("Z", (0, 5)), ("X", (1, 2, 3, 4)),
                ("Z", (1, 2)), ("Z", (2, 3)), ("Z", (3, 4))]
        for kind, sup in gens:
            p = PauliString.from_support(6, kind, sup)
            assert tab.expectation(p.embedded(total, tuple(range(6)))) == 1

    def test_is_logical_ghz(self):
        g = build_ghz("single_block", k=4)
        run_and_check_group(g, IcebergCode(4), seed=1)


class TestParityReadout:
    def test_repetitions_agree_and_measurement_is_qnd(self):
        codes = [IcebergCode(4), IcebergCode(2)]
        g = build_ghz("parity_readout", block_sizes=[4, 2], repetitions=2)
        n = sum(c.n for c in codes)
        prodx = PauliString.from_support(n, "X", [0, codes[0].n - 1,
                                                 codes[0].n, n - 1])
        for seed in range(6):
            rec, tab = tableau_run(g.circuit, seed=seed)
            assert rec["gx0"] == rec["gx1"]
            val = tab.expectation(
                prodx.embedded(g.circuit.num_qubits, tuple(range(n))))
            assert val == (-1 if rec["gx0"] else 1)


class TestMultiBlock:
    def test_three_blocks_give_logical_ghz12(self):
        g = build_ghz("multi_block_fanout_tree", block_sizes=[4, 4, 4])
        codes = [IcebergCode(4)] * 3
        offs = [0, 6, 12]
        total = g.circuit.num_qubits
        rec, tab = tableau_run(g.circuit, seed=0)
        for lab in g.registers["block_checks"] + g.registers["ghz_parity"]:
            assert rec[lab] == 0
        gens = []
        for code, off in zip(codes, offs):
            for s in code.stabilizers:
                gens.append(s.embedded(total, tuple(range(off, off + 6))))
        # 11 consecutive logical-ZZ pairs across the 12 logical qubits
        logical_z = [c.logical_z[j].embedded(total, tuple(range(o, o + 6)))
                     for c, o in zip(codes, offs) for j in range(c.k)]
        gens += [(logical_z[i] * logical_z[i + 1]).unsigned()
                 for i in range(11)]
        gx = PauliString.identity(total)
        for c, o in zip(codes, offs):
            for lx in c.logical_x:
                gx = (gx * lx.embedded(total, tuple(range(o, o + 6))))
        gens.append(gx.unsigned())
        assert len(gens) == 18
        for p in gens:
            assert tab.expectation(p) == 1


class TestConcatD4:
    def test_noiseless_state_and_parities(self):
        code = ConcatIceberg(2, 2)
        g = build_ghz("concat_d4", k2=2, k1=2)
        for seed in range(6):
            rec = run_and_check_group(g, code, seed)
            assert parity_flips_ok(g, rec)

    @pytest.mark.parametrize("k2,k1", [(2, 4), (4, 2)])
    def test_other_sizes_noiseless(self, k2, k1):
        code = ConcatIceberg(k2, k1)
        g = build_ghz("concat_d4", k2=k2, k1=k1)
        rec = run_and_check_group(g, code, seed=0)
        assert parity_flips_ok(g, rec)


@pytest.fixture(scope="module")
def setup():
    code = ConcatIceberg(2, 2)
    g = build_ghz("concat_d4", k2=2, k1=2)
    return code, g


class TestDecodeGhzD4:
    def test_clean_record_accepts_identity(self, setup):
        code, g = setup
        out = decode_ghz_d4(g, code, 0)
        assert out.accepted
        assert out.correction.weight == 0

    def test_every_single_fault_accepted_without_logical_residual(self, setup):
        code, g = setup
        c = g.circuit
        xs, zs = _state_group_masks(code, "ghz")

        def harmless(p):
            return (_in_state_group(p, xs, zs, code.n)
                    or any(code.syndrome_of(p)))

        for f in ft_fault_sites(c):
            eff = inject_faults(c, (f,))
            res = eff.residual(c.num_qubits).restricted(g.data_qubits)
            out = decode_ghz_d4(g, code, eff.register_flips)
            assert out.accepted, (f, eff.register_flips)
            assert harmless((res * out.correction).unsigned()), f

    def test_consistent_double_parity_flip_discards(self, setup):
        # two measurement faults flipping both parity repetitions the same
        # way are outside the single-fault set and must be post-selected out
        code, g = setup
        rm = g.circuit.register_map
        for a, b in (("gm0_0", "gm1_0"), ("gp0", "gp1")):
            mask = (1 << rm[a]) | (1 << rm[b])
            out = decode_ghz_d4(g, code, mask)
            assert not out.accepted
