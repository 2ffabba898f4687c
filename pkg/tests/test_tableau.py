import math
import random
from collections import Counter

import numpy as np
import pytest

from icesim.pauli import Circuit, Instruction, PauliString
from icesim.statevec import statevector_run
from icesim.tableau import (StabilizerTableau, canonicalize, groups_equal,
                            tableau_run)

from oracles import random_clifford_circuit


def ghz_circuit(n, measure=True):
    ins = [Instruction("PrepZ", (q,)) for q in range(n)]
    ins.append(Instruction("H", (0,)))
    ins += [Instruction("CX", (0, q)) for q in range(1, n)]
    if measure:
        ins += [Instruction("MeasZ", (q,), register=f"m{q}") for q in range(n)]
    return Circuit(n, ins)


class TestBasics:
    def test_ghz_outcomes_all_equal_and_equiprobable(self):
        counts = Counter()
        for seed in range(400):
            rec, _ = tableau_run(ghz_circuit(3), seed=seed)
            bits = [rec[f"m{q}"] for q in range(3)]
            assert len(set(bits)) == 1
            counts[bits[0]] += 1
        assert 140 < counts[0] < 260

    def test_stabilizer_measured_twice_identical(self):
        ins = [Instruction("H", (0,)), Instruction("CX", (0, 1)),
               Instruction("MeasZ", (0,), register="a"),
               Instruction("MeasZ", (0,), register="b")]
        for seed in range(20):
            rec, _ = tableau_run(Circuit(2, ins), seed=seed)
            assert rec["a"] == rec["b"]

    def test_deterministic_bits_identical_across_seeds(self):
        ins = [Instruction("PrepZ", (0,)), Instruction("X", (0,)),
               Instruction("MeasZ", (0,), register="m")]
        for seed in range(5):
            rec, _ = tableau_run(Circuit(1, ins), seed=seed)
            assert rec["m"] == 1

    def test_ghz_stabilizer_group(self):
        _, tab = tableau_run(ghz_circuit(4, measure=False), seed=0)
        expected = [PauliString.from_label("+XXXX")]
        expected += [PauliString.from_label("+" + "".join(
            "Z" if q in (i, i + 1) else "I" for q in range(4)))
            for i in range(3)]
        assert groups_equal(tab.stabilizers(), expected)

    def test_expectation(self):
        _, tab = tableau_run(ghz_circuit(4, measure=False), seed=0)
        assert tab.expectation(PauliString.from_label("+XXXX")) == 1
        assert tab.expectation(PauliString.from_label("-XXXX")) == -1
        assert tab.expectation(PauliString.from_label("+ZIII")) is None

    def test_rotation_clifford_point(self):
        # RotZZ(pi/2) on |++> produces a state locally equivalent to a Bell pair
        ins = [Instruction("PrepX", (0,)), Instruction("PrepX", (1,)),
               Instruction("RotZZ", (0, 1), angle=math.pi / 2)]
        _, tab = tableau_run(Circuit(2, ins), seed=0)
        expected = [PauliString.from_label("+XZ"), PauliString.from_label("+ZX")]
        got = tab.stabilizers()
        # X0 -> Y0 Z1 under the rotation; stabilizers should match dense run
        amps, _ = statevector_run(Circuit(2, ins), seed=0)
        for p in tab.canonical_stabilizers():
            from icesim.statevec import pauli_to_matrix
            val = np.real(np.conj(amps) @ (pauli_to_matrix(p) @ amps))
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_non_quarter_rotation_rejected(self):
        ins = [Instruction("RotZZ", (0, 1), angle=0.3)]
        with pytest.raises(ValueError):
            tableau_run(Circuit(2, ins), seed=0)


class TestOracleEquivalence:
    def check_circuit(self, c, seeds=range(6)):
        for seed in seeds:
            rec, _ = tableau_run(c, seed=seed)
            # every tableau sample must have nonzero probability in the dense sim
            statevector_run(c, seed=0, forced_outcomes=rec)

    def test_random_circuits_support_consistency(self):
        rng = random.Random(101)
        for _ in range(40):
            n = rng.randint(2, 6)
            c = random_clifford_circuit(rng, n, 20, with_rotations=True,
                                        with_measurements=True)
            self.check_circuit(c)

    def test_deterministic_bits_agree(self):
        rng = random.Random(303)
        for _ in range(25):
            n = rng.randint(2, 5)
            c = random_clifford_circuit(rng, n, 15, with_measurements=True)
            rec_t, _ = tableau_run(c, seed=1)
            rec_t2, _ = tableau_run(c, seed=2)
            det = {k for k in rec_t if rec_t[k] == rec_t2[k]}
            # bits deterministic across seeds must match the dense simulation
            amps, rec_s = statevector_run(c, seed=5)
            for k in det:
                rec_t3, _ = tableau_run(c, seed=3)
                if rec_t3[k] == rec_t[k]:  # still deterministic
                    pass
            statevector_run(c, seed=0, forced_outcomes=rec_t)


class TestCanonicalize:
    def test_group_equality_invariant_to_generator_choice(self):
        a = [PauliString.from_label("+XX"), PauliString.from_label("+ZZ")]
        b = [PauliString.from_label("-YY"), PauliString.from_label("+ZZ")]
        assert groups_equal(a, b)

    def test_sign_difference_detected(self):
        a = [PauliString.from_label("+XX"), PauliString.from_label("+ZZ")]
        b = [PauliString.from_label("+XX"), PauliString.from_label("-ZZ")]
        assert not groups_equal(a, b)
