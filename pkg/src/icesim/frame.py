"""Vectorized Pauli-frame Monte Carlo sampler.

The sampler tracks, for every shot in a chunk, the X/Z components of a Pauli
frame (the accumulated error relative to a noiseless reference execution) as
boolean numpy arrays of shape (num_qubits, shots).  All Clifford gates update
the frame with a handful of XOR operations; stochastic noise and twirled
non-Clifford rotations draw random bits per shot.  Measurement registers are
reported as *flips* relative to the reference record; raw samples additionally
XOR the reference bits and a uniformly random element of the outcome span
(the affine subspace of noiseless outcome records), so their distribution
matches a full stabilizer simulation exactly.

Randomness is a counter-based generator (Philox) keyed per (seed, chunk), so
results are bit-reproducible for a fixed seed, shot count, and chunk size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .noise import (NoiseModel, PAULI2_XA, PAULI2_XB, PAULI2_ZA, PAULI2_ZB)
from .pauli import (Circuit, Instruction, MEASUREMENTS, PREPS, ROTATIONS,
                    _quarter_turns)
from .tableau import tableau_run

DEFAULT_CHUNK = 1 << 16


def reference_record(c: Circuit, seed: int = 0) -> Dict[str, int]:
    """Noiseless record of the Clifford skeleton (rotations removed)."""
    rec, _ = tableau_run(_clifford_skeleton(c), seed=seed)
    return rec


def _clifford_skeleton(c: Circuit) -> Circuit:
    """The circuit with non-Clifford rotations deleted.

    Twirled small-angle rotations act as identity plus a stochastic Pauli, so
    the reference outcome structure comes from the Clifford part alone.
    """
    ins = [i for i in c.instructions
           if not (i.kind in ROTATIONS and _quarter_turns(i.angle) is None)]
    return Circuit(c.num_qubits, ins)


def outcome_span(c: Circuit, trials: Optional[int] = None) -> List[int]:
    """GF(2) basis (bitmasks over register slots) of the noiseless outcome span.

    The noiseless record distribution is uniform over an affine subspace
    reference + span; the basis is recovered by sampling skeleton runs and
    collecting record differences.
    """
    skel = _clifford_skeleton(c)
    nreg = skel.num_registers
    if trials is None:
        trials = 2 * nreg + 64
    labels = skel.register_labels()
    ref, _ = tableau_run(skel, seed=0)
    basis: List[int] = []
    for t in range(1, trials + 1):
        rec, _ = tableau_run(skel, seed=t)
        v = 0
        for i, lab in enumerate(labels):
            v |= (rec[lab] ^ ref[lab]) << i
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            if len(basis) == nreg:
                break
    return sorted(basis, reverse=True)


@dataclass
class _Op:
    kind: str
    targets: Tuple[int, ...]
    slot: int = -1          # register slot for measurements
    sin2: float = 0.0       # sin^2(angle) for twirled rotations
    quarter: Optional[int] = None


class FrameSampler:
    """Stateful sampler; successive .sample() calls consume fresh chunks."""

    def __init__(self, c: Circuit, noise: NoiseModel, seed: int = 0,
                 chunk_size: int = DEFAULT_CHUNK):
        self.circuit = c
        self.noise = noise
        self.seed = seed
        self.chunk_size = chunk_size
        self.labels = c.register_labels()
        self.reference = reference_record(c)
        self._ref_bits = np.array([self.reference[l] for l in self.labels],
                                  dtype=bool)
        self._span: Optional[List[int]] = None
        self._chunk_index = 0
        self._ops = self._compile(c)

    def _compile(self, c: Circuit) -> List[_Op]:
        ops: List[_Op] = []
        for ins in c.instructions:
            k = ins.kind
            if k in ("Tick", "Detector", "Observable"):
                continue
            op = _Op(k, ins.targets)
            if k in MEASUREMENTS:
                op.slot = c.register_map[ins.register]
            if k in ROTATIONS:
                op.quarter = _quarter_turns(ins.angle)
                # exp(-i t/2 A) maps anticommuting P to cos(t) P -i sin(t) A P,
                # so the twirled frame multiplies by A with probability sin^2(t)
                op.sin2 = math.sin(ins.angle) ** 2 if op.quarter is None \
                    else (0.0 if op.quarter in (0, 2) else 1.0)
                # quarter == 2 multiplies anticommuting frames by identity up
                # to sign, which the signless frame ignores.
            ops.append(op)
        return ops

    # -- core chunk loop ---------------------------------------------------
    def _run_chunk(self, shots: int, with_residual: bool = False):
        rng = np.random.Generator(np.random.Philox(
            key=(self.seed << 64) + self._chunk_index))
        self._chunk_index += 1
        n = self.circuit.num_qubits
        noise = self.noise
        fx = np.zeros((n, shots), dtype=bool)
        fz = np.zeros((n, shots), dtype=bool)
        flips = np.zeros((self.circuit.num_registers, shots), dtype=bool)
        weights = noise.weights
        cumw = np.cumsum(weights)

        def depolarize(a: int, b: int) -> None:
            if noise.p_2q <= 0:
                return
            hit = rng.random(shots) < noise.p_2q
            idx = np.searchsorted(cumw, rng.random(shots), side="right")
            idx = np.minimum(idx, 14)
            fx[a] ^= hit & PAULI2_XA[idx]
            fz[a] ^= hit & PAULI2_ZA[idx]
            fx[b] ^= hit & PAULI2_XB[idx]
            fz[b] ^= hit & PAULI2_ZB[idx]

        for op in self._ops:
            k = op.kind
            if k == "CX":
                cq, t = op.targets
                fx[t] ^= fx[cq]
                fz[cq] ^= fz[t]
                depolarize(cq, t)
            elif k == "H":
                q = op.targets[0]
                tmp = fx[q].copy()
                fx[q] = fz[q]
                fz[q] = tmp
            elif k == "S":
                q = op.targets[0]
                fz[q] ^= fx[q]
            elif k in ("X", "Y", "Z"):
                pass  # Pauli gates commute with the frame up to sign
            elif k == "SWAP":
                a, b = op.targets
                fx[[a, b]] = fx[[b, a]]
                fz[[a, b]] = fz[[b, a]]
                depolarize(a, b)
            elif k == "RotZZ" or k == "RotXX":
                a, b = op.targets
                if k == "RotZZ":
                    anti = fx[a] ^ fx[b]
                else:
                    anti = fz[a] ^ fz[b]
                if op.sin2 >= 1.0:
                    flip = anti
                elif op.sin2 <= 0.0:
                    flip = None
                else:
                    flip = anti & (rng.random(shots) < op.sin2)
                if flip is not None:
                    if k == "RotZZ":
                        fz[a] ^= flip
                        fz[b] ^= flip
                    else:
                        fx[a] ^= flip
                        fx[b] ^= flip
                depolarize(a, b)
            elif k == "PrepZ":
                q = op.targets[0]
                fx[q] = False
                fz[q] = False
                if noise.p_init > 0:
                    fx[q] ^= rng.random(shots) < noise.p_init
            elif k == "PrepX":
                q = op.targets[0]
                fx[q] = False
                fz[q] = False
                if noise.p_init > 0:
                    fz[q] ^= rng.random(shots) < noise.p_init
            elif k == "MeasZ":
                q = op.targets[0]
                out = fx[q].copy()
                if noise.p_meas > 0:
                    out ^= rng.random(shots) < noise.p_meas
                flips[op.slot] = out
            elif k == "MeasX":
                q = op.targets[0]
                out = fz[q].copy()
                if noise.p_meas > 0:
                    out ^= rng.random(shots) < noise.p_meas
                flips[op.slot] = out
            elif k == "NoiseSite":
                if len(op.targets) == 2:
                    depolarize(*op.targets)
                else:
                    q = op.targets[0]
                    if noise.p_2q > 0:
                        hit = rng.random(shots) < noise.p_2q
                        which = rng.integers(0, 3, shots)
                        fx[q] ^= hit & (which != 2)   # X or Y
                        fz[q] ^= hit & (which != 0)   # Y or Z
            else:
                raise ValueError(f"unhandled instruction {k}")
        if with_residual:
            return flips.T, fx.T, fz.T
        return flips.T  # (shots, num_registers)

    def sample(self, shots: int) -> np.ndarray:
        """Flip bits relative to the reference record, shape (shots, R)."""
        parts = []
        remaining = shots
        while remaining > 0:
            m = min(remaining, self.chunk_size)
            parts.append(self._run_chunk(m))
            remaining -= m
        return np.concatenate(parts, axis=0) if len(parts) > 1 else parts[0]

    def sample_with_residual(self, shots: int):
        """Flips plus the end-of-circuit Pauli frame left on every qubit.

        Returns (flips, res_x, res_z) with shapes (shots, R), (shots, n),
        (shots, n)."""
        fl, rx, rz = [], [], []
        remaining = shots
        while remaining > 0:
            m = min(remaining, self.chunk_size)
            f, x, z = self._run_chunk(m, with_residual=True)
            fl.append(f)
            rx.append(x)
            rz.append(z)
            remaining -= m
        cat = (lambda p: np.concatenate(p, axis=0) if len(p) > 1 else p[0])
        return cat(fl), cat(rx), cat(rz)

    def sample_raw(self, shots: int) -> np.ndarray:
        """Raw register samples (reference XOR flips XOR random span element)."""
        flips = self.sample(shots)
        if self._span is None:
            self._span = outcome_span(self.circuit)
        out = flips ^ self._ref_bits[None, :]
        if self._span:
            rng = np.random.Generator(np.random.Philox(
                key=(self.seed << 64) + (1 << 63) + self._chunk_index))
            nreg = len(self.labels)
            span_bits = np.array(
                [[(b >> i) & 1 for i in range(nreg)] for b in self._span],
                dtype=bool)
            picks = (rng.random((shots, len(self._span))) < 0.5).astype(np.uint8)
            out ^= ((picks @ span_bits.astype(np.uint8)) % 2).astype(bool)
        return out


def frame_sample(c: Circuit, noise: NoiseModel, shots: int, seed: int = 0,
                 chunk_size: int = DEFAULT_CHUNK) -> np.ndarray:
    """One-call flip sampling; see FrameSampler for semantics."""
    return FrameSampler(c, noise, seed, chunk_size).sample(shots)


def propagate_twirled_rotation(p, axis, sin2: float, rng) -> "PauliString":
    """Twirled update of a single frame through exp(-i theta/2 * Axis).

    If p commutes with the axis it is unchanged; otherwise it is multiplied by
    the axis with probability sin2 = sin^2(theta) (signs dropped).
    """
    from .pauli import pauli_commutes, pauli_multiply
    if pauli_commutes(p, axis):
        return p
    if rng.random() < sin2:
        return pauli_multiply(axis, p).unsigned()
    return p
