"""Circuit-level stochastic Pauli noise model.

Noise placement convention: a two-qubit depolarizing channel of total strength
p_2q after every two-qubit gate (CX/SWAP/RotZZ/RotXX), a flip after every
preparation (X after PrepZ, Z after PrepX), and a classical flip of every
recorded measurement bit with probability p_meas.  The channel picks one of
the fifteen non-identity two-qubit Paulis with probabilities p_2q * w_i,
where w is the (renormalized) bias vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

# order of the 15 two-qubit Paulis: (first, second) with 0=I 1=X 2=Y 3=Z,
# skipping II; index = 4*first + second - 1.
PAULI2_LABELS = [
    "IX", "IY", "IZ",
    "XI", "XX", "XY", "XZ",
    "YI", "YX", "YY", "YZ",
    "ZI", "ZX", "ZY", "ZZ",
]
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
# per-index (x_a, z_a, x_b, z_b) bit arrays
PAULI2_XA = np.array([_BITS[l[0]][0] for l in PAULI2_LABELS], dtype=bool)
PAULI2_ZA = np.array([_BITS[l[0]][1] for l in PAULI2_LABELS], dtype=bool)
PAULI2_XB = np.array([_BITS[l[1]][0] for l in PAULI2_LABELS], dtype=bool)
PAULI2_ZB = np.array([_BITS[l[1]][1] for l in PAULI2_LABELS], dtype=bool)

DANGEROUS = [PAULI2_LABELS.index(l) for l in ("XX", "YY", "ZZ")]


@dataclass(frozen=True)
class NoiseModel:
    p_2q: float = 0.0
    p_init: float = 0.0
    p_meas: float = 0.0
    bias: Optional[Tuple[float, ...]] = None  # 15 weights, renormalized

    def __post_init__(self):
        for p in (self.p_2q, self.p_init, self.p_meas):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.bias is not None:
            if len(self.bias) != 15:
                raise ValueError("bias must have 15 entries")
            if any(w < 0 for w in self.bias) or sum(self.bias) == 0:
                raise ValueError("bias entries must be nonnegative, not all zero")

    @property
    def weights(self) -> np.ndarray:
        if self.bias is None:
            return np.full(15, 1.0 / 15.0)
        w = np.asarray(self.bias, dtype=float)
        return w / w.sum()

    @property
    def is_trivial(self) -> bool:
        return self.p_2q == 0 and self.p_init == 0 and self.p_meas == 0

    @staticmethod
    def depolarizing(p: float, p_init: Optional[float] = None,
                     p_meas: Optional[float] = None) -> "NoiseModel":
        return NoiseModel(p, p if p_init is None else p_init,
                          p if p_meas is None else p_meas)

    @staticmethod
    def zz_biased(p: float, p_init: Optional[float] = None,
                  p_meas: Optional[float] = None) -> "NoiseModel":
        """Preset suppressing the dangerous {XX, YY, ZZ} entries by 10x."""
        w = [1.0] * 15
        for i in DANGEROUS:
            w[i] = 0.1
        return NoiseModel(p, p if p_init is None else p_init,
                          p if p_meas is None else p_meas, tuple(w))
