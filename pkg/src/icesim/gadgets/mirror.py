"""Mirror benchmarking circuits for Trotterized XY-model dynamics.

The model is a 3D antiferromagnet on an even periodic cubic lattice with
nearest-neighbour couplings h_ij = J (X_i X_j + Z_i Z_j).  One first-order
Trotter step applies, per edge, the commuting rotation pair
RotXX(2JΔt)·RotZZ(2JΔt) = exp(-i h_ij Δt), scheduled over the lattice's
natural edge 6-coloring: edges along each axis split by the parity of the
coordinate along that axis, giving six disjoint matchings (this is why every
lattice side must be even).

The mirrored circuit runs s/2 forward Trotter steps and then the inverse
gates in the opposite order, so the noiseless circuit is the identity on the
initial all-zero state and the final Z-basis measurement record gives the
survival probability directly.  Encoded circuits place the k = Lx·Ly·Lz
spins on the logical qubits of one [[k+2, k, 2]] block, where each rotation
pair is a single pair of physical rotations on the corresponding data qubits
(partially fault tolerant: only same-type two-qubit fault components are
silent).  One syndrome-extraction round sits between the halves; both
stabilizers are extracted by default, with an option to extract only the
Z-type stabilizer.

Pauli twirling of the rotations is not compiled into the circuit: under the
stochastic Pauli noise model used for sampling, twirl layers fold into the
Pauli frame with identical statistics (meta["twirl"] records this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from ..codes import IcebergCode
from ..pauli import Circuit, Instruction, invert_circuit
from .base import GadgetOutput, remap_instructions

Edge = Tuple[int, int]


@dataclass(frozen=True)
class XYSpec:
    """Mirror-benchmark parameters.

    dims: periodic cubic lattice sides (all even); theta: J·Δt in radians
    per Trotter substep; steps: total Trotter steps s in the full mirrored
    circuit (even; s/2 forward, s/2 reversed).
    """
    dims: Tuple[int, int, int]
    theta: float = math.pi / 8
    steps: int = 2

    @property
    def num_sites(self) -> int:
        lx, ly, lz = self.dims
        return lx * ly * lz

    def validate(self) -> None:
        if len(self.dims) != 3 or any(d < 2 or d % 2 for d in self.dims):
            raise ValueError("lattice sides must all be even and >= 2")
        if self.steps < 2 or self.steps % 2:
            raise ValueError("total Trotter steps must be even and >= 2")


def edge_coloring(dims: Tuple[int, int, int]) -> List[List[Edge]]:
    """The six disjoint edge sets of the periodic cubic lattice.

    Color 2·axis + parity holds the edges along `axis` whose base coordinate
    along that axis has that parity.  Every vertex appears at most once per
    color, and each vertex contributes one edge per axis (3·V edges total).
    """
    lx, ly, lz = dims
    sizes = (lx, ly, lz)

    def vid(x: int, y: int, z: int) -> int:
        return x + lx * (y + ly * z)

    colors: List[List[Edge]] = [[] for _ in range(6)]
    for z in range(lz):
        for y in range(ly):
            for x in range(lx):
                coords = (x, y, z)
                for axis in range(3):
                    stepped = list(coords)
                    stepped[axis] = (stepped[axis] + 1) % sizes[axis]
                    c = 2 * axis + coords[axis] % 2
                    colors[c].append((vid(*coords), vid(*stepped)))
    return colors


def build_xy_mirror(spec: XYSpec, encoding: str = "unencoded",
                    se_config: str = "none",
                    se_bases: str = "both") -> GadgetOutput:
    spec.validate()
    if encoding not in ("unencoded", "iceberg"):
        raise ValueError(f"unsupported encoding {encoding!r}")
    if se_config not in ("midpoint_se", "none"):
        raise ValueError(f"unsupported se_config {se_config!r}")
    if se_bases not in ("both", "z"):
        raise ValueError(f"unsupported se_bases {se_bases!r}")
    if encoding == "unencoded" and se_config != "none":
        raise ValueError("syndrome extraction needs an encoded circuit")

    k = spec.num_sites
    colors = edge_coloring(spec.dims)
    if encoding == "iceberg":
        code = IcebergCode(k)
        n = code.n
        site = [v + 1 for v in range(k)]   # vertex v lives on data qubit v+1
    else:
        code = None
        n = k
        site = list(range(k))

    ins: List[Instruction] = []
    registers: Dict[str, Tuple[str, ...]] = {}
    check_roles: List[str] = []
    parity: List[Tuple[str, ...]] = []
    next_anc = n

    if code is not None:
        from .prep import build_prep
        prep = build_prep(code, "log_depth_d2")
        n_anc = prep.circuit.num_qubits - n
        qmap = {q: q for q in range(n)}
        qmap.update({n + i: next_anc + i for i in range(n_anc)})
        ins += remap_instructions(prep.circuit.instructions, qmap)
        next_anc += n_anc
        registers["checks"] = prep.registers["checks"]
        check_roles.append("checks")
    else:
        ins += [Instruction("PrepZ", (q,)) for q in range(n)]

    angle = 2 * spec.theta
    forward: List[Instruction] = []
    for _ in range(spec.steps // 2):
        for edges in colors:
            for u, v in edges:
                forward.append(Instruction("RotXX", (site[u], site[v]),
                                           angle=angle))
                forward.append(Instruction("RotZZ", (site[u], site[v]),
                                           angle=angle))
    ins += forward

    if se_config == "midpoint_se":
        from .se import build_se
        bases = ("Z",) if se_bases == "z" else ("Z", "X")
        syn_labels: List[str] = []
        flag_labels: List[str] = []
        se_anc = next_anc
        n_se = 0
        for b in bases:
            se = build_se(code, "ghz_ancilla_d2", basis=b)
            n_se = se.circuit.num_qubits - n
            qmap = {q: q for q in range(n)}
            qmap.update({n + i: se_anc + i for i in range(n_se)})
            tag = b.lower()
            rename = {"syn": f"se{tag}"}
            rename.update({f"flag{i}": f"se{tag}f{i}" for i in range(n_se)})
            ins += remap_instructions(se.circuit.instructions, qmap,
                                      rename.__getitem__)
            syn_labels.append(f"se{tag}")
            flag_labels += [f"se{tag}f{i}" for i in range(n_se - 1)]
        next_anc = se_anc + n_se
        registers["syndromes"] = tuple(syn_labels)
        registers["flags"] = tuple(flag_labels)
        check_roles += ["syndromes", "flags"]

    # reverse half: the inverse gates in the opposite order
    ins += invert_circuit(Circuit(n, forward)).instructions

    fm = tuple(f"fm{q}" for q in range(n))
    ins += [Instruction("MeasZ", (q,), register=fm[q]) for q in range(n)]
    registers["final-Z"] = fm
    if code is not None:
        parity.append(fm)   # the Z-type stabilizer, read from the record

    if code is not None:
        readout = tuple((site[v], n - 1) for v in range(k))
    else:
        readout = tuple((site[v],) for v in range(k))

    return GadgetOutput(
        circuit=Circuit(next_anc, ins),
        data_qubits=tuple(range(n)),
        registers=registers,
        check_roles=tuple(check_roles),
        rus_roles=("checks",) if code is not None else (),
        parity_checks=tuple(parity),
        meta={"variant": "xy_mirror", "dims": spec.dims, "theta": spec.theta,
              "steps": spec.steps, "encoding": encoding,
              "se_config": se_config, "se_bases": se_bases,
              "edges_per_step": 3 * k,
              "rotations_per_step": 6 * k,
              "readout_supports": readout,
              "twirl": "frame"},
    )
