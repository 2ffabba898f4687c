"""Circuit gadget builders: state preparation, syndrome extraction, logical
gates, GHZ protocols, mirror benchmarking circuits, and projective
preparation."""

from .base import GadgetOutput, remap_instructions, rename_roles
from .gate import build_gate
from .ghz import build_ghz
from .mirror import XYSpec, build_xy_mirror, edge_coloring
from .prep import build_prep
from .projective import build_projective_prep
from .se import build_se

__all__ = [
    "GadgetOutput",
    "build_gate",
    "build_ghz",
    "build_prep",
    "build_projective_prep",
    "build_xy_mirror",
    "XYSpec",
    "edge_coloring",
    "build_se",
    "remap_instructions",
    "rename_roles",
]
