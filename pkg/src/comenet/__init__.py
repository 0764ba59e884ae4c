"""Complete SE(3)-invariant geometric featurization of 3D molecular graphs."""

from .basis import BasisConfig, bessel_roots, real_spherical_harmonic, sbf, spherical_bessel_j, tbf
from .geometry import EdgeTuple, TupleSet, angle_between, dihedral, edge_tuple, transform
from .graphs import (
    Graph3D,
    NeighborTable,
    SE3Transform,
    apply_se3,
    build_neighbor_table,
    build_radius_graph,
    random_se3,
)
from .mpnet import MiniNetConfig, forward
from .reconstruct import (
    AlignmentReport,
    PlacementCase,
    ReconstructionResult,
    Verdict,
    align,
    discriminate,
    place_case1,
    place_case2,
    reconstruct,
    round_trip,
)

__all__ = [
    "BasisConfig", "bessel_roots", "real_spherical_harmonic", "sbf",
    "spherical_bessel_j", "tbf",
    "EdgeTuple", "TupleSet", "angle_between", "dihedral", "edge_tuple",
    "transform",
    "Graph3D", "NeighborTable", "SE3Transform", "apply_se3",
    "build_neighbor_table", "build_radius_graph", "random_se3",
    "MiniNetConfig", "forward",
    "AlignmentReport", "PlacementCase", "ReconstructionResult", "Verdict",
    "align", "discriminate", "place_case1", "place_case2", "reconstruct",
    "round_trip",
]

__version__ = "0.1.0"
