"""Reconstruction of the linear or antilinear isometry behind a transition-probability preserving map."""

from symmetry.errors import MathematicalFailure, WignerError
from symmetry.generators import GeneratorKind, GeneratorSpec, instantiate
from symmetry.hilbert import RankOneProjection, canonicalize, gap_distance, transition_probability
from symmetry.reconstruct import IsometryWitness, Linearity, ReconstructionReport, SymmetryMap, reconstruct
from symmetry.resolving import build_resolving_set, profile_of, recover_from_profile

__all__ = [
    "GeneratorKind",
    "GeneratorSpec",
    "IsometryWitness",
    "Linearity",
    "MathematicalFailure",
    "RankOneProjection",
    "ReconstructionReport",
    "SymmetryMap",
    "WignerError",
    "build_resolving_set",
    "canonicalize",
    "gap_distance",
    "instantiate",
    "profile_of",
    "reconstruct",
    "recover_from_profile",
    "transition_probability",
]
