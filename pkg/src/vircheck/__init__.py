"""Exact symbolic engine for descendent Virasoro operators and lattice vertex algebras."""

from .geometry import CohClass, TargetGeometry, preset_geometry
from .superalgebra import Gen, SuperPoly, SuperDerivation, graded_solve

__all__ = [
    "CohClass",
    "TargetGeometry",
    "preset_geometry",
    "Gen",
    "SuperPoly",
    "SuperDerivation",
    "graded_solve",
]

__version__ = "0.1.0"
