"""Implicit curve/surface reconstruction from point clouds by minimizing a
curvature-regularized minimal-surface energy.

Two solvers: an operator-splitting semi-implicit scheme (2D/3D, s=1 or 2)
and an augmented Lagrangian method (2D, s=1). See the README for the CLI.
"""

from .alm import AlmConfig, AlmState, alm_run
from .levelset import EnergyBreakdown, energy, interface_energy
from .oracle import CircleFamily, circle_energy, circle_local_minimizer
from .osm import OsmConfig, osm_run
from .report import RunReport
from .shapes import ShapeSpec, generate, perturb

__all__ = [
    "AlmConfig", "AlmState", "alm_run",
    "EnergyBreakdown", "energy", "interface_energy",
    "CircleFamily", "circle_energy", "circle_local_minimizer",
    "OsmConfig", "osm_run",
    "RunReport",
    "ShapeSpec", "generate", "perturb",
]

__version__ = "0.1.0"
