"""Discrete superpositions of fractional p-Laplacians on lattice domains."""

__version__ = "0.1.0"

from .measure import MeasureError, SpectralMeasure, critical_exponent, gamma, s_sharp, validate
from .domain import Box, Disk, Interval, Mask, DiscreteDomain, build, ball_of_same_volume
from .kernel import AssembledOperator, assemble
from .energy import GridFunction, nonlocal_tail, rayleigh, seminorm_p
from .solver import (ConvergenceError, EigenResult, NonCoerciveError, PathResult, brute_force_tiny,
                     eig1, eig2_minimax, eig2_twoball_bound, eig_all_p2)
from .principles import check_weak_max, nodal_measure_bound, signed_mp_failure_search, solve_source
from .shapes import area_family, faber_krahn_experiment, polya_szego_check

__all__ = [
    "__version__", "MeasureError", "SpectralMeasure", "critical_exponent", "gamma", "s_sharp",
    "validate", "Box", "Disk", "Interval", "Mask", "DiscreteDomain", "build",
    "ball_of_same_volume", "AssembledOperator", "assemble", "GridFunction", "nonlocal_tail",
    "rayleigh", "seminorm_p", "ConvergenceError", "EigenResult", "NonCoerciveError", "PathResult",
    "brute_force_tiny", "eig1", "eig2_minimax", "eig2_twoball_bound", "eig_all_p2",
    "check_weak_max", "nodal_measure_bound", "signed_mp_failure_search", "solve_source",
    "area_family", "faber_krahn_experiment", "polya_szego_check",
]
