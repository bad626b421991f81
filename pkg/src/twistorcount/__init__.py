"""Exact curve counting in twistor spaces of ALE gravitational instantons.

The public surface is re-exported here; see the submodules for details.
"""

from .curvecount import ZetaTriple, count_curves, count_rank1_closed_form, period_quadratic
from .decompopt import enumerate_span_closed, f1_solve, f2_solve, induced_decomposition, validate_decomposition
from .exactfield import BinaryQuadratic, GaussRational, ProjectivePoint1, rank_of_matrix
from .rootsys import build_root_system

__all__ = [
    "BinaryQuadratic",
    "GaussRational",
    "ProjectivePoint1",
    "ZetaTriple",
    "build_root_system",
    "count_curves",
    "count_rank1_closed_form",
    "enumerate_span_closed",
    "f1_solve",
    "f2_solve",
    "induced_decomposition",
    "period_quadratic",
    "rank_of_matrix",
    "validate_decomposition",
]

__version__ = "0.1.0"
