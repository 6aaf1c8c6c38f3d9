"""Morphophoric POVMs, generalised qplexes and 2-designs."""

from .designs import CATALOG, ProjectiveDesign, catalog_build, catalog_povm, design_level, welch_design_check
from .errors import QplexError
from .geometry import duality_checks, geometry_report, pure_membership_check, reconstruct_state
from .graph import analyse_design, build_orthogonality_graph, srg_analysis
from .povm import Povm, measurement_map, morphophoricity_report
from .primal import lueders_joint, urgleichung_check

__all__ = [
    "CATALOG",
    "Povm",
    "ProjectiveDesign",
    "QplexError",
    "analyse_design",
    "build_orthogonality_graph",
    "catalog_build",
    "catalog_povm",
    "design_level",
    "duality_checks",
    "geometry_report",
    "lueders_joint",
    "measurement_map",
    "morphophoricity_report",
    "pure_membership_check",
    "reconstruct_state",
    "srg_analysis",
    "urgleichung_check",
    "welch_design_check",
]
