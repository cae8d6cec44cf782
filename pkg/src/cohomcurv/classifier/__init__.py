"""Case analysis: constraint systems, root enumeration, boundary expansions and catalog matching."""
from .boundary import MIXED_FAMILY, LaurentProfile, PoleOrderError, laurent_boundary, mixed_leading_k23
from .matching import MATCH, NOT_CH, UNKNOWN_CH, Classification, Match, classify_metric
from .roots import Family, Root, RootReport, compare_with_known, find_roots, parse_box
from .sweep import SweepReport, run_sweep, strata
from .systems import (SYSTEM_IDS, SYSTEMS, AnsatzFamily, ConstraintSystem, DegenerateAnsatz, KnownRoot,
                      UnknownSystem, constraint_residual, get_system)

__all__ = [
    "AnsatzFamily", "Classification", "ConstraintSystem", "DegenerateAnsatz", "Family", "KnownRoot",
    "LaurentProfile", "MATCH", "MIXED_FAMILY", "Match", "NOT_CH", "PoleOrderError", "Root", "RootReport",
    "SYSTEMS", "SYSTEM_IDS", "SweepReport", "UNKNOWN_CH", "UnknownSystem", "classify_metric",
    "compare_with_known", "constraint_residual", "find_roots", "get_system", "laurent_boundary",
    "mixed_leading_k23", "parse_box", "run_sweep", "strata",
]
