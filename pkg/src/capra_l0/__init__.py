"""Capra conjugacy of the l0 pseudonorm for lp source norms."""

__version__ = "0.1.0"

from .norms import (
    PExponent,
    lp_norm,
    normal_cone_member_lp,
    osm_falsify,
    sort_abs,
    top_norm,
)
from .capra import (
    admissible_levels,
    capra_biconjugate,
    capra_conjugate,
    capra_coupling,
    capra_young_gap,
    classical_subdiff,
    frechet_family_subdiff_member,
    in_admissible_dual,
    l0,
    support,
)
from .subdiff import (
    Condition,
    RegionGrid,
    SubdiffVerdict,
    in_subdiff_domain,
    region_sweep,
    region_sweep_classes,
    subdiff_member,
    subdiff_member_mask,
    subdiff_witness,
)
from .bounds import (
    CapraAffineModel,
    CapraAffinePiece,
    CapraL0LowerBound,
    build_model,
    dumps_model,
    eval_model,
    loads_model,
    sphere_samples,
)

__all__ = [
    "PExponent", "lp_norm", "normal_cone_member_lp", "osm_falsify", "sort_abs", "top_norm",
    "admissible_levels", "capra_biconjugate", "capra_conjugate", "capra_coupling", "capra_young_gap",
    "classical_subdiff", "frechet_family_subdiff_member", "in_admissible_dual", "l0", "support",
    "Condition", "RegionGrid", "SubdiffVerdict", "in_subdiff_domain", "region_sweep",
    "region_sweep_classes", "subdiff_member", "subdiff_member_mask", "subdiff_witness",
    "CapraAffineModel", "CapraAffinePiece", "CapraL0LowerBound", "build_model", "dumps_model",
    "eval_model", "loads_model", "sphere_samples",
]
