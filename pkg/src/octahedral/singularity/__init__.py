"""Unavoidable-singularity analysis: coefficient recovery, the orientation
table and closed-form factor oracles."""
from .factors import closed_form_factors, factor_agreement, fit_common_scale
from .sigma import (
    SigmaCoefficients,
    is_unavoidable,
    recover_sigma,
    recover_sigma_batch,
    singular_base_sizes,
    unavoidable_batch,
)
from .table import (
    PositionSet,
    StratumSample,
    UnavoidableStratum,
    classify_orientation,
    general_case_positions,
    row_stratum,
    sample_row,
    stratum_sample,
)

__all__ = [
    "PositionSet",
    "SigmaCoefficients",
    "StratumSample",
    "UnavoidableStratum",
    "closed_form_factors",
    "classify_orientation",
    "factor_agreement",
    "fit_common_scale",
    "general_case_positions",
    "is_unavoidable",
    "recover_sigma",
    "recover_sigma_batch",
    "row_stratum",
    "sample_row",
    "singular_base_sizes",
    "stratum_sample",
    "unavoidable_batch",
]
