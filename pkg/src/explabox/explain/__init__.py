"""Local attributions and global summaries for black-box text models."""

from .attribution import (
    AttributionError,
    AttributionResult,
    LimeParams,
    ShapParams,
    exact_shapley,
    kernel_shap,
    lime,
    shapley_from_value_table,
)
from .components import (
    ComponentError,
    MaskSample,
    cosine_distance_to_full,
    enumerate_masks,
    proximity_weights,
    render_mask,
    sample_masks,
    shapley_kernel_weight,
    wls_solve,
)
from .summaries import (
    GlobalSummary,
    SummaryError,
    greedy_mmd,
    kmedoids_prototypes,
    mmd_critic,
    mmd_objective,
    pam_kmedoids,
    prototypes_by_label,
    rbf_kernel_matrix,
    token_frequency,
    token_information,
)

__all__ = [
    "AttributionError",
    "AttributionResult",
    "ComponentError",
    "GlobalSummary",
    "LimeParams",
    "MaskSample",
    "ShapParams",
    "SummaryError",
    "cosine_distance_to_full",
    "enumerate_masks",
    "exact_shapley",
    "greedy_mmd",
    "kernel_shap",
    "kmedoids_prototypes",
    "lime",
    "mmd_critic",
    "mmd_objective",
    "pam_kmedoids",
    "prototypes_by_label",
    "proximity_weights",
    "rbf_kernel_matrix",
    "render_mask",
    "sample_masks",
    "shapley_from_value_table",
    "shapley_kernel_weight",
    "token_frequency",
    "token_information",
    "wls_solve",
]
