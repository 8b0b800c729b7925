from .geometric_measure import (
    ISOPERIMETRIC_CONSTANT,
    HeatTrace,
    VariationReport,
    coarea_integral,
    heat_flow_trace,
    isoperimetric_deficit,
    isoperimetric_lower_bound,
    level_set_perimeters,
    perimeter,
    semicontinuity_sweep,
    symmetrized_variation,
    total_variation_graph,
    total_variation_pl,
    variation_report,
)
from .rearrange import (
    DistributionFunction,
    RearrangementProfile,
    decreasing_rearrangement,
    distribution_distance,
    distribution_function,
    layer_cake_reconstruct,
    layer_cake_symmetrize,
    rearranged_product_integral,
    symmetrize,
    symmetrize_set,
)

__all__ = [
    "ISOPERIMETRIC_CONSTANT",
    "HeatTrace",
    "VariationReport",
    "coarea_integral",
    "heat_flow_trace",
    "isoperimetric_deficit",
    "isoperimetric_lower_bound",
    "level_set_perimeters",
    "perimeter",
    "semicontinuity_sweep",
    "symmetrized_variation",
    "total_variation_graph",
    "total_variation_pl",
    "variation_report",
    "DistributionFunction",
    "RearrangementProfile",
    "decreasing_rearrangement",
    "distribution_distance",
    "distribution_function",
    "layer_cake_reconstruct",
    "layer_cake_symmetrize",
    "rearranged_product_integral",
    "symmetrize",
    "symmetrize_set",
]
