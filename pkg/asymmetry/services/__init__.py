# asymmetry/services/__init__.py
from asymmetry.services.analysis_service import analyze_table
from asymmetry.services.geometry_service import (
    constraint_curve,
    cosine_similarity,
    euclidean,
    fisher_rao_arc,
    hellinger_vec,
    power_divergence,
)
from asymmetry.services.inference_service import (
    bootstrap_power_se,
    bootstrap_se,
    bowker,
    chi_square_sf,
    inverse_normal_cdf,
    mcnemar,
    normal_cdf,
    phi_gradient,
    phi_interval,
    phi_power_gradient,
    phi_power_interval,
    phi_variance,
)
from asymmetry.services.measure_service import (
    cs_delta_from_phi,
    phi,
    phi_cs_closed,
    phi_power,
    phi_power_value,
    phi_value,
    realize_weights,
)
from asymmetry.services.simulation_service import (
    consistency_errors,
    coverage_experiment,
    cs_table,
    sample_multinomial,
    sweep_cs,
)
from asymmetry.services.table_service import (
    conditional_pair,
    included_pairs,
    parse_table,
    read_table,
    serialize_table,
    to_probabilities,
)
