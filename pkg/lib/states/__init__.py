from .factor import from_factor, random_factor, random_pure_state, random_mixed_state, product_state, \
    random_separable_state, partial_trace, fidelity, trace_distance
from .families import StateFamilyParams, FAMILIES, vacuum_d3, squeezed_d3, squeezed_d3_trace, two_mode_squeezed, \
    max_entangled, thermal_state, build_state
