from .extrema import VarianceExtremum, OrbitPoint, min_sum_variances, max_sum_variances, trace_bounds, \
    shifted_oscillator, lowest_level
from .trace_det import DIRECTIONS, QUANTITIES, RegionSample, extremize_det_at_trace, trace_det_region, sample_values
from .jnr import JnrPoint, CrossSection, jnr_support, jnr_cross_section, random_directions, slice_point, \
    hull_distance
