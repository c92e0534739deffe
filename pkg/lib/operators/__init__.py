from .canonical_pair import CanonicalPair, Quadratics, build_canonical_pair, commutator_qp, build_quadratics, \
    squeezing_generator, closed_form_momentum, closed_form_commutator, fourier_matrix, index_offsets, mub_overlaps, \
    oscillator_levels, check_dim
from .displacements import build_displacements, shift_operator, clock_operator, squeezing_unitary, \
    squeezing_rotation_d3, encoding_unitary
