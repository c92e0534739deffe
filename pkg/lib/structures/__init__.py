from .operator import HermitianOperator, UnitaryOperator, exp_hermitian, matrix_to_dict, matrix_from_dict
from .state import QuantumState
from .cov_matrix import CovMatrix
