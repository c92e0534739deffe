from .covariance import expectation, variance, covariance, cov_matrix, rs_inequality_gap, transform, \
    concavity_check
