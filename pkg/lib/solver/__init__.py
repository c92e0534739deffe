from .penalty_schedule import MultiStepPenalty
from .objectives import FactorProblem, CovarianceMoments, moment_operators, jnr_operators, expectations, \
    covariance_moments, OBJECTIVES, CONSTRAINTS
from .factor_optimizer import FactorOptimizer, RestartResult, optimize_with_restarts, select_best
