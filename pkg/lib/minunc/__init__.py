from .solver import MinUncSolution, MinUncReport, solve_minunc, minunc_report, verify_parallelism, \
    saturation_relations, half_commutator
