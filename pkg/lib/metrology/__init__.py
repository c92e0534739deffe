from .bounds import qfim_pure, saturability_matrix, fidelity_curve, qfi_finite_difference, qcrb_scalar, \
    commutator_jacobian, moment_matrix, symmetric_covariance
from .accuracy import AccuracyOptimum, AccuracyReport, AccuracyScan, accuracy_value, optimize_a_d, accuracy_report, \
    accuracy_scan, scaling_fit
from .simulation import MomSimResult, MeanCurve, DisplacementMeans, evolved_state, monotone_window, invert_means, \
    sample_means, mom_simulate_single, mom_simulate_multi
