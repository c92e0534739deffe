from .witness import BipartiteCov, WitnessResult, LocalOperators, ThermalRow, SqueezingRow, ENTANGLED, UNDETECTED, \
    local_operators, witness_hamiltonian, bipartite_cov, witness_lhs, witness_lhs_from_blocks, separable_bound, \
    duan_witness, temperature_grid, thermal_scan, thermal_threshold, squeezing_scan, separable_false_positives
