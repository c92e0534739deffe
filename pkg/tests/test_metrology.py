import math

import pytest
import torch

from lib.covariance import cov_matrix, variance
from lib.metrology import accuracy_report, accuracy_scan, accuracy_value, commutator_jacobian, fidelity_curve, \
    moment_matrix, mom_simulate_multi, mom_simulate_single, optimize_a_d, qcrb_scalar, qfi_finite_difference, \
    qfim_pure, saturability_matrix, scaling_fit
from lib.operators import build_canonical_pair, build_quadratics
from lib.states import from_factor, random_mixed_state, random_pure_state, vacuum_d3
from lib.structures import QuantumState
from lib.utils import make_generator
from lib.utils.exceptions import IllConditionedError, InsensitiveMeasurementError, InvalidStateError, \
    NonInvertibleWindowError


def test_qfi_is_four_variances():
    pair = build_canonical_pair(4)
    state = random_pure_state(4, make_generator(0))
    for generator in (pair.q, pair.p, build_quadratics(pair).g1):
        qfi = qfim_pure(state, [generator])[0, 0].item()
        assert qfi == pytest.approx(4 * variance(state, generator), abs=1e-12)
        assert qfi_finite_difference(state, generator) == pytest.approx(qfi, abs=1e-4)


def test_qfim_ignores_global_phase():
    pair = build_canonical_pair(4)
    generators = [pair.q, pair.p, build_quadratics(pair).g1]
    vector = random_pure_state(4, make_generator(6)).pure_vector()
    reference = qfim_pure(QuantumState.from_vector(vector), generators)
    for phi in (0.3, 1.7, -2.9):
        rotated = QuantumState.from_vector(complex(math.cos(phi), math.sin(phi)) * vector)
        assert torch.allclose(qfim_pure(rotated, generators), reference, atol=1e-12)


def test_fidelity_curve_starts_at_one():
    pair = build_canonical_pair(3)
    curve = fidelity_curve(vacuum_d3(), pair.p, torch.tensor([0.0, 0.3]))
    assert curve[0].item() == pytest.approx(1.0, abs=1e-14)
    assert curve[1].item() < 1.0


def test_mixed_state_is_rejected():
    pair = build_canonical_pair(3)
    with pytest.raises(InvalidStateError):
        qfim_pure(random_mixed_state(3, 2, make_generator(1)), [pair.q, pair.p])


def test_saturability_matrix_is_four_times_imaginary_covariance():
    pair = build_canonical_pair(4)
    real_factor = torch.randn(4, 1, dtype=torch.float64, generator=make_generator(2))
    state = from_factor(real_factor)
    matrix = saturability_matrix(state, [pair.q, pair.p])
    cov = cov_matrix(state, [pair.q, pair.p])
    assert torch.allclose(matrix, 4 * cov.skew, atol=1e-12)


def test_commuting_generators_are_saturable():
    pair = build_canonical_pair(4)
    state = random_pure_state(4, make_generator(3))
    matrix = saturability_matrix(state, [pair.q, pair.q.square()])
    assert matrix.abs().max().item() < 1e-12


def test_scalar_bound_for_two_parameters():
    pair = build_canonical_pair(3)
    state = random_pure_state(3, make_generator(4))
    sym = cov_matrix(state, [pair.q, pair.p]).sym
    expected = torch.trace(sym).item() / torch.linalg.det(sym).item() / 4
    assert accuracy_value(pair, state) == pytest.approx(expected, rel=1e-10)
    assert qcrb_scalar(4 * sym, torch.eye(2, dtype=torch.float64)) == pytest.approx(expected, rel=1e-10)


def test_singular_qfim():
    with pytest.raises(IllConditionedError):
        qcrb_scalar(torch.tensor([[1.0, 1.0], [1.0, 1.0]], dtype=torch.float64))


@pytest.mark.parametrize("d", [3, 4, 5])
def test_moment_matrix_is_dominated_by_qfim(d):
    pair = build_canonical_pair(d)
    generator = make_generator(10 + d)
    for _ in range(100):
        state = random_pure_state(d, generator)
        ops = [pair.q, pair.p]
        difference = qfim_pure(state, ops) - moment_matrix(state, ops, ops)
        assert torch.linalg.eigvalsh(difference).min().item() > -1e-9


def test_moment_matrix_closed_form():
    pair = build_canonical_pair(4)
    state = random_pure_state(4, make_generator(5))
    cov = cov_matrix(state, [pair.q, pair.p])
    w = cov.skew[0, 1].item()
    expected = 4 * w ** 2 * cov.sym / cov.sym_det
    assert torch.allclose(moment_matrix(state, [pair.q, pair.p], [pair.q, pair.p]), expected, atol=1e-10)

    jacobian = commutator_jacobian(state, [pair.q, pair.p], [pair.q, pair.p])
    assert jacobian[0, 0].item() == pytest.approx(0.0, abs=1e-14)
    assert jacobian[0, 1].item() == pytest.approx(-jacobian[1, 0].item(), abs=1e-14)


def test_insensitive_measurement():
    pair = build_canonical_pair(3)
    state = random_pure_state(3, make_generator(6))
    with pytest.raises(InsensitiveMeasurementError):
        moment_matrix(state, [pair.q], [pair.q])


def test_qubit_accuracy_optimum():
    optimum = optimize_a_d(build_canonical_pair(2), restarts=4, seed=0)
    assert optimum.converged
    assert optimum.value == pytest.approx(2 / math.pi, abs=1e-4)


def test_accuracy_report_d3():
    report = accuracy_report(3, restarts=4, seed=0)
    assert report.converged
    assert report.a_d <= report.a_d_c + 1e-9
    assert report.saturability_residual < 1e-6
    assert report.a_d_m >= report.a_d - 1e-9
    assert report.gap_delta == pytest.approx(report.a_d_m - report.a_d)


def test_scaling_fit_recovers_power_law():
    dims = [3, 4, 5, 6]
    slope, intercept = scaling_fit(dims, [2.0 * d ** -1.5 for d in dims])
    assert slope == pytest.approx(-1.5, abs=1e-10)
    assert intercept == pytest.approx(math.log(2.0), abs=1e-10)


@pytest.mark.slow
def test_accuracy_scan():
    scan = accuracy_scan(list(range(3, 13)), restarts=16, seed=0)
    assert -2 < scan.slope < -1
    assert scan.gap_decreasing
    for report in scan.reports:
        assert report.a_d_c >= report.a_d - 1e-9
        assert report.saturability_residual < 1e-6
        assert report.a_d_m >= report.a_d - 1e-9


def test_single_parameter_monte_carlo():
    pair = build_canonical_pair(3)
    result = mom_simulate_single(vacuum_d3(), pair.q, pair.p, 0.0, nu=100000, trials=4000, seed=0)
    assert result.trials == 4000
    assert 0.9 <= result.ratio <= 1.1
    assert result.window[0] < 0.0 < result.window[1]


def test_monte_carlo_error_halves_with_doubled_shots():
    pair = build_canonical_pair(3)
    single = mom_simulate_single(vacuum_d3(), pair.q, pair.p, 0.0, nu=100000, trials=4000, seed=1)
    double = mom_simulate_single(vacuum_d3(), pair.q, pair.p, 0.0, nu=200000, trials=4000, seed=1)
    assert single.empirical_mse / double.empirical_mse == pytest.approx(2.0, rel=0.15)


def test_two_parameter_monte_carlo():
    pair = build_canonical_pair(3)
    result = mom_simulate_multi(vacuum_d3(), pair, (0.0, 0.0), nu=100000, trials=2000, seed=0)
    assert 0.8 <= result.ratio <= 1.25


def test_monte_carlo_errors():
    pair = build_canonical_pair(3)
    with pytest.raises(InsensitiveMeasurementError):
        mom_simulate_single(vacuum_d3(), pair.q, pair.q, 0.0, nu=1000, trials=10)
    with pytest.raises(NonInvertibleWindowError):
        mom_simulate_single(vacuum_d3(), pair.q, pair.p, 0.0, nu=1, trials=10)
    with pytest.raises(ValueError):
        mom_simulate_single(vacuum_d3(), pair.q, pair.p, 0.0, nu=0, trials=10)
