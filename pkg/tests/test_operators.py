import math

import pytest
import torch

from lib.operators import build_canonical_pair, build_displacements, build_quadratics, closed_form_commutator, \
    closed_form_momentum, commutator_qp, mub_overlaps, oscillator_levels, squeezing_rotation_d3, clock_operator, \
    shift_operator
from lib.config import config
from lib.operators.displacements import squeezing_unitary
from lib.structures import HermitianOperator
from lib.utils.exceptions import DimensionError, InvalidOperatorError


def test_q_is_diagonal_with_symmetric_labels():
    pair = build_canonical_pair(3)
    expected = math.sqrt(2 * math.pi / 3) * torch.tensor([-1.0, 0.0, 1.0], dtype=torch.float64)
    assert torch.allclose(pair.q.matrix.real, torch.diag(expected), atol=1e-14)

    qubit = build_canonical_pair(2)
    expected = math.sqrt(math.pi) * torch.tensor([-0.5, 0.5], dtype=torch.float64)
    assert torch.allclose(qubit.q.matrix.real, torch.diag(expected), atol=1e-14)


def test_invalid_dimension():
    with pytest.raises(DimensionError):
        build_canonical_pair(1)


@pytest.mark.parametrize("d", range(2, 17))
def test_momentum_matches_closed_form(d):
    pair = build_canonical_pair(d)
    assert (pair.p.matrix - closed_form_momentum(d)).abs().max().item() < 1e-12


@pytest.mark.parametrize("d", [3, 4, 7])
def test_q_and_p_are_isospectral(d):
    pair = build_canonical_pair(d)
    assert torch.allclose(pair.q.eigvalsh(), pair.p.eigvalsh(), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_eigenbases_are_mutually_unbiased(d):
    pair = build_canonical_pair(d)
    assert torch.allclose(mub_overlaps(pair), torch.full((d, d), 1.0 / d, dtype=torch.float64), atol=1e-12)


@pytest.mark.parametrize("d", range(2, 17))
def test_commutator_closed_form(d):
    pair = build_canonical_pair(d)
    commutator = pair.q.matrix @ pair.p.matrix - pair.p.matrix @ pair.q.matrix
    assert (commutator - closed_form_commutator(d)).abs().max().item() < 1e-12

    # -i[Q, P] is Hermitian and traceless
    hermitian = commutator_qp(pair)
    assert abs(torch.trace(hermitian.matrix).item()) < 1e-12


def test_quadratics():
    pair = build_canonical_pair(4)
    quadratics = build_quadratics(pair)
    q2, p2 = pair.q.square().matrix, pair.p.square().matrix
    assert torch.allclose(quadratics.t.matrix, q2 + p2)
    assert torch.allclose(quadratics.g3.matrix, q2 - p2)
    assert torch.allclose(quadratics.g1.matrix, pair.q.matrix @ pair.p.matrix + pair.p.matrix @ pair.q.matrix)


def test_lowest_t_eigenvalue_at_d3():
    pair = build_canonical_pair(3)
    lowest = build_quadratics(pair).t.eigvalsh()[0].item()
    assert lowest == pytest.approx(2 / 9 * (3 - math.sqrt(3)) * math.pi, abs=1e-12)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_shift_is_a_phased_permutation(d):
    pair = build_canonical_pair(d)
    magnitudes = shift_operator(pair).matrix.abs()
    assert torch.allclose(magnitudes.sum(dim=0), torch.ones(d, dtype=torch.float64), atol=1e-12)
    assert torch.allclose(magnitudes.sum(dim=1), torch.ones(d, dtype=torch.float64), atol=1e-12)
    assert torch.allclose(magnitudes.round(), magnitudes, atol=1e-12)

    clock = clock_operator(pair).matrix
    assert torch.allclose(clock, torch.diag(torch.diagonal(clock)), atol=1e-12)


def test_displacements():
    pair = build_canonical_pair(3)
    identity = build_displacements(pair, 0, 0, 0)
    assert torch.allclose(identity.matrix, torch.eye(3, dtype=torch.complex128), atol=1e-12)

    with pytest.raises(InvalidOperatorError):
        build_displacements(pair, 0, 3, 0)
    with pytest.raises(InvalidOperatorError):
        build_displacements(pair, -1, 0, 0)


@pytest.mark.parametrize("xi", [-2.3, -0.4, 0.0, 0.7, 3.1])
def test_squeezing_rotation_matches_exponential(xi):
    pair = build_canonical_pair(3)
    assert (squeezing_unitary(pair, xi).matrix - squeezing_rotation_d3(xi)).abs().max().item() < 1e-10


def test_squeezing_rejects_non_finite():
    with pytest.raises(InvalidOperatorError):
        squeezing_unitary(build_canonical_pair(3), float("nan"))


def test_oscillator_levels_improve_with_dimension():
    errors = []
    for d in (8, 16, 32):
        levels = oscillator_levels(build_canonical_pair(d), 3)
        target = torch.arange(3, dtype=torch.float64) + 0.5
        errors.append((levels - target).abs().max().item())
    assert errors[0] > errors[1] > errors[2]


def test_hermitian_operator_symmetrizes_rounding():
    matrix = torch.tensor([[1.0, 2.0], [2.0 + 1e-14, 3.0]], dtype=torch.complex128)
    operator = HermitianOperator(matrix)
    assert torch.equal(operator.matrix, operator.matrix.conj().T)
    assert torch.allclose(HermitianOperator.from_dict(operator.to_dict()).matrix, operator.matrix)


def test_hermitian_operator_rejects_asymmetric_matrix():
    matrix = torch.tensor([[1.0, 2.0], [0.0, 3.0]], dtype=torch.complex128)
    with pytest.raises(InvalidOperatorError):
        HermitianOperator(matrix)
    assert HermitianOperator(matrix, tolerance=1.0).matrix[0, 1].item() == 1.0

    config.defrost()
    config.OPERATORS.HERMITIAN_TOL = 1.0
    try:
        assert HermitianOperator(matrix).matrix[1, 0].item() == 1.0
    finally:
        config.OPERATORS.HERMITIAN_TOL = 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 5, 8, 11])
def test_fourier_orbit(d):
    pair = build_canonical_pair(d)
    t = build_quadratics(pair).t
    assert (pair.fourier.conjugate(pair.q).matrix - pair.p.matrix).abs().max().item() < 1e-12
    assert (pair.fourier.conjugate(pair.p).matrix + pair.q.matrix).abs().max().item() < 1e-12
    assert (pair.fourier.conjugate(t).matrix - t.matrix).abs().max().item() < 1e-12


def test_qubit_displacements_are_paulis():
    pair = build_canonical_pair(2)
    x = shift_operator(pair).matrix
    z = clock_operator(pair).matrix
    identity = torch.eye(2, dtype=torch.complex128)

    for square in (x @ x, z @ z):
        assert abs(abs(square[0, 0].item()) - 1) < 1e-12
        assert torch.allclose(square, square[0, 0] * identity, atol=1e-12)

    assert (x @ z + z @ x).abs().max().item() < 1e-12
    xz = (x @ z).abs()
    assert torch.allclose(xz, torch.tensor([[0.0, 1.0], [1.0, 0.0]], dtype=torch.float64), atol=1e-12)


def test_shift_cycles_d3_basis():
    pair = build_canonical_pair(3)
    magnitudes = shift_operator(pair).matrix.abs()
    assert torch.allclose(magnitudes, torch.roll(torch.eye(3, dtype=torch.float64), -1, dims=0), atol=1e-12)
