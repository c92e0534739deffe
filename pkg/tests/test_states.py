import math

import pytest
import torch

from lib.covariance import cov_matrix
from lib.entanglement import witness_hamiltonian
from lib.operators import build_canonical_pair, squeezing_rotation_d3
from lib.states import StateFamilyParams, build_state, fidelity, from_factor, max_entangled, partial_trace, product_state, \
    random_factor, random_mixed_state, random_pure_state, squeezed_d3, squeezed_d3_trace, thermal_state, \
    trace_distance, two_mode_squeezed, vacuum_d3
from lib.structures import QuantumState
from lib.utils import make_generator
from lib.utils.exceptions import InvalidStateError


def test_vacuum_is_annihilated():
    pair = build_canonical_pair(3)
    vector = vacuum_d3().pure_vector()
    image = (pair.q.matrix + 1j * pair.p.matrix) @ vector
    assert torch.linalg.vector_norm(image).item() < 1e-12


def test_squeezed_family_starts_at_vacuum():
    assert squeezed_d3(0.0).overlap(vacuum_d3()) == pytest.approx(1.0, abs=1e-14)


def test_squeezed_family_is_rotated_vacuum():
    generator = make_generator(3)
    vacuum = vacuum_d3().pure_vector()
    for xi in (10 * torch.rand(50, dtype=torch.float64, generator=generator) - 5).tolist():
        rotated = squeezing_rotation_d3(xi) @ vacuum
        closed_form = squeezed_d3(xi).pure_vector()
        assert abs(torch.vdot(rotated, closed_form).abs().item() - 1.0) < 1e-10


def test_squeezed_family_saturates_and_follows_trace_formula():
    pair = build_canonical_pair(3)
    generator = make_generator(11)
    for xi in (10 * torch.rand(50, dtype=torch.float64, generator=generator) - 5).tolist():
        cov = cov_matrix(squeezed_d3(xi), [pair.q, pair.p])
        assert cov.det < 1e-9
        assert cov.trace == pytest.approx(squeezed_d3_trace(xi), abs=1e-8)


def test_squeezed_trace_at_zero_is_minimal_sum():
    assert squeezed_d3_trace(0.0) == pytest.approx(2 / 9 * (3 - math.sqrt(3)) * math.pi, abs=1e-14)


def test_factor_states_are_valid():
    generator = make_generator(0)
    state = from_factor(random_factor(4, 4, generator))
    values = torch.linalg.eigvalsh(state.density)
    assert values.min().item() >= -1e-12
    assert values.sum().item() == pytest.approx(1.0, abs=1e-12)
    assert not state.is_pure

    pure = random_pure_state(4, generator)
    assert pure.is_pure
    assert pure.rank_hint == 1


@pytest.mark.parametrize("d", range(2, 9))
def test_factor_states_are_psd_at_every_rank(d):
    generator = make_generator(40 + d)
    for rank in range(1, d + 1):
        state = from_factor(random_factor(d, rank, generator))
        values = torch.linalg.eigvalsh(state.density)
        assert values.min().item() >= -1e-12
        assert values.sum().item() == pytest.approx(1.0, abs=1e-12)
        if rank < d:
            assert values[:d - rank].abs().max().item() < 1e-12


def test_zero_factor_is_rejected():
    with pytest.raises(InvalidStateError):
        from_factor(torch.zeros(3, 1, dtype=torch.complex128))


def test_state_dict_round_trip():
    generator = make_generator(5)
    for state in (random_pure_state(3, generator), random_mixed_state(3, 2, generator)):
        restored = QuantumState.from_dict(state.to_dict())
        assert torch.allclose(restored.density, state.density, atol=1e-14)
        assert restored.dims == state.dims


def test_invalid_density_is_rejected():
    with pytest.raises(InvalidStateError):
        QuantumState(torch.diag(torch.tensor([1.5, -0.5], dtype=torch.float64)))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_max_entangled_reduces_to_maximally_mixed(d):
    reduced = partial_trace(max_entangled(d), keep=0)
    assert torch.allclose(reduced.density, torch.eye(d, dtype=torch.complex128) / d, atol=1e-14)


def test_product_state_partial_trace():
    generator = make_generator(2)
    first, second = random_pure_state(3, generator), random_pure_state(3, generator)
    product = product_state(first, second)
    assert product.dims == (3, 3)
    assert trace_distance(partial_trace(product, keep=1), second) < 1e-12


def test_fidelity_and_trace_distance():
    generator = make_generator(7)
    pure = random_pure_state(3, generator)
    mixed = random_mixed_state(3, 3, generator)
    assert fidelity(pure, pure) == pytest.approx(1.0, abs=1e-12)
    assert trace_distance(pure, pure) < 1e-12
    assert 0.0 <= fidelity(mixed, pure) <= 1.0
    assert 0.0 < trace_distance(mixed, pure) <= 1.0
    with pytest.raises(InvalidStateError):
        fidelity(mixed, mixed)


def test_two_mode_squeezed_limit_is_max_entangled():
    state = two_mode_squeezed(3, 1e6, 1e6)
    assert state.overlap(max_entangled(3)) > 0.999


def test_low_temperature_thermal_state_is_ground_state():
    pair = build_canonical_pair(3)
    state = thermal_state(witness_hamiltonian(pair), 0.01, (3, 3))
    assert state.overlap(max_entangled(3)) > 1 - 1e-8

    with pytest.raises(InvalidStateError):
        thermal_state(witness_hamiltonian(pair), 0.0)


@pytest.mark.parametrize("d", [3, 5])
def test_high_temperature_thermal_state_is_maximally_mixed(d):
    pair = build_canonical_pair(d)
    hot = thermal_state(witness_hamiltonian(pair), 1e6, (d, d))
    uniform = QuantumState(torch.eye(d * d, dtype=torch.complex128) / d ** 2, (d, d))
    assert trace_distance(hot, uniform) < 1e-4


def test_build_state_families():
    assert build_state(StateFamilyParams("vacuum3")).overlap(vacuum_d3()) == pytest.approx(1.0)
    thermal = build_state(StateFamilyParams("thermal", dim=3, temperature=1.0))
    assert thermal.dims == (3, 3)
    with pytest.raises(InvalidStateError):
        build_state(StateFamilyParams("coherent"))
