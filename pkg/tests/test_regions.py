import math

import numpy as np
import pytest
import torch
from scipy.spatial.distance import directed_hausdorff

from lib.covariance import cov_matrix
from lib.operators import build_canonical_pair, build_quadratics
from lib.regions import extremize_det_at_trace, hull_distance, jnr_cross_section, jnr_support, max_sum_variances, \
    min_sum_variances, random_directions, sample_values, trace_bounds, trace_det_region
from lib.states import vacuum_d3
from lib.structures import QuantumState
from lib.utils.exceptions import InfeasibleTraceError

TAU_MIN_D3 = 2 / 9 * (3 - math.sqrt(3)) * math.pi
LIFT_D5 = -(-146925 + 64903 * math.sqrt(5) + 5 * math.sqrt(6442 * (210475 - 94119 * math.sqrt(5)))) \
    * math.pi ** 2 / 322100


def test_minimal_sum_of_variances_d3():
    extremum = min_sum_variances(build_canonical_pair(3))
    assert extremum.value == pytest.approx(TAU_MIN_D3, abs=1e-8)
    assert extremum.converged
    assert extremum.state.overlap(vacuum_d3()) > 1 - 1e-8


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_odd_dimension_minimizer_is_centered(d):
    extremum = min_sum_variances(build_canonical_pair(d))
    assert abs(extremum.centers[0]) < 1e-6
    assert abs(extremum.centers[1]) < 1e-6
    assert len(extremum.multiplicity_orbit) == 1


def test_even_dimension_minimizers_form_an_orbit():
    pair = build_canonical_pair(4)
    extremum = min_sum_variances(pair)
    orbit = extremum.multiplicity_orbit
    assert len(orbit) == 4
    for point in orbit:
        cov = cov_matrix(point.state, [pair.q, pair.p])
        assert cov.trace == pytest.approx(extremum.value, abs=1e-8)
        assert point.state.expect(pair.q) == pytest.approx(point.centers[0], abs=1e-6)
        assert point.state.expect(pair.p) == pytest.approx(point.centers[1], abs=1e-6)


@pytest.mark.parametrize("d", [4, 5])
def test_maximal_sum_of_variances(d):
    pair = build_canonical_pair(d)
    extremum = max_sum_variances(pair)
    values, vectors = build_quadratics(pair).t.eigh()
    assert extremum.value == pytest.approx(values[-1].item(), abs=1e-12)
    assert extremum.state.overlap(QuantumState.from_vector(vectors[:, -1])) > 1 - 1e-8


def test_qubit_trace_bounds():
    tau_min, tau_max = trace_bounds(build_canonical_pair(2))
    assert tau_min == pytest.approx(math.pi / 4, abs=1e-8)
    assert tau_max == pytest.approx(math.pi / 2, abs=1e-12)


def test_qubit_max_variance_state_is_centered():
    # T is a multiple of the identity at d=2
    pair = build_canonical_pair(2)
    extremum = max_sum_variances(pair)
    assert abs(extremum.state.expect(pair.q)) < 1e-12
    assert abs(extremum.state.expect(pair.p)) < 1e-12
    trace, det = sample_values(pair, extremum.state)
    assert trace == pytest.approx(math.pi / 2, abs=1e-12)
    assert det == pytest.approx(0.0, abs=1e-12)


def test_qubit_pure_region_is_the_zero_determinant_segment():
    samples = trace_det_region(build_canonical_pair(2), 4, rank=1, restarts=2, seed=0)
    assert len(samples) == 8
    assert samples[0].boundary and samples[-1].boundary
    for sample in samples:
        assert sample.trace == pytest.approx(sample.t_target, abs=1e-6)
        assert abs(sample.det) < 1e-8
    with pytest.raises(ValueError):
        trace_det_region(build_canonical_pair(2), 1)


def test_qubit_region_matches_bloch_grid():
    pair = build_canonical_pair(2)
    tau_min, tau_max = trace_bounds(pair)

    polar = torch.linspace(0, math.pi, 60, dtype=torch.float64)
    azimuth = torch.linspace(0, 2 * math.pi, 60, dtype=torch.float64)
    traces, dets = [], []
    for theta in polar.tolist():
        for phi in azimuth.tolist():
            vector = torch.tensor([math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)],
                                  dtype=torch.complex128)
            trace, det = sample_values(pair, QuantumState.from_vector(vector))
            traces.append(trace)
            dets.append(det)

    assert max(abs(d) for d in dets) < 1e-10
    assert min(traces) == pytest.approx(tau_min, abs=1e-3)
    assert max(traces) == pytest.approx(tau_max, abs=1e-3)


def test_minimal_determinant_at_minimal_trace_d3():
    pair = build_canonical_pair(3)
    sample = extremize_det_at_trace(pair, TAU_MIN_D3, rank=1, direction="min")
    assert sample.boundary
    assert sample.det <= 1e-8


def test_determinant_lift_d5():
    pair = build_canonical_pair(5)
    tau_min, _ = trace_bounds(pair)
    sample = extremize_det_at_trace(pair, tau_min, rank=1, direction="min")
    assert LIFT_D5 == pytest.approx(2.16e-3, abs=1e-5)
    assert sample.det == pytest.approx(LIFT_D5, abs=5e-5)


def test_interior_samples_recompute():
    pair = build_canonical_pair(3)
    tau_min, tau_max = trace_bounds(pair)
    t = tau_min + 0.4 * (tau_max - tau_min)

    low = extremize_det_at_trace(pair, t, rank=1, direction="min", restarts=4, seed=1)
    high = extremize_det_at_trace(pair, t, rank=1, direction="max", restarts=4, seed=1)
    for sample in (low, high):
        assert sample.converged
        assert sample.trace == pytest.approx(t, abs=1e-7)
        trace, det = sample_values(pair, sample.state)
        assert trace == pytest.approx(sample.trace, abs=1e-10)
        assert det == pytest.approx(sample.det, abs=1e-10)
        assert det >= -1e-9
    assert low.det <= high.det + 1e-12


def test_symmetric_determinant_dominates():
    pair = build_canonical_pair(3)
    tau_min, tau_max = trace_bounds(pair)
    t = tau_min + 0.4 * (tau_max - tau_min)

    hermitian = extremize_det_at_trace(pair, t, rank=1, direction="max", restarts=4, seed=2)
    symmetric = extremize_det_at_trace(pair, t, rank=1, direction="max", restarts=4, seed=2, quantity="symmetric")
    assert symmetric.trace == pytest.approx(t, abs=1e-7)
    assert symmetric.det >= hermitian.det - 1e-7
    _, sym_det = sample_values(pair, hermitian.state, "symmetric")
    assert sym_det >= hermitian.det - 1e-12


def test_pure_region_inside_mixed_region():
    pair = build_canonical_pair(3)
    tau_min, tau_max = trace_bounds(pair)
    for fraction in (0.25, 0.6):
        t = tau_min + fraction * (tau_max - tau_min)
        for direction, sign in (("min", 1), ("max", -1)):
            pure = extremize_det_at_trace(pair, t, rank=1, direction=direction, restarts=4, seed=2)
            mixed = extremize_det_at_trace(pair, t, rank=3, direction=direction, restarts=4, seed=2)
            assert sign * mixed.det <= sign * pure.det + 1e-6


def test_infeasible_trace():
    pair = build_canonical_pair(3)
    _, tau_max = trace_bounds(pair)
    with pytest.raises(InfeasibleTraceError):
        extremize_det_at_trace(pair, tau_max + 1.0)
    with pytest.raises(ValueError):
        extremize_det_at_trace(pair, tau_max, direction="sideways")


def test_support_points_of_t():
    pair = build_canonical_pair(4)
    quadratics = build_quadratics(pair)
    spectrum = quadratics.t.eigvalsh()
    operators = [pair.q, pair.p, quadratics.t]

    bottom = jnr_support(operators, [0.0, 0.0, -1.0])
    top = jnr_support(operators, [0.0, 0.0, 1.0])
    assert bottom.expectation_tuple[2].item() == pytest.approx(spectrum[0].item(), abs=1e-10)
    assert top.expectation_tuple[2].item() == pytest.approx(spectrum[-1].item(), abs=1e-10)

    with pytest.raises(ValueError):
        jnr_support(operators, [1.0, 1.0, 0.0])


def test_support_function_is_rotation_invariant():
    pair = build_canonical_pair(4)
    operators = [pair.q, pair.p, build_quadratics(pair).t]
    for direction in random_directions(10, 3, seed=3):
        n1, n2, n3 = direction.tolist()
        point = jnr_support(operators, direction)
        rotated = jnr_support(operators, [-n2, n1, n3])
        assert torch.dot(direction, point.expectation_tuple).item() == \
            pytest.approx(torch.dot(rotated.direction, rotated.expectation_tuple).item(), abs=1e-10)


def test_cross_section():
    pair = build_canonical_pair(3)
    spectrum = build_quadratics(pair).t.eigvalsh()
    t = 0.5 * (spectrum[0].item() + spectrum[-1].item())

    section = jnr_cross_section(pair, t, n_directions=20, seed=0, restarts=2)
    assert section.points.shape[0] > 0
    radii = torch.linalg.vector_norm(section.points, dim=1)
    assert radii.max().item() <= t + 1e-6
    assert section.det_min >= -1e-6
    assert section.det_min <= section.det_max + 1e-12


def test_cross_section_arguments():
    pair = build_canonical_pair(3)
    with pytest.raises(ValueError):
        jnr_cross_section(pair, 2.0, n_directions=10)
    with pytest.raises(InfeasibleTraceError):
        jnr_cross_section(pair, 100.0, n_directions=20)


def test_hull_distance():
    corners = torch.tensor([[x, y, z] for x in (1.0, 2.0) for y in (-1.0, 1.0) for z in (-1.0, 1.0)],
                           dtype=torch.float64)
    distance, inside = hull_distance(corners)
    assert distance == pytest.approx(1.0, abs=1e-6)
    assert not inside

    # nearest point is a vertex
    edge = torch.tensor([[1.0, 1.0, 0.0], [2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [1.0, 1.0, 1.0]], dtype=torch.float64)
    distance, _ = hull_distance(edge)
    assert distance == pytest.approx(math.sqrt(2.0), abs=1e-6)

    assert hull_distance(corners - torch.tensor([1.5, 0.0, 0.0], dtype=torch.float64)) == (0.0, True)

    segment = torch.tensor([[0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.25, 0.0]], dtype=torch.float64)
    assert hull_distance(segment) == (0.0, True)
    distance, inside = hull_distance(segment + torch.tensor([1.0, 0.0, 0.0], dtype=torch.float64))
    assert distance == pytest.approx(1.0, abs=1e-6)
    assert not inside


def test_qubit_cross_section():
    pair = build_canonical_pair(2)
    t = math.pi / 2
    section = jnr_cross_section(pair, t, n_directions=20, seed=0, restarts=2)
    assert section.converged
    assert section.origin_inside
    assert section.det_max == pytest.approx(t ** 2 / 4, abs=1e-12)
    assert section.det_min == pytest.approx(0.0, abs=1e-6)


@pytest.mark.slow
def test_cross_section_agrees_with_direct_optimization():
    pair = build_canonical_pair(3)
    t = torch.trace(build_quadratics(pair).t.matrix).real.item() / 3
    section = jnr_cross_section(pair, t, n_directions=48, seed=0, restarts=2)
    assert section.origin_inside
    assert section.det_max == pytest.approx(t ** 2 / 4, abs=1e-12)

    high = extremize_det_at_trace(pair, t, rank=3, direction="max", restarts=8, seed=1)
    assert high.det == pytest.approx(section.det_max, abs=1e-4)

    # zero-mean states are a subset of the states with tr Gamma = t
    low = extremize_det_at_trace(pair, t, rank=3, direction="min", restarts=8, seed=1)
    assert low.det <= section.det_min + 1e-6


def _region_polylines(samples, grid):
    curves = []
    for direction in ("min", "max"):
        chosen = sorted((s for s in samples if s.direction == direction), key=lambda s: s.trace)
        traces = np.array([s.trace for s in chosen])
        dets = np.array([s.det for s in chosen])
        curves.append(np.stack([grid, np.interp(grid, traces, dets)], axis=1))
        curves.append(np.stack([traces, dets], axis=1))
    return np.concatenate(curves)


def test_qubit_region_hausdorff_distance():
    pair = build_canonical_pair(2)
    samples = trace_det_region(pair, 40, rank=1, restarts=2, seed=0)

    grid = np.linspace(math.pi / 4, math.pi / 2, 2001)
    segment = np.stack([grid, np.zeros_like(grid)], axis=1)
    region = _region_polylines(samples, grid)

    distance = max(directed_hausdorff(region, segment)[0], directed_hausdorff(segment, region)[0])
    assert distance < 1e-3


@pytest.mark.slow
def test_pure_region_inside_mixed_region_on_trace_grid():
    pair = build_canonical_pair(3)
    pure = trace_det_region(pair, 40, rank=1, restarts=8, seed=5)
    mixed = trace_det_region(pair, 40, rank=3, restarts=8, seed=5)
    assert len(pure) == len(mixed) == 80

    for inner, outer in zip(pure, mixed):
        assert inner.t_target == outer.t_target
        assert inner.direction == outer.direction
        if inner.direction == "min":
            assert outer.det <= inner.det + 1e-6
        else:
            assert outer.det >= inner.det - 1e-6
