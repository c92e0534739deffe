from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

import torch
from scipy.optimize import brentq, minimize_scalar

from lib.config import config
from lib.operators import CanonicalPair, build_quadratics
from lib.structures import QuantumState
from lib.utils.logger import logger


class OrbitPoint(NamedTuple):
    centers: Tuple[float, float]
    state: QuantumState


class VarianceExtremum(NamedTuple):
    value: float
    centers: Tuple[float, float]
    state: QuantumState
    multiplicity_orbit: List[OrbitPoint]
    converged: bool = True


def shifted_oscillator(pair: CanonicalPair, q: float, p: float) -> torch.Tensor:
    """(Q - q)^2 + (P - p)^2"""
    identity = torch.eye(pair.dim, dtype=torch.complex128)
    return build_quadratics(pair).t.matrix - 2 * q * pair.q.matrix - 2 * p * pair.p.matrix \
        + (q ** 2 + p ** 2) * identity


def lowest_level(pair: CanonicalPair, q: float, p: float) -> float:
    return torch.linalg.eigvalsh(shifted_oscillator(pair, q, p))[0].item()


def level_slopes(pair: CanonicalPair, q: float, p: float) -> Tuple[float, float]:
    """Gradient of the lowest level in (q, p): 2 (q - <Q>), 2 (p - <P>) on its eigenvector."""
    _, vectors = torch.linalg.eigh(shifted_oscillator(pair, q, p))
    vector = vectors[:, 0]
    mean_q = torch.vdot(vector, pair.q.matrix @ vector).real.item()
    mean_p = torch.vdot(vector, pair.p.matrix @ vector).real.item()
    return 2 * (q - mean_q), 2 * (p - mean_p)


def _coordinate_step(level, slope, x: float, step: float, tolerance: float) -> float:
    lower, upper = x - step, x + step
    if slope(lower) < 0 < slope(upper):
        return brentq(slope, lower, upper, xtol=tolerance)
    return minimize_scalar(level, bounds=(lower, upper), method="bounded", options={"xatol": tolerance}).x


def _grid_minimum(pair: CanonicalPair, grid_n: int) -> Tuple[float, float, float]:
    # odd point count so the grid contains the origin
    count = grid_n + 1 - grid_n % 2
    radius = pair.scale * (pair.dim - 1) / 2
    grid = torch.linspace(-radius, radius, count, dtype=torch.float64)

    t = build_quadratics(pair).t.matrix
    identity = torch.eye(pair.dim, dtype=torch.complex128)

    best = (float("inf"), 0.0, 0.0)
    for q in grid.tolist():
        base = t - 2 * q * pair.q.matrix + q ** 2 * identity
        batch = base[None] - 2 * grid[:, None, None] * pair.p.matrix[None] + (grid ** 2)[:, None, None] * identity[None]
        levels = torch.linalg.eigvalsh(batch)[:, 0]
        index = int(torch.argmin(levels).item())
        if levels[index].item() < best[0]:
            best = (levels[index].item(), q, grid[index].item())

    return best


def _orbit(pair: CanonicalPair, state: QuantumState, centers: Tuple[float, float]) -> List[OrbitPoint]:
    """Images under F-conjugation, which rotates (<Q>, <P>) by pi/2."""
    tolerance = config.REGIONS.CENTER_TOL
    fourier = pair.fourier.matrix

    orbit = [OrbitPoint(centers, state)]
    vector = state.pure_vector()
    q, p = centers
    for _ in range(3):
        vector = fourier @ vector
        q, p = -p, q
        candidate = QuantumState.from_vector(vector)
        duplicate = any(abs(q - o.centers[0]) < tolerance and abs(p - o.centers[1]) < tolerance
                        and candidate.overlap(o.state) > 1 - 1e-8 for o in orbit)
        if not duplicate:
            orbit.append(OrbitPoint((q, p), candidate))

    return orbit


def min_sum_variances(pair: CanonicalPair, grid_n: Optional[int] = None,
                      refine_tol: Optional[float] = None, max_sweeps: Optional[int] = None) -> VarianceExtremum:
    """tau_min = min over (q, p) of the lowest eigenvalue of (Q - q)^2 + (P - p)^2.

    Grid search over the spectral box followed by coordinate descent on (q, p).
    """
    grid_n = config.REGIONS.GRID_N if grid_n is None else grid_n
    refine_tol = config.REGIONS.REFINE_TOL if refine_tol is None else refine_tol
    max_sweeps = config.REGIONS.MAX_SWEEPS if max_sweeps is None else max_sweeps
    if grid_n < 8:
        raise ValueError(f"grid_n must be at least 8, got {grid_n}")

    _, q, p = _grid_minimum(pair, grid_n)
    step = pair.scale * (pair.dim - 1) / grid_n

    converged = False
    for sweep in range(max_sweeps):
        new_q = _coordinate_step(lambda x: lowest_level(pair, x, p), lambda x: level_slopes(pair, x, p)[0],
                                 q, step, refine_tol)
        q_move, q = abs(new_q - q), new_q
        new_p = _coordinate_step(lambda x: lowest_level(pair, q, x), lambda x: level_slopes(pair, q, x)[1],
                                 p, step, refine_tol)
        p_move, p = abs(new_p - p), new_p

        if max(q_move, p_move) < refine_tol:
            converged = True
            break
    else:
        logger.warning(f"min_sum_variances d={pair.dim}: refinement stopped after {max_sweeps} sweeps")

    values, vectors = torch.linalg.eigh(shifted_oscillator(pair, q, p))
    state = QuantumState.from_vector(vectors[:, 0])

    if pair.dim % 2 == 1 and max(abs(q), abs(p)) >= config.REGIONS.CENTER_TOL:
        logger.warning(f"min_sum_variances d={pair.dim}: odd-dimension minimizer off axis at ({q:.3e}, {p:.3e})")

    centers = (q, p)
    return VarianceExtremum(values[0].item(), centers, state, _orbit(pair, state, centers), converged)


def max_sum_variances(pair: CanonicalPair) -> VarianceExtremum:
    """tau_max = lambda_max(T), attained by a top eigenvector of T with <Q> = <P> = 0.

    F commutes with T and rotates (Q, P) by a quarter turn, so an F eigenvector inside a degenerate top eigenspace
    has vanishing means.
    """
    values, vectors = build_quadratics(pair).t.eigh()
    top = values[-1].item()
    basis = vectors[:, values >= top - config.REGIONS.DEGENERACY_TOL]
    if basis.shape[1] > 1:
        logger.debug(f"max_sum_variances d={pair.dim}: top eigenvalue of T has multiplicity {basis.shape[1]}")
        _, rotations = torch.linalg.eig(basis.conj().T @ pair.fourier.matrix @ basis)
        vector = basis @ rotations[:, 0]
    else:
        vector = basis[:, 0]

    state = QuantumState.from_vector(vector / torch.linalg.vector_norm(vector))
    centers = (0.0, 0.0)
    return VarianceExtremum(top, centers, state, [OrbitPoint(centers, state)])


@lru_cache(maxsize=None)
def _trace_bounds(d: int, grid_n: int, refine_tol: float) -> Tuple[float, float]:
    from lib.operators import build_canonical_pair

    pair = build_canonical_pair(d)
    return min_sum_variances(pair, grid_n, refine_tol).value, max_sum_variances(pair).value


def trace_bounds(pair: CanonicalPair) -> Tuple[float, float]:
    """(tau_min, tau_max), cached per dimension."""
    return _trace_bounds(pair.dim, config.REGIONS.GRID_N, config.REGIONS.REFINE_TOL)
