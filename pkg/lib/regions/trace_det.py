from typing import List, NamedTuple, Optional

import torch
from tqdm import tqdm

from lib.config import config
from lib.covariance import cov_matrix
from lib.operators import CanonicalPair
from lib.solver import FactorProblem, moment_operators, optimize_with_restarts
from lib.states import from_factor
from lib.structures import QuantumState
from lib.utils import logger, split_seed
from lib.utils.exceptions import InfeasibleTraceError
from .extrema import max_sum_variances, min_sum_variances, trace_bounds

DIRECTIONS = ("min", "max")
QUANTITIES = ("hermitian", "symmetric")


class RegionSample(NamedTuple):
    t_target: float
    trace: float
    det: float
    state: QuantumState
    rank: int
    direction: str
    converged: bool
    restarts_used: int
    boundary: bool = False


def sample_values(pair: CanonicalPair, state: QuantumState, quantity: str = "hermitian"):
    cov = cov_matrix(state, [pair.q, pair.p])
    return cov.trace, cov.det if quantity == "hermitian" else cov.sym_det


def _boundary_sample(pair: CanonicalPair, t: float, rank: int, direction: str, quantity: str,
                     lower: bool) -> RegionSample:
    # at tau_min the feasible set is the minimizer orbit, at tau_max the top eigenstate of T
    extremum = min_sum_variances(pair) if lower else max_sum_variances(pair)
    candidates = [sample_values(pair, point.state, quantity) + (point.state,) for point in extremum.multiplicity_orbit]
    sign = 1 if direction == "min" else -1
    trace, det, state = min(candidates, key=lambda c: sign * c[1])
    return RegionSample(t, trace, det, state, rank, direction, extremum.converged, 0, boundary=True)


def extremize_det_at_trace(pair: CanonicalPair, t: float, rank: int = 1, direction: str = "min",
                           restarts: Optional[int] = None, seed: int = 0, quantity: str = "hermitian",
                           num_workers: Optional[int] = None) -> RegionSample:
    """Extremize det Gamma(Q, P) over rank-`rank` states with tr Gamma(Q, P) = t."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    if not 1 <= rank <= pair.dim:
        raise ValueError(f"rank must lie in 1..{pair.dim}, got {rank}")
    restarts = config.SOLVER.RESTARTS if restarts is None else restarts

    tau_min, tau_max = trace_bounds(pair)
    tolerance = config.SOLVER.BOUNDARY_TOL
    if t < tau_min - tolerance or t > tau_max + tolerance:
        raise InfeasibleTraceError(t, tau_min, tau_max)
    if t <= tau_min + tolerance:
        return _boundary_sample(pair, t, rank, direction, quantity, lower=True)
    if t >= tau_max - tolerance:
        return _boundary_sample(pair, t, rank, direction, quantity, lower=False)

    problem = FactorProblem(operators=moment_operators(pair),
                            rank=rank,
                            objective="det" if quantity == "hermitian" else "sym_det",
                            constraint="trace",
                            targets=torch.tensor([t], dtype=torch.float64),
                            sense=1 if direction == "min" else -1)
    best, _ = optimize_with_restarts(problem, restarts, seed, num_workers)

    state = from_factor(best.factor)
    trace, det = sample_values(pair, state, quantity)
    sample = RegionSample(t, trace, det, state, rank, direction, best.converged, restarts)

    if rank > 1:
        # pure states are feasible rank-d points
        pure = extremize_det_at_trace(pair, t, 1, direction, restarts, seed, quantity, num_workers)
        sign = 1 if direction == "min" else -1
        if pure.converged and (not sample.converged or sign * pure.det < sign * sample.det):
            sample = pure._replace(rank=rank, restarts_used=restarts)

    if not sample.converged:
        logger.warning(f"d={pair.dim} rank={rank} t={t:.6f} {direction}: trace constraint not met "
                       f"(|tr - t| = {abs(sample.trace - t):.3e})")
    return sample


def trace_det_region(pair: CanonicalPair, n_trace_samples: int, rank: int = 1, restarts: Optional[int] = None,
                     seed: int = 0, num_workers: Optional[int] = None) -> List[RegionSample]:
    """Min- and max-det samples on a uniform trace grid over [tau_min, tau_max]."""
    if n_trace_samples < 2:
        raise ValueError(f"n_trace_samples must be at least 2, got {n_trace_samples}")

    tau_min, tau_max = trace_bounds(pair)
    traces = torch.linspace(tau_min, tau_max, n_trace_samples, dtype=torch.float64).tolist()

    samples = []
    for index, t in enumerate(tqdm(traces, desc=f"region d={pair.dim} rank={rank}", leave=False)):
        for direction_index, direction in enumerate(DIRECTIONS):
            sample_seed = split_seed(seed, index, direction_index)
            samples.append(extremize_det_at_trace(pair, t, rank, direction, restarts, sample_seed,
                                                  num_workers=num_workers))

    failed = sum(not s.converged for s in samples)
    if failed:
        logger.warning(f"trace_det_region d={pair.dim} rank={rank}: {failed}/{len(samples)} samples not converged")
    return samples
