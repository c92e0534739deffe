from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import torch
from tqdm import tqdm

from lib.config import config
from lib.operators import CanonicalPair, build_canonical_pair
from lib.solver import FactorProblem, moment_operators, optimize_with_restarts
from lib.states import from_factor
from lib.structures import QuantumState
from lib.utils import logger, split_seed
from .bounds import moment_matrix, qcrb_scalar, qfim_pure, saturability_matrix


class AccuracyOptimum(NamedTuple):
    value: float
    state: QuantumState
    factor: torch.Tensor
    saturability_residual: float
    converged: bool


class AccuracyReport(NamedTuple):
    dim: int
    a_d: float
    a_d_c: float
    a_d_m: float
    gap_delta: float
    state_a_d: QuantumState
    state_a_d_c: QuantumState
    saturability_residual: float
    converged: bool


class AccuracyScan(NamedTuple):
    reports: List[AccuracyReport]
    slope: float
    intercept: float
    gap_decreasing: bool


def accuracy_value(pair: CanonicalPair, state: QuantumState) -> float:
    """tr(F^-1) for the displacement generators (Q, P), i.e. tr(Gamma_s^-1) / 4."""
    return qcrb_scalar(qfim_pure(state, [pair.q, pair.p]))


def optimize_a_d(pair: CanonicalPair, restarts: Optional[int] = None, seed: int = 0, constrained: bool = False,
                 num_workers: Optional[int] = None, initial_factors: Sequence[torch.Tensor] = ()) -> AccuracyOptimum:
    """Minimize tr(Gamma_s(Q, P)^-1) / 4 over pure states, optionally with <-i[Q, P]> = 0."""
    restarts = config.SOLVER.RESTARTS if restarts is None else restarts
    problem = FactorProblem(operators=moment_operators(pair),
                            rank=1,
                            objective="inverse_trace",
                            constraint="commutator" if constrained else "none",
                            params=torch.tensor([config.METROLOGY.DET_FLOOR], dtype=torch.float64),
                            targets=torch.tensor([0.0], dtype=torch.float64))
    best, _ = optimize_with_restarts(problem, restarts, seed, num_workers, initial_factors=initial_factors)

    state = from_factor(best.factor)
    residual = saturability_matrix(state, [pair.q, pair.p]).abs().max().item()
    converged = best.converged
    if constrained and residual >= config.METROLOGY.SATURABILITY_TOL:
        converged = False
        logger.warning(f"optimize_a_d d={pair.dim}: saturability residual {residual:.3e}")

    return AccuracyOptimum(accuracy_value(pair, state), state, best.factor, residual, converged)


def accuracy_report(d: int, restarts: Optional[int] = None, seed: int = 0,
                    num_workers: Optional[int] = None) -> AccuracyReport:
    pair = build_canonical_pair(d)

    saturable = optimize_a_d(pair, restarts, split_seed(seed, d, 1), True, num_workers)
    # the saturable optimum is a feasible start, so a_d never exceeds a_d_c
    optimal = optimize_a_d(pair, restarts, split_seed(seed, d, 0), False, num_workers,
                           initial_factors=[saturable.factor])

    moments = moment_matrix(optimal.state, [pair.q, pair.p], [pair.q, pair.p])
    a_d_m = qcrb_scalar(moments)

    return AccuracyReport(dim=d,
                          a_d=optimal.value,
                          a_d_c=saturable.value,
                          a_d_m=a_d_m,
                          gap_delta=a_d_m - optimal.value,
                          state_a_d=optimal.state,
                          state_a_d_c=saturable.state,
                          saturability_residual=saturable.saturability_residual,
                          converged=optimal.converged and saturable.converged)


def scaling_fit(dims: Sequence[int], values: Sequence[float]):
    """Least-squares slope and intercept of log(value) against log(d)."""
    slope, intercept = np.polyfit(np.log(np.asarray(dims, dtype=np.float64)),
                                  np.log(np.asarray(values, dtype=np.float64)), 1)
    return float(slope), float(intercept)


def accuracy_scan(d_list: Sequence[int], restarts: Optional[int] = None, seed: int = 0,
                  num_workers: Optional[int] = None) -> AccuracyScan:
    if len(d_list) == 0:
        raise ValueError("d_list must not be empty")

    reports = [accuracy_report(d, restarts, seed, num_workers) for d in tqdm(list(d_list), desc="accuracy scan")]
    for report in reports:
        logger.info(f"d={report.dim}: A_d={report.a_d:.10e} A_d^c={report.a_d_c:.10e} "
                    f"A_d^M={report.a_d_m:.10e} gap={report.gap_delta:.3e}")
        if not report.converged:
            logger.warning(f"accuracy scan d={report.dim}: optimizer did not converge")

    if len(reports) > 1:
        slope, intercept = scaling_fit([r.dim for r in reports], [r.a_d for r in reports])
    else:
        slope, intercept = float("nan"), float("nan")

    ordered = sorted(reports, key=lambda r: r.dim)
    gap_decreasing = all(b.gap_delta < a.gap_delta + 1e-6 for a, b in zip(ordered, ordered[1:]))
    return AccuracyScan(reports, slope, intercept, gap_decreasing)
