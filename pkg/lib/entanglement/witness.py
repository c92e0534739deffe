from typing import List, NamedTuple, Optional, Sequence, Tuple

import torch
from tqdm import tqdm

from lib.config import config
from lib.covariance import cov_matrix, variance
from lib.operators import CanonicalPair, build_canonical_pair
from lib.regions import trace_bounds
from lib.states import random_separable_state, thermal_state, two_mode_squeezed
from lib.structures import CovMatrix, HermitianOperator, QuantumState
from lib.utils import logger, make_generator, parallel_map
from lib.utils.exceptions import DimensionError

ENTANGLED = "entangled"
UNDETECTED = "undetected"


class BipartiteCov(NamedTuple):
    gamma_full: CovMatrix
    block_a: torch.Tensor
    block_b: torch.Tensor
    cross: torch.Tensor


class WitnessResult(NamedTuple):
    lhs: float
    bound: float
    delta_tilde: float
    verdict: str


class LocalOperators(NamedTuple):
    q1: HermitianOperator
    p1: HermitianOperator
    q2: HermitianOperator
    p2: HermitianOperator


class ThermalRow(NamedTuple):
    dim: int
    temperature: float
    delta_tilde: float
    verdict: str


class SqueezingRow(NamedTuple):
    dim: int
    a: float
    b: float
    delta_tilde: float
    verdict: str


def local_operators(pair: CanonicalPair) -> LocalOperators:
    identity = HermitianOperator.identity(pair.dim)
    return LocalOperators(q1=pair.q.kron(identity),
                          p1=pair.p.kron(identity),
                          q2=identity.kron(pair.q),
                          p2=identity.kron(pair.p))


def witness_hamiltonian(pair: CanonicalPair) -> HermitianOperator:
    """(Q1 - Q2)^2 + (P1 + P2)^2, whose unique ground state is the maximally entangled state."""
    ops = local_operators(pair)
    return (ops.q1 - ops.q2).square() + (ops.p1 + ops.p2).square()


def _check_bipartite(state: QuantumState, pair: CanonicalPair) -> None:
    if state.dim != pair.dim ** 2:
        raise DimensionError(f"state of dim {state.dim} is not a pair of d={pair.dim} systems")


def bipartite_cov(state: QuantumState, pair: CanonicalPair) -> BipartiteCov:
    """Gamma(Q1, P1, Q2, P2) split into local blocks and the cross block."""
    _check_bipartite(state, pair)
    gamma = cov_matrix(state, list(local_operators(pair)))
    return BipartiteCov(gamma_full=gamma,
                        block_a=gamma.entries[:2, :2],
                        block_b=gamma.entries[2:, 2:],
                        cross=gamma.entries[:2, 2:])


def witness_lhs(state: QuantumState, pair: CanonicalPair) -> float:
    """Var(Q1 - Q2) + Var(P1 + P2)"""
    _check_bipartite(state, pair)
    ops = local_operators(pair)
    return variance(state, ops.q1 - ops.q2) + variance(state, ops.p1 + ops.p2)


def witness_lhs_from_blocks(cov: BipartiteCov) -> float:
    """tr(Z Gamma_s) with Z = w1 w1^T + w2 w2^T, w1 = (1, 0, -1, 0), w2 = (0, 1, 0, 1)."""
    weights = torch.tensor([[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, 1.0]], dtype=torch.float64)
    return torch.einsum("ai,ij,aj->", weights, cov.gamma_full.sym, weights).item()


def separable_bound(pair: CanonicalPair) -> float:
    """2U with U the least sum of variances over pure states."""
    return 2 * trace_bounds(pair)[0]


def duan_witness(state: QuantumState, pair: CanonicalPair, bound: Optional[float] = None) -> WitnessResult:
    bound = separable_bound(pair) if bound is None else bound
    lhs = witness_lhs(state, pair)
    delta = lhs - bound
    verdict = ENTANGLED if delta < -config.ENTANGLEMENT.VERDICT_TOL else UNDETECTED
    return WitnessResult(lhs, bound, delta, verdict)


def temperature_grid(t_min: Optional[float] = None, t_max: Optional[float] = None,
                     step: Optional[float] = None) -> List[float]:
    t_min = config.ENTANGLEMENT.T_MIN if t_min is None else t_min
    t_max = config.ENTANGLEMENT.T_MAX if t_max is None else t_max
    step = config.ENTANGLEMENT.T_STEP if step is None else step
    if not step > 0:
        raise ValueError(f"temperature step must be positive, got {step}")
    if not 0 < t_min <= t_max:
        raise ValueError(f"temperature range must satisfy 0 < t_min <= t_max, got [{t_min}, {t_max}]")

    count = int((t_max - t_min) / step + 1e-9) + 1
    # rounded so grid points print as the decimals they stand for
    return [round(t_min + k * step, 12) for k in range(count)]


class _ThermalItem(NamedTuple):
    dim: int
    temperature: float
    bound: float


def _thermal_row(item: _ThermalItem) -> ThermalRow:
    pair = build_canonical_pair(item.dim)
    state = thermal_state(witness_hamiltonian(pair), item.temperature, (item.dim, item.dim))
    result = duan_witness(state, pair, item.bound)
    return ThermalRow(item.dim, item.temperature, result.delta_tilde, result.verdict)


def thermal_scan(pair: CanonicalPair, t_min: Optional[float] = None, t_max: Optional[float] = None,
                 step: Optional[float] = None, num_workers: Optional[int] = None) -> List[ThermalRow]:
    bound = separable_bound(pair)
    items = [_ThermalItem(pair.dim, t, bound) for t in temperature_grid(t_min, t_max, step)]
    rows = parallel_map(_thermal_row, tqdm(items, desc=f"thermal d={pair.dim}", leave=False), num_workers)

    increases = [b.delta_tilde - a.delta_tilde for a, b in zip(rows, rows[1:])]
    if increases and min(increases) < -1e-6:
        logger.warning(f"thermal scan d={pair.dim}: witness gap decreases with temperature somewhere on the grid")
    return rows


def thermal_threshold(pair: CanonicalPair, t_min: Optional[float] = None, t_max: Optional[float] = None,
                      step: Optional[float] = None, num_workers: Optional[int] = None) -> Optional[float]:
    """Largest grid temperature at which the thermal witness state is still detected, None if never."""
    rows = thermal_scan(pair, t_min, t_max, step, num_workers)
    detected = [row.temperature for row in rows if row.verdict == ENTANGLED]
    if not detected:
        logger.info(f"thermal threshold d={pair.dim}: none detected")
        return None
    return max(detected)


def squeezing_scan(d: int, a: Optional[float] = None, b_values: Optional[Sequence[float]] = None) -> List[SqueezingRow]:
    """Witness gap of the two-mode squeezed family at fixed a over b."""
    a = config.ENTANGLEMENT.SQUEEZING_A if a is None else a
    if b_values is None:
        lower, upper = config.ENTANGLEMENT.SQUEEZING_B
        b_values = torch.linspace(lower, upper, config.ENTANGLEMENT.SQUEEZING_SAMPLES, dtype=torch.float64).tolist()

    pair = build_canonical_pair(d)
    bound = separable_bound(pair)
    rows = []
    for b in b_values:
        result = duan_witness(two_mode_squeezed(d, a, b), pair, bound)
        rows.append(SqueezingRow(d, a, float(b), result.delta_tilde, result.verdict))
    return rows


def separable_false_positives(d: int, count: int, n_terms: Sequence[int] = (1, 3),
                              seed: int = 0) -> Tuple[int, float]:
    """Number of random separable states flagged entangled and the smallest gap seen."""
    pair = build_canonical_pair(d)
    bound = separable_bound(pair)
    generator = make_generator(seed)

    flagged, smallest = 0, float("inf")
    for index in range(count):
        state = random_separable_state(d, n_terms[index % len(n_terms)], generator)
        result = duan_witness(state, pair, bound)
        smallest = min(smallest, result.delta_tilde)
        flagged += result.verdict == ENTANGLED
    return flagged, smallest
