from typing import List, NamedTuple, Tuple

import torch

from lib.config import config
from lib.covariance import covariance, variance
from lib.structures import HermitianOperator, QuantumState
from lib.utils import logger
from lib.utils.exceptions import DimensionError


class MinUncSolution(NamedTuple):
    lam: complex
    eigenvalue_z: complex
    state: QuantumState
    covariances: Tuple[float, float, float]
    commutator_expectation: float
    residual: float
    a: HermitianOperator
    b: HermitianOperator
    defective: bool = False
    eigenstate_of: str = ""


class MinUncReport(NamedTuple):
    lam: complex
    solutions: List[MinUncSolution]
    discarded: int
    rejected: int
    defective: bool


def half_commutator(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """C = -(i/2)[A, B]"""
    return 0.5 * HermitianOperator.commutator(a, b)


def _polish(matrix: torch.Tensor, vector: torch.Tensor, value: complex) -> torch.Tensor:
    # one inverse-iteration step with a slightly shifted eigenvalue
    shift = value + 1e-10 * (1 + abs(value))
    identity = torch.eye(matrix.shape[0], dtype=torch.complex128)
    try:
        polished = torch.linalg.solve(matrix - shift * identity, vector)
    except RuntimeError:
        return vector
    norm = torch.linalg.vector_norm(polished)
    if not torch.isfinite(norm) or norm.item() == 0.0:
        return vector
    return polished / norm


def _residual(matrix: torch.Tensor, vector: torch.Tensor) -> Tuple[complex, float]:
    image = matrix @ vector
    value = torch.vdot(vector, image)
    return value.item(), torch.linalg.vector_norm(image - value * vector).item()


def minunc_report(a: HermitianOperator, b: HermitianOperator, lam: complex) -> MinUncReport:
    a.check_dim(b)
    lam = complex(lam)
    if lam.real <= 0:
        raise ValueError(f"Re(lambda) must be positive, got {lam}; the boundary cases Re(lambda) <= 0 are covered "
                         f"by the eigenstates of A and B")

    tolerance = config.MINUNC.RESIDUAL_TOL
    matrix = lam * a.matrix + 1j * b.matrix
    values, vectors = torch.linalg.eig(matrix)

    defective = torch.linalg.cond(vectors).item() > config.MINUNC.CONDITION_LIMIT
    if defective:
        logger.warning(f"minunc lambda={lam}: eigenvector matrix is ill conditioned, eigenspace likely defective")

    c_operator = half_commutator(a, b)
    solutions, discarded, rejected = [], 0, 0
    for index in range(values.shape[0]):
        vector = vectors[:, index] / torch.linalg.vector_norm(vectors[:, index])
        value, residual = _residual(matrix, vector)

        polished = _polish(matrix, vector, value)
        polished_value, polished_residual = _residual(matrix, polished)
        if polished_residual < residual:
            vector, value, residual = polished, polished_value, polished_residual

        if residual > tolerance:
            rejected += 1
            logger.warning(f"minunc lambda={lam}: eigenpair {index} rejected, residual {residual:.3e}")
            continue

        state = QuantumState.from_vector(vector)
        c_value = state.expect(c_operator)
        if c_value * lam.real < -tolerance:
            discarded += 1
            continue

        var_a = variance(state, a)
        var_b = variance(state, b)
        cov_ab = covariance(state, a, b).real

        eigenstate_of = ""
        if var_a < 1e-10:
            eigenstate_of = "a"
        elif var_b < 1e-10:
            eigenstate_of = "b"

        solutions.append(MinUncSolution(lam, value, state, (var_a, var_b, cov_ab), c_value, residual, a, b,
                                        defective, eigenstate_of))

    if discarded:
        logger.info(f"minunc lambda={lam}: discarded {discarded} solutions with <C> Re(lambda) < 0")
    return MinUncReport(lam, solutions, discarded, rejected, defective)


def solve_minunc(a: HermitianOperator, b: HermitianOperator, lam: complex) -> List[MinUncSolution]:
    """Eigenpairs of lambda A + i B, each a state saturating the Robertson-Schroedinger relation."""
    return minunc_report(a, b, lam).solutions


def _deviations(solution: MinUncSolution) -> Tuple[torch.Tensor, torch.Tensor]:
    vector = solution.state.pure_vector()
    if vector.shape[0] != solution.a.dim:
        raise DimensionError("solution state does not match its observables")
    dev_a = solution.a.matrix @ vector - solution.state.expect(solution.a) * vector
    dev_b = solution.b.matrix @ vector - solution.state.expect(solution.b) * vector
    return dev_a, dev_b


def verify_parallelism(solution: MinUncSolution) -> float:
    """|| lambda (A - <A>)|psi> + i (B - <B>)|psi> ||, zero exactly when (lambda A + i B)|psi> = z|psi>."""
    dev_a, dev_b = _deviations(solution)
    return torch.linalg.vector_norm(solution.lam * dev_a + 1j * dev_b).item()


def saturation_relations(solution: MinUncSolution) -> Tuple[float, float]:
    """Residuals of Var B = |l|^2 Var A and l Var A = -i Cov(A, B), both implied by (B - <B>)|psi> = i l (A - <A>)|psi>."""
    var_a, var_b, _ = solution.covariances
    cov_ab = covariance(solution.state, solution.a, solution.b)
    lam = solution.lam
    return abs(var_b - abs(lam) ** 2 * var_a), abs(lam * var_a + 1j * cov_ab)
