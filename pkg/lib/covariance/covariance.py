from typing import Sequence

import torch

from lib.structures import CovMatrix, HermitianOperator, QuantumState
from lib.utils.exceptions import DimensionError


def expectation(state: QuantumState, operator: HermitianOperator) -> float:
    return state.expect(operator)


def variance(state: QuantumState, operator: HermitianOperator) -> float:
    mean = state.expect(operator)
    return state.expect_product(operator, operator).real - mean ** 2


def covariance(state: QuantumState, a: HermitianOperator, b: HermitianOperator) -> complex:
    """Non-symmetric covariance <AB> - <A><B>."""
    return state.expect_product(a, b) - state.expect(a) * state.expect(b)


def _stack(state: QuantumState, observables: Sequence[HermitianOperator]) -> torch.Tensor:
    for observable in observables:
        state.check_operator(observable)
    return torch.stack([observable.matrix for observable in observables])


def cov_matrix(state: QuantumState, observables: Sequence[HermitianOperator]) -> CovMatrix:
    if len(observables) < 2:
        raise DimensionError(f"a covariance matrix needs at least two observables, got {len(observables)}")

    stack = _stack(state, observables)
    rho_t = state.density.T

    means = torch.einsum("ij,mij->m", rho_t, stack).real
    products = torch.einsum("ij,mik,nkj->mn", rho_t, stack, stack)
    entries = products - torch.outer(means, means).to(torch.complex128)

    return CovMatrix(entries)


def rs_inequality_gap(state: QuantumState, a: HermitianOperator, b: HermitianOperator) -> float:
    """Var(A)Var(B) - (|<[A,B]>|^2 + |<{A,B}> - 2<A><B>|^2) / 4, the determinant of Gamma(A, B)."""
    mean_a = state.expect(a)
    mean_b = state.expect(b)
    product = state.expect_product(a, b)

    var_a = state.expect_product(a, a).real - mean_a ** 2
    var_b = state.expect_product(b, b).real - mean_b ** 2

    # <[A,B]> = 2i Im<AB>, <{A,B}> = 2 Re<AB>
    commutator = 2 * product.imag
    anticommutator = 2 * product.real

    return var_a * var_b - 0.25 * (commutator ** 2 + (anticommutator - 2 * mean_a * mean_b) ** 2)


def transform(cov: CovMatrix, transformation: torch.Tensor) -> CovMatrix:
    """L Gamma L^T for the observables B_i = sum_j L_ij A_j."""
    transformation = torch.as_tensor(transformation, dtype=torch.float64)
    if transformation.ndim != 2 or transformation.shape[1] != cov.m:
        raise DimensionError(f"transformation of shape {tuple(transformation.shape)} does not act on "
                             f"{cov.m} observables")

    transformation = transformation.to(torch.complex128)
    return CovMatrix(transformation @ cov.entries @ transformation.T)


def concavity_check(first: QuantumState, second: QuantumState, p: float,
                    observables: Sequence[HermitianOperator]) -> torch.Tensor:
    """Gamma(p rho1 + (1-p) rho2) - p Gamma(rho1) - (1-p) Gamma(rho2), a real PSD matrix."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {p}")
    if first.dim != second.dim:
        raise DimensionError(f"state dimensions differ: {first.dim} vs {second.dim}")

    mixture = QuantumState(p * first.density + (1 - p) * second.density, first.dims)
    difference = cov_matrix(mixture, observables).entries \
        - p * cov_matrix(first, observables).entries \
        - (1 - p) * cov_matrix(second, observables).entries

    return difference.real
