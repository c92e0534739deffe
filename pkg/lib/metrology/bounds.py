from typing import Optional, Sequence

import torch

from lib.config import config
from lib.covariance import cov_matrix, variance
from lib.structures import HermitianOperator, QuantumState, exp_hermitian
from lib.utils.exceptions import DimensionError, IllConditionedError, InsensitiveMeasurementError, \
    InvalidStateError


def _require_pure(state: QuantumState, name: str) -> None:
    if not state.is_pure:
        raise InvalidStateError(f"{name} needs a pure state, got purity {state.purity:.12f}")


def symmetric_covariance(state: QuantumState, observables: Sequence[HermitianOperator]) -> torch.Tensor:
    """Real part of Gamma, also for a single observable."""
    if len(observables) == 0:
        raise DimensionError("need at least one observable")
    if len(observables) == 1:
        return torch.tensor([[variance(state, observables[0])]], dtype=torch.float64)
    return cov_matrix(state, observables).sym


def qfim_pure(state: QuantumState, generators: Sequence[HermitianOperator]) -> torch.Tensor:
    """Quantum Fisher information matrix of e^{i sum_k theta_k H_k} on a pure state: 4 Gamma_s(H)."""
    _require_pure(state, "qfim_pure")
    return 4 * symmetric_covariance(state, generators)


def saturability_matrix(state: QuantumState, generators: Sequence[HermitianOperator]) -> torch.Tensor:
    """J_mn = -2i <[H_m, H_n]>; the matrix bound is attainable iff J vanishes."""
    _require_pure(state, "saturability_matrix")
    count = len(generators)
    matrix = torch.zeros(count, count, dtype=torch.float64)
    for m in range(count):
        for n in range(m + 1, count):
            value = 2 * state.expect(HermitianOperator.commutator(generators[m], generators[n]))
            matrix[m, n] = value
            matrix[n, m] = -value
    return matrix


def fidelity_curve(state: QuantumState, generator: HermitianOperator, thetas: torch.Tensor) -> torch.Tensor:
    """|<psi| e^{i theta H} |psi>|^2"""
    _require_pure(state, "fidelity_curve")
    vector = state.pure_vector()
    values = []
    for theta in torch.as_tensor(thetas, dtype=torch.float64).reshape(-1).tolist():
        amplitude = torch.vdot(vector, exp_hermitian(generator, theta).apply(vector))
        values.append(amplitude.abs().item() ** 2)
    return torch.tensor(values, dtype=torch.float64)


def qfi_finite_difference(state: QuantumState, generator: HermitianOperator, step: Optional[float] = None) -> float:
    """QFI = -2 F''(0) from a central difference of the fidelity curve."""
    step = config.METROLOGY.FD_STEP if step is None else step
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    thetas = torch.tensor([-step, 0.0, step], dtype=torch.float64)
    f_minus, f_zero, f_plus = fidelity_curve(state, generator, thetas).tolist()
    return -2 * (f_plus - 2 * f_zero + f_minus) / step ** 2


def qcrb_scalar(qfim: torch.Tensor, weight: Optional[torch.Tensor] = None) -> float:
    """tr(W F^-1), the weighted scalar Cramer-Rao bound; W defaults to the identity."""
    qfim = torch.as_tensor(qfim, dtype=torch.float64)
    if weight is None:
        weight = torch.eye(qfim.shape[0], dtype=torch.float64)
    weight = torch.as_tensor(weight, dtype=torch.float64)
    if weight.shape != qfim.shape:
        raise DimensionError(f"weight of shape {tuple(weight.shape)} for QFIM of shape {tuple(qfim.shape)}")

    if torch.linalg.cond(qfim).item() > config.METROLOGY.CONDITION_LIMIT:
        raise IllConditionedError("QFIM is singular, some parameter combination is not encoded")
    return torch.trace(weight @ torch.linalg.inv(qfim)).item()


def commutator_jacobian(state: QuantumState, measured: Sequence[HermitianOperator],
                        generators: Sequence[HermitianOperator]) -> torch.Tensor:
    """C_ij = -i <[M_i, H_j]>"""
    jacobian = torch.zeros(len(measured), len(generators), dtype=torch.float64)
    for i, m in enumerate(measured):
        for j, h in enumerate(generators):
            jacobian[i, j] = state.expect(HermitianOperator.commutator(m, h))
    return jacobian


def moment_matrix(state: QuantumState, measured: Sequence[HermitianOperator],
                  generators: Sequence[HermitianOperator]) -> torch.Tensor:
    """C^T Gamma_s(M)^-1 C, the inverse asymptotic covariance of the method-of-moments estimator per shot."""
    jacobian = commutator_jacobian(state, measured, generators)
    if jacobian.abs().max().item() < 1e-12:
        raise InsensitiveMeasurementError("all commutators between measured observables and generators vanish")

    gamma = symmetric_covariance(state, measured)
    condition = torch.linalg.cond(gamma).item()
    if not condition < config.METROLOGY.CONDITION_LIMIT:
        raise IllConditionedError(f"covariance of the measured observables has condition number {condition:.3e}; "
                                  f"choose a measured set whose fluctuations are not degenerate")

    return jacobian.T @ torch.linalg.solve(gamma, jacobian)
