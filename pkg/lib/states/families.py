import math
from typing import NamedTuple, Optional, Sequence

import torch

from lib.operators import build_canonical_pair, index_offsets, check_dim
from lib.structures import HermitianOperator, QuantumState
from lib.utils.exceptions import InvalidStateError
from lib.utils.logger import logger

FAMILIES = ("vacuum3", "squeezed3", "two_mode_squeezed", "max_entangled", "thermal")

VACUUM_NORM = math.sqrt(6 + 2 * math.sqrt(3))


class StateFamilyParams(NamedTuple):
    family: str
    xi: float = 0.0
    a: float = 1.0
    b: float = 1.0
    dim: int = 3
    temperature: float = 1.0
    hamiltonian: Optional[HermitianOperator] = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidStateError(f"unknown state family {self.family!r}, expected one of {FAMILIES}")
        if self.family == "thermal" and self.temperature <= 0:
            raise InvalidStateError(f"thermal temperature must be positive, got {self.temperature}")
        if not all(math.isfinite(v) for v in (self.xi, self.a, self.b)):
            raise InvalidStateError("family parameters must be finite reals")


def vacuum_d3() -> QuantumState:
    """Zero eigenvector of Q + iP at d=3."""
    vector = torch.tensor([1.0, 1.0 + math.sqrt(3), 1.0], dtype=torch.float64) / VACUUM_NORM
    return QuantumState.from_vector(vector)


def squeezed_d3(xi: float) -> QuantumState:
    if not math.isfinite(xi):
        raise InvalidStateError(f"squeezing parameter must be finite, got {xi}")

    alpha = math.sqrt(2) * math.pi * xi / (3 * math.sqrt(3))
    x = math.cos(alpha) + math.sqrt(2) * (1 + math.sqrt(3)) / 2 * math.sin(alpha)
    y = (1 + math.sqrt(3)) * math.cos(alpha) - math.sqrt(2) * math.sin(alpha)

    vector = torch.tensor([x, y, x], dtype=torch.float64) / VACUUM_NORM
    return QuantumState.from_vector(vector)


def squeezed_d3_trace(xi: float) -> float:
    """Sum of variances along the squeezed family."""
    return 2 * math.pi / 3 * (1 - math.cos(math.sqrt(8 / 27) * math.pi * xi) / math.sqrt(3))


def two_mode_squeezed(d: int, a: float, b: float) -> QuantumState:
    check_dim(d)
    if b == 0:
        raise InvalidStateError("squeezing parameter b must be nonzero")

    labels = index_offsets(d)
    n1 = labels[:, None]
    n2 = labels[None, :]
    exponent = -(math.pi / d) * (a * (n1 - n2) ** 2 + (n1 + n2) ** 2 / b)

    # composite index n1 * d + n2 is the row-major flattening
    exponent = exponent.reshape(-1)
    amplitudes = torch.exp(exponent - exponent.max())
    return QuantumState.from_vector(amplitudes, (d, d))


def max_entangled(d: int) -> QuantumState:
    check_dim(d)
    amplitudes = torch.eye(d, dtype=torch.float64).reshape(-1)
    return QuantumState.from_vector(amplitudes, (d, d))


def thermal_state(hamiltonian: HermitianOperator, temperature: float,
                  dims: Optional[Sequence[int]] = None) -> QuantumState:
    """exp(-H/T) / Z through the spectrum of H, shifted by the ground energy."""
    if not temperature > 0:
        raise InvalidStateError(f"temperature must be positive, got {temperature}")

    values, vectors = hamiltonian.eigh()
    weights = torch.exp(-(values - values[0]) / temperature)
    weights = weights / weights.sum()

    density = (vectors * weights.to(torch.complex128)) @ vectors.conj().T
    return QuantumState(density, dims)


def build_state(params: StateFamilyParams) -> QuantumState:
    params.validate()

    if params.family == "vacuum3":
        return vacuum_d3()
    if params.family == "squeezed3":
        return squeezed_d3(params.xi)
    if params.family == "two_mode_squeezed":
        return two_mode_squeezed(params.dim, params.a, params.b)
    if params.family == "max_entangled":
        return max_entangled(params.dim)

    hamiltonian = params.hamiltonian
    dims = None
    if hamiltonian is None:
        from lib.entanglement import witness_hamiltonian
        hamiltonian = witness_hamiltonian(build_canonical_pair(params.dim))
        dims = (params.dim, params.dim)
        logger.debug(f"thermal state of the witness Hamiltonian at d={params.dim}")
    return thermal_state(hamiltonian, params.temperature, dims)
