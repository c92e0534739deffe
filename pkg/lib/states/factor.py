from typing import Optional, Sequence

import torch

from lib.structures import QuantumState
from lib.structures.operator import as_complex
from lib.utils.exceptions import DimensionError, InvalidStateError


def from_factor(factor: torch.Tensor, dims: Optional[Sequence[int]] = None) -> QuantumState:
    """rho = A A^dag / tr(A A^dag); positivity holds by construction."""
    factor = as_complex(factor)
    if factor.ndim == 1:
        factor = factor[:, None]
    if factor.ndim != 2:
        raise DimensionError(f"factor must be a d x k matrix, got shape {tuple(factor.shape)}")

    norm = torch.sum(factor.abs() ** 2).item()
    if norm == 0.0:
        raise InvalidStateError("zero factor has no normalization")

    factor = factor / norm ** 0.5
    density = factor @ factor.conj().T

    if factor.shape[1] == 1:
        return QuantumState(density, dims, vector=factor[:, 0], factor=factor)
    return QuantumState(density, dims, factor=factor)


def random_factor(d: int, rank: int, generator: Optional[torch.Generator] = None) -> torch.Tensor:
    real = torch.randn(d, rank, dtype=torch.float64, generator=generator)
    imag = torch.randn(d, rank, dtype=torch.float64, generator=generator)
    return torch.complex(real, imag)


def random_pure_state(d: int, generator: Optional[torch.Generator] = None) -> QuantumState:
    return from_factor(random_factor(d, 1, generator))


def random_mixed_state(d: int, rank: Optional[int] = None, generator: Optional[torch.Generator] = None) -> QuantumState:
    return from_factor(random_factor(d, d if rank is None else rank, generator))


def product_state(first: QuantumState, second: QuantumState) -> QuantumState:
    if first.is_bipartite or second.is_bipartite:
        raise DimensionError("product states are built from single-party states")

    dims = (first.dim, second.dim)
    if first.vector is not None and second.vector is not None:
        return QuantumState.from_vector(torch.kron(first.vector, second.vector), dims)
    return QuantumState(torch.kron(first.density, second.density), dims)


def random_separable_state(d: int, n_terms: int = 1, generator: Optional[torch.Generator] = None) -> QuantumState:
    """Convex mixture of n_terms random pure product states."""
    if n_terms < 1:
        raise ValueError(f"need at least one product term, got {n_terms}")

    if n_terms == 1:
        return product_state(random_pure_state(d, generator), random_pure_state(d, generator))

    weights = torch.rand(n_terms, dtype=torch.float64, generator=generator)
    weights = weights / weights.sum()

    density = torch.zeros(d * d, d * d, dtype=torch.complex128)
    for weight in weights:
        term = product_state(random_pure_state(d, generator), random_pure_state(d, generator))
        density = density + weight * term.density

    return QuantumState(density, (d, d))


def partial_trace(state: QuantumState, keep: int = 0) -> QuantumState:
    if not state.is_bipartite:
        raise DimensionError("partial trace needs a bipartite state")

    d_a, d_b = state.dims
    tensor = state.density.reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        reduced = torch.einsum("ijkj->ik", tensor)
    elif keep == 1:
        reduced = torch.einsum("ijil->jl", tensor)
    else:
        raise ValueError(f"keep must be 0 or 1, got {keep}")

    reduced_state = QuantumState(reduced)
    if reduced_state.is_pure:
        return QuantumState.from_vector(reduced_state.pure_vector())
    return reduced_state


def fidelity(first: QuantumState, second: QuantumState) -> float:
    """Fidelity with a pure state, tr(rho sigma)."""
    if not (first.is_pure or second.is_pure):
        raise InvalidStateError("fidelity is evaluated against a pure reference state")
    return first.overlap(second)


def trace_distance(first: QuantumState, second: QuantumState) -> float:
    if first.dim != second.dim:
        raise DimensionError(f"state dimensions differ: {first.dim} vs {second.dim}")
    values = torch.linalg.eigvalsh(first.density - second.density)
    return 0.5 * values.abs().sum().item()
