import math
from typing import Dict, Optional, Sequence, Tuple

import torch

from lib.utils.exceptions import DimensionError, InvalidStateError
from .operator import HermitianOperator, as_complex


class QuantumState(object):
    """Density matrix on a (possibly bipartite) space, optionally remembering the pure vector or factor it came from."""

    def __init__(self, density: torch.Tensor, dims: Optional[Sequence[int]] = None,
                 vector: Optional[torch.Tensor] = None, factor: Optional[torch.Tensor] = None,
                 validate: bool = True):
        density = as_complex(density)
        if density.ndim != 2 or density.shape[0] != density.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {tuple(density.shape)}")

        dims = tuple(int(d) for d in dims) if dims is not None else (density.shape[0],)
        if math.prod(dims) != density.shape[0]:
            raise DimensionError(f"dims {dims} do not match density matrix of size {density.shape[0]}")

        self.density = 0.5 * (density + density.conj().T)
        self.dims = dims
        self.vector = vector
        self.factor = factor

        if validate:
            self.validate()

    @classmethod
    def from_vector(cls, vector: torch.Tensor, dims: Optional[Sequence[int]] = None) -> "QuantumState":
        vector = as_complex(vector).reshape(-1)
        norm = torch.linalg.vector_norm(vector)
        if norm.item() == 0.0:
            raise InvalidStateError("zero vector cannot be normalized")
        vector = vector / norm
        return cls(torch.outer(vector, vector.conj()), dims, vector=vector)

    @classmethod
    def from_density(cls, density: torch.Tensor, dims: Optional[Sequence[int]] = None) -> "QuantumState":
        density = as_complex(density)
        trace = torch.trace(density).real
        if trace.item() <= 0.0:
            raise InvalidStateError("density matrix must have positive trace")
        return cls(density / trace, dims)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    @property
    def rank_hint(self) -> int:
        if self.vector is not None:
            return 1
        if self.factor is not None:
            return self.factor.shape[1]
        return self.dim

    @property
    def purity(self) -> float:
        return torch.sum(self.density.abs() ** 2).item()

    @property
    def is_pure(self) -> bool:
        from lib.config import config
        return abs(self.purity - 1.0) <= config.STATES.PURITY_TOL

    def pure_vector(self) -> torch.Tensor:
        """State vector of a pure state, recovered from the density matrix when it was not stored."""
        if self.vector is not None:
            return self.vector
        if not self.is_pure:
            raise InvalidStateError(f"state is mixed (purity {self.purity:.12f})")
        values, vectors = torch.linalg.eigh(self.density)
        vector = vectors[:, -1]
        # fix the global phase on the largest component
        index = torch.argmax(vector.abs())
        return vector * (vector[index].abs() / vector[index])

    def validate(self) -> None:
        from lib.config import config

        trace = torch.trace(self.density).real.item()
        if abs(trace - 1.0) > max(config.STATES.TRACE_TOL, 1e-14 * self.dim):
            raise InvalidStateError(f"trace of density matrix is {trace:.15f}")

        smallest = torch.linalg.eigvalsh(self.density)[0].item()
        if smallest < -config.STATES.PSD_TOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {smallest:.3e}")

    def check_operator(self, operator: HermitianOperator) -> None:
        if operator.dim != self.dim:
            raise DimensionError(f"operator of dim {operator.dim} applied to state of dim {self.dim}")

    def expect(self, operator: HermitianOperator) -> float:
        self.check_operator(operator)
        return torch.sum(self.density.T * operator.matrix).real.item()

    def expect_product(self, a: HermitianOperator, b: HermitianOperator) -> complex:
        """<AB> = tr(rho A B)"""
        self.check_operator(a)
        self.check_operator(b)
        return torch.sum(self.density.T * (a.matrix @ b.matrix)).item()

    def overlap(self, other: "QuantumState") -> float:
        """tr(rho sigma), the fidelity when one of the states is pure."""
        if other.dim != self.dim:
            raise DimensionError(f"state dimensions differ: {self.dim} vs {other.dim}")
        return torch.sum(self.density.T * other.density).real.item()

    def __repr__(self) -> str:
        kind = "pure" if self.vector is not None else "mixed"
        return f"QuantumState(dims={self.dims}, {kind})"

    def to_dict(self) -> Dict:
        data = {"dims": list(self.dims)}
        if self.vector is not None:
            data["kind"] = "pure"
            data["re"] = self.vector.real.tolist()
            data["im"] = self.vector.imag.tolist()
        else:
            data["kind"] = "mixed"
            data["re"] = self.density.real.tolist()
            data["im"] = self.density.imag.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "QuantumState":
        values = torch.complex(torch.tensor(data["re"], dtype=torch.float64),
                               torch.tensor(data["im"], dtype=torch.float64))
        dims: Tuple[int, ...] = tuple(data.get("dims", (values.shape[0],)))
        if values.ndim == 1:
            return cls.from_vector(values, dims)
        return cls.from_density(values, dims)
