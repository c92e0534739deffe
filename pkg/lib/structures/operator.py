from typing import Dict, Tuple, Union

import torch

from lib.utils.exceptions import DimensionError, InvalidOperatorError

Number = Union[int, float, complex]


def as_complex(matrix) -> torch.Tensor:
    return torch.as_tensor(matrix).to(torch.complex128)


def _square_matrix(matrix) -> torch.Tensor:
    matrix = as_complex(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {tuple(matrix.shape)}")
    if matrix.shape[0] < 2:
        raise DimensionError(f"operators need dim >= 2, got {matrix.shape[0]}")
    return matrix


def matrix_to_dict(matrix: torch.Tensor) -> Dict:
    return {
        "dim": int(matrix.shape[0]),
        "re": matrix.real.tolist(),
        "im": matrix.imag.tolist(),
    }


def matrix_from_dict(data: Dict) -> torch.Tensor:
    real = torch.tensor(data["re"], dtype=torch.float64)
    imag = torch.tensor(data["im"], dtype=torch.float64)
    if real.shape != imag.shape:
        raise DimensionError("'re' and 'im' arrays differ in shape")
    matrix = torch.complex(real, imag)
    if "dim" in data and matrix.shape[0] != data["dim"]:
        raise DimensionError(f"declared dim {data['dim']} does not match matrix of size {matrix.shape[0]}")
    return matrix


class HermitianOperator(object):
    """Dense complex Hermitian matrix.

    Asymmetry up to `tolerance` times dim times the largest entry is rounding and is symmetrized away;
    anything larger is rejected.
    """

    def __init__(self, matrix, tolerance: float = None):
        from lib.config import config

        matrix = _square_matrix(matrix)
        tolerance = config.OPERATORS.HERMITIAN_TOL if tolerance is None else tolerance

        scale = matrix.shape[0] * max(1.0, matrix.abs().max().item())
        error = (matrix - matrix.conj().T).abs().max().item()
        if error > tolerance * scale:
            raise InvalidOperatorError(f"matrix is not Hermitian: max |H - H^dag| = {error:.3e}")

        self.matrix = 0.5 * (matrix + matrix.conj().T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(torch.eye(dim, dtype=torch.complex128))

    @classmethod
    def commutator(cls, a: "HermitianOperator", b: "HermitianOperator") -> "HermitianOperator":
        """-i[A, B], the Hermitian form of the commutator."""
        a.check_dim(b)
        return cls(-1j * (a.matrix @ b.matrix - b.matrix @ a.matrix))

    @classmethod
    def anticommutator(cls, a: "HermitianOperator", b: "HermitianOperator") -> "HermitianOperator":
        a.check_dim(b)
        return cls(a.matrix @ b.matrix + b.matrix @ a.matrix)

    def check_dim(self, other: "HermitianOperator") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"operator dimensions differ: {self.dim} vs {other.dim}")

    def square(self) -> "HermitianOperator":
        return HermitianOperator(self.matrix @ self.matrix)

    def kron(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(torch.kron(self.matrix, other.matrix))

    def eigh(self) -> Tuple[torch.Tensor, torch.Tensor]:
        return torch.linalg.eigh(self.matrix)

    def eigvalsh(self) -> torch.Tensor:
        return torch.linalg.eigvalsh(self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self.check_dim(other)
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self.check_dim(other)
        return HermitianOperator(self.matrix - other.matrix)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.matrix)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        if isinstance(scalar, complex) and scalar.imag != 0:
            raise InvalidOperatorError("only real multiples keep an operator Hermitian")
        return HermitianOperator(float(scalar.real if isinstance(scalar, complex) else scalar) * self.matrix)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"

    def to_dict(self) -> Dict:
        return matrix_to_dict(self.matrix)

    @classmethod
    def from_dict(cls, data: Dict) -> "HermitianOperator":
        return cls(matrix_from_dict(data))


class UnitaryOperator(object):
    def __init__(self, matrix, tolerance: float = None):
        from lib.config import config

        matrix = _square_matrix(matrix)
        tolerance = config.OPERATORS.UNITARY_TOL if tolerance is None else tolerance

        identity = torch.eye(matrix.shape[0], dtype=torch.complex128)
        error = (matrix @ matrix.conj().T - identity).abs().max().item()
        if error > tolerance:
            raise InvalidOperatorError(f"matrix is not unitary: max |UU^dag - 1| = {error:.3e}")

        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)

    def conjugate(self, operator: HermitianOperator) -> HermitianOperator:
        """U H U^dag"""
        if operator.dim != self.dim:
            raise DimensionError(f"operator dimensions differ: {self.dim} vs {operator.dim}")
        return HermitianOperator(self.matrix @ operator.matrix @ self.matrix.conj().T)

    def apply(self, vector: torch.Tensor) -> torch.Tensor:
        return self.matrix @ as_complex(vector)

    def power(self, exponent: int) -> "UnitaryOperator":
        return UnitaryOperator(torch.linalg.matrix_power(self.matrix, exponent))

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        return UnitaryOperator(self.matrix @ other.matrix)

    def __rmul__(self, phase: Number) -> "UnitaryOperator":
        return UnitaryOperator(complex(phase) * self.matrix)

    def __repr__(self) -> str:
        return f"UnitaryOperator(dim={self.dim})"

    def to_dict(self) -> Dict:
        return matrix_to_dict(self.matrix)


def exp_hermitian(operator: HermitianOperator, scale: float) -> UnitaryOperator:
    """exp(i * scale * H) through the eigendecomposition of H."""
    values, vectors = operator.eigh()
    phases = torch.exp(1j * scale * values.to(torch.complex128))
    return UnitaryOperator((vectors * phases) @ vectors.conj().T)
