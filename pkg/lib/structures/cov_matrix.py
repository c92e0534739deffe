from typing import Dict

import torch

from lib.utils.exceptions import DimensionError, InvalidStateError
from .operator import as_complex


def _det(matrix: torch.Tensor) -> float:
    # closed form for 2x2 keeps tiny determinants near the minimum-uncertainty boundary clean
    if matrix.shape[0] == 2:
        return (matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]).real.item()
    return torch.linalg.det(matrix).real.item()


class CovMatrix(object):
    """Hermitian covariance matrix Gamma = sym + i * skew of m observables."""

    def __init__(self, entries: torch.Tensor, validate: bool = True):
        entries = as_complex(entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"covariance matrix must be square, got shape {tuple(entries.shape)}")

        self.entries = 0.5 * (entries + entries.conj().T)
        self.sym = self.entries.real.clone()
        self.skew = self.entries.imag.clone()
        self.trace = torch.trace(self.sym).item()
        self.det = _det(self.entries)
        self.sym_det = _det(self.sym)

        if validate:
            self.validate()

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def min_eigenvalue(self) -> float:
        return torch.linalg.eigvalsh(self.entries)[0].item()

    def validate(self) -> None:
        from lib.config import config

        tolerance = config.COVARIANCE.PSD_TOL * max(1.0, abs(self.trace))
        if self.min_eigenvalue < -tolerance:
            raise InvalidStateError(f"covariance matrix is not positive semidefinite "
                                    f"(min eigenvalue {self.min_eigenvalue:.3e})")

    def __repr__(self) -> str:
        return f"CovMatrix(m={self.m}, trace={self.trace:.6g}, det={self.det:.6g})"

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "re": self.sym.tolist(),
            "im": self.skew.tolist(),
            "trace": self.trace,
            "det": self.det,
        }
