import math
from functools import lru_cache
from typing import NamedTuple

import torch

from lib.config import config
from lib.structures import HermitianOperator, UnitaryOperator
from lib.utils.exceptions import DimensionError


class CanonicalPair(NamedTuple):
    dim: int
    q: HermitianOperator
    p: HermitianOperator
    fourier: UnitaryOperator
    index_offsets: torch.Tensor

    @property
    def scale(self) -> float:
        return math.sqrt(2 * math.pi / self.dim)


class Quadratics(NamedTuple):
    t: HermitianOperator
    g1: HermitianOperator
    g2: HermitianOperator
    g3: HermitianOperator


def check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d}")
    if d > config.OPERATORS.MAX_DIM:
        raise DimensionError(f"dimension {d} exceeds OPERATORS.MAX_DIM={config.OPERATORS.MAX_DIM}")


def index_offsets(d: int) -> torch.Tensor:
    """Symmetric labels -(d-1)/2, ..., (d-1)/2 in unit steps, half-integers for even d."""
    return torch.arange(d, dtype=torch.float64) - (d - 1) / 2


def fourier_matrix(d: int) -> torch.Tensor:
    labels = index_offsets(d)
    phases = 2 * math.pi * torch.outer(labels, labels) / d
    return torch.exp(1j * phases.to(torch.complex128)) / math.sqrt(d)


def _label_differences(d: int) -> torch.Tensor:
    labels = index_offsets(d)
    return labels[:, None] - labels[None, :]


def _alternating_sign(differences: torch.Tensor) -> torch.Tensor:
    # (-1)^(k-l) for integer valued differences
    return 1.0 - 2.0 * torch.remainder(differences.round(), 2.0)


def closed_form_momentum(d: int) -> torch.Tensor:
    """P_kl = -sqrt(2 pi / d) (i/2) (-1)^(k-l) / sin(pi (k-l) / d), zero on the diagonal."""
    differences = _label_differences(d)
    off_diagonal = differences != 0
    sines = torch.where(off_diagonal, torch.sin(math.pi * differences / d), torch.ones_like(differences))

    values = -math.sqrt(2 * math.pi / d) * 0.5 * _alternating_sign(differences) / sines
    values = torch.where(off_diagonal, values, torch.zeros_like(values))
    return 1j * values.to(torch.complex128)


def closed_form_commutator(d: int) -> torch.Tensor:
    """[Q,P]_kl = -i (pi/d) (-1)^(k-l) (k-l) / sin(pi (k-l) / d), zero on the diagonal."""
    differences = _label_differences(d)
    off_diagonal = differences != 0
    sines = torch.where(off_diagonal, torch.sin(math.pi * differences / d), torch.ones_like(differences))

    values = -(math.pi / d) * _alternating_sign(differences) * differences / sines
    values = torch.where(off_diagonal, values, torch.zeros_like(values))
    return 1j * values.to(torch.complex128)


@lru_cache(maxsize=None)
def build_canonical_pair(d: int) -> CanonicalPair:
    check_dim(d)

    labels = index_offsets(d)
    q = HermitianOperator(torch.diag(math.sqrt(2 * math.pi / d) * labels))
    fourier = UnitaryOperator(fourier_matrix(d))
    p = fourier.conjugate(q)

    return CanonicalPair(d, q, p, fourier, labels)


def commutator_qp(pair: CanonicalPair) -> HermitianOperator:
    """-i[Q, P]"""
    return HermitianOperator.commutator(pair.q, pair.p)


@lru_cache(maxsize=None)
def _quadratics(d: int) -> Quadratics:
    pair = build_canonical_pair(d)
    q2 = pair.q.square()
    p2 = pair.p.square()

    return Quadratics(t=q2 + p2,
                      g1=HermitianOperator.anticommutator(pair.q, pair.p),
                      g2=commutator_qp(pair),
                      g3=q2 - p2)


def build_quadratics(pair: CanonicalPair) -> Quadratics:
    """T = Q^2 + P^2, G1 = QP + PQ, G2 = -i[Q,P], G3 = Q^2 - P^2"""
    return _quadratics(pair.dim)


def squeezing_generator(pair: CanonicalPair) -> HermitianOperator:
    """K = (QP + PQ) / 2"""
    return 0.5 * build_quadratics(pair).g1


def mub_overlaps(pair: CanonicalPair) -> torch.Tensor:
    """|<k|j^>|^2 between the Q eigenbasis and the P eigenbasis F|j>."""
    return pair.fourier.matrix.abs() ** 2


def oscillator_levels(pair: CanonicalPair, count: int = 4) -> torch.Tensor:
    """Lowest eigenvalues of (Q^2 + P^2) / 2, which approach n + 1/2 as d grows."""
    return (0.5 * build_quadratics(pair).t).eigvalsh()[:count]
