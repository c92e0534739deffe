import math

import torch

from lib.structures import HermitianOperator, UnitaryOperator, exp_hermitian
from lib.utils.exceptions import InvalidOperatorError
from .canonical_pair import CanonicalPair, squeezing_generator


def shift_operator(pair: CanonicalPair) -> UnitaryOperator:
    """X = exp(i sqrt(2 pi / d) P), a cyclic shift of the Q eigenbasis."""
    return exp_hermitian(pair.p, pair.scale)


def clock_operator(pair: CanonicalPair) -> UnitaryOperator:
    """Z = exp(-i sqrt(2 pi / d) Q)"""
    return exp_hermitian(pair.q, -pair.scale)


def build_displacements(pair: CanonicalPair, l: int, n: int, m: int) -> UnitaryOperator:
    """omega^l X^n Z^m"""
    d = pair.dim
    for name, value in (("l", l), ("n", n), ("m", m)):
        if int(value) != value or not 0 <= value <= d - 1:
            raise InvalidOperatorError(f"displacement index {name}={value} outside 0..{d - 1}")

    omega = complex(math.cos(2 * math.pi * l / d), math.sin(2 * math.pi * l / d))
    matrix = torch.linalg.matrix_power(shift_operator(pair).matrix, int(n)) \
        @ torch.linalg.matrix_power(clock_operator(pair).matrix, int(m))

    return UnitaryOperator(omega * matrix)


def squeezing_unitary(pair: CanonicalPair, xi: float) -> UnitaryOperator:
    """exp(-i xi K) with K = (QP + PQ) / 2"""
    if not math.isfinite(xi):
        raise InvalidOperatorError(f"squeezing parameter must be finite, got {xi}")
    return exp_hermitian(squeezing_generator(pair), -xi)


def squeezing_rotation_d3(xi: float) -> torch.Tensor:
    """Closed form of exp(-i xi K) at d=3: I + sin(a) J + (1 - cos(a)) J^2 with a = sqrt(2) pi xi / (3 sqrt(3))."""
    alpha = math.sqrt(2) * math.pi * xi / (3 * math.sqrt(3))
    h = math.sqrt(2) / 2
    generator = torch.tensor([[0.0, h, 0.0],
                              [-h, 0.0, -h],
                              [0.0, h, 0.0]], dtype=torch.float64)
    identity = torch.eye(3, dtype=torch.float64)
    rotation = identity + math.sin(alpha) * generator + (1 - math.cos(alpha)) * generator @ generator
    return rotation.to(torch.complex128)


def encoding_unitary(pair: CanonicalPair, r1: float, r2: float) -> UnitaryOperator:
    """exp(i (r1 Q + r2 P))"""
    generator = HermitianOperator(r1 * pair.q.matrix + r2 * pair.p.matrix)
    return exp_hermitian(generator, 1.0)
