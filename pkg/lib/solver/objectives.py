from typing import Callable, Dict, NamedTuple

import torch

from lib.operators import CanonicalPair, build_quadratics, squeezing_generator


class FactorProblem(NamedTuple):
    """Optimization over rho = AA^dag / tr(AA^dag) with A of shape (dim, rank).

    ``operators`` is the stack whose expectations feed the named objective and constraint functions.
    ``sense`` is +1 to minimize and -1 to maximize.
    """
    operators: torch.Tensor
    rank: int
    objective: str
    constraint: str = "none"
    params: torch.Tensor = torch.zeros(0, dtype=torch.float64)
    targets: torch.Tensor = torch.zeros(0, dtype=torch.float64)
    sense: int = 1

    @property
    def dim(self) -> int:
        return self.operators.shape[-1]


def moment_operators(pair: CanonicalPair) -> torch.Tensor:
    """Stack (Q, P, Q^2, P^2, K, -i[Q,P]) from which Gamma(Q, P) is assembled."""
    quadratics = build_quadratics(pair)
    return torch.stack([pair.q.matrix,
                        pair.p.matrix,
                        pair.q.square().matrix,
                        pair.p.square().matrix,
                        squeezing_generator(pair).matrix,
                        quadratics.g2.matrix])


def jnr_operators(pair: CanonicalPair) -> torch.Tensor:
    """Stack (Q, P, T, G1, G2, G3)."""
    quadratics = build_quadratics(pair)
    return torch.stack([pair.q.matrix, pair.p.matrix,
                        quadratics.t.matrix, quadratics.g1.matrix, quadratics.g2.matrix, quadratics.g3.matrix])


def expectations(factor: torch.Tensor, operators: torch.Tensor) -> torch.Tensor:
    """Re tr(A^dag O A) / tr(A^dag A) for every O in the stack."""
    norm = torch.sum(factor.real ** 2 + factor.imag ** 2)
    values = torch.einsum("ik,oij,jk->o", factor.conj(), operators, factor)
    return values.real / norm


class CovarianceMoments(NamedTuple):
    var_q: torch.Tensor
    var_p: torch.Tensor
    sym: torch.Tensor
    skew: torch.Tensor

    @property
    def trace(self) -> torch.Tensor:
        return self.var_q + self.var_p

    @property
    def det(self) -> torch.Tensor:
        return self.var_q * self.var_p - self.sym ** 2 - self.skew ** 2

    @property
    def sym_det(self) -> torch.Tensor:
        return self.var_q * self.var_p - self.sym ** 2


def covariance_moments(e: torch.Tensor) -> CovarianceMoments:
    # e = (<Q>, <P>, <Q^2>, <P^2>, <K>, <-i[Q,P]>)
    return CovarianceMoments(var_q=e[2] - e[0] ** 2,
                             var_p=e[3] - e[1] ** 2,
                             sym=e[4] - e[0] * e[1],
                             skew=0.5 * e[5])


def _det(e, params):
    return covariance_moments(e).det


def _sym_det(e, params):
    return covariance_moments(e).sym_det


def _inverse_trace(e, params):
    # (1/4) tr(Gamma_s^-1) with the determinant floored at params[0]
    moments = covariance_moments(e)
    return 0.25 * moments.trace / torch.clamp(moments.sym_det, min=params[0].item())


def _support(e, params):
    # e = (<Q>, <P>, <T>, <G1>, <G2>, <G3>), params = direction in (G1, G2, G3)
    return torch.dot(params, e[3:6])


def _no_constraint(e, targets):
    return e.new_zeros(0)


def _trace_constraint(e, targets):
    return (covariance_moments(e).trace - targets[0]).reshape(1)


def _commutator_constraint(e, targets):
    return (e[5] - targets[0]).reshape(1)


def _slice_constraint(e, targets):
    # <T> = t, <Q> = <P> = 0
    return torch.stack([e[2] - targets[0], e[0], e[1]])


OBJECTIVES: Dict[str, Callable] = {
    "det": _det,
    "sym_det": _sym_det,
    "inverse_trace": _inverse_trace,
    "support": _support,
}

CONSTRAINTS: Dict[str, Callable] = {
    "none": _no_constraint,
    "trace": _trace_constraint,
    "commutator": _commutator_constraint,
    "slice": _slice_constraint,
}
