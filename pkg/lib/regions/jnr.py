from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import torch
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError
from tqdm import tqdm

from lib.config import config
from lib.operators import CanonicalPair, build_quadratics
from lib.solver import FactorProblem, jnr_operators, optimize_with_restarts
from lib.states import from_factor
from lib.structures import HermitianOperator, QuantumState
from lib.utils import logger, make_generator, split_seed
from lib.utils.exceptions import DimensionError, InfeasibleTraceError


class JnrPoint(NamedTuple):
    direction: torch.Tensor
    expectation_tuple: torch.Tensor
    state: QuantumState
    degenerate: bool


class CrossSection(NamedTuple):
    t: float
    points: torch.Tensor
    dets: torch.Tensor
    det_min: float
    det_max: float
    origin_inside: bool
    converged: bool


def jnr_support(operators: Sequence[HermitianOperator], direction) -> JnrPoint:
    """Supporting point of the joint numerical range: the top eigenvector of sum_i n_i G_i."""
    direction = torch.as_tensor(direction, dtype=torch.float64).reshape(-1)
    if len(operators) < 1 or direction.numel() != len(operators):
        raise DimensionError(f"direction of length {direction.numel()} for {len(operators)} operators")
    if abs(torch.linalg.vector_norm(direction).item() - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")

    combined = sum(n * operator.matrix for n, operator in zip(direction.tolist(), operators))
    values, vectors = torch.linalg.eigh(HermitianOperator(combined).matrix)

    tolerance = config.REGIONS.DEGENERACY_TOL
    top = values[-1].item()
    degenerate = len(values) > 1 and top - values[-2].item() < tolerance
    # lowest index inside the top cluster
    index = int(torch.nonzero(values >= top - tolerance)[0].item())
    if degenerate:
        logger.debug(f"jnr_support: top eigenvalue {top:.6e} degenerate, face exposed in direction "
                     f"{direction.tolist()}")

    state = QuantumState.from_vector(vectors[:, index])
    point = torch.tensor([state.expect(operator) for operator in operators], dtype=torch.float64)
    return JnrPoint(direction, point, state, degenerate)


def random_directions(count: int, dim: int, seed: int = 0) -> torch.Tensor:
    generator = make_generator(seed)
    directions = torch.randn(count, dim, dtype=torch.float64, generator=generator)
    return directions / torch.linalg.vector_norm(directions, dim=1, keepdim=True)


def slice_point(pair: CanonicalPair, state: QuantumState) -> torch.Tensor:
    quadratics = build_quadratics(pair)
    return torch.tensor([state.expect(quadratics.g1), state.expect(quadratics.g2), state.expect(quadratics.g3)],
                        dtype=torch.float64)


def hull_distance(points: torch.Tensor) -> Tuple[float, bool]:
    """Distance from the origin to the convex hull of `points`, and whether the origin lies inside.

    The distance solves min |X^T w|^2 over the probability simplex, so it is the norm of an actual hull point.
    Flat clouds have no facets and count as containing the origin once the squared distance drops below
    REGIONS.CENTER_TOL.
    """
    x = points.numpy()
    inside = None
    try:
        hull = ConvexHull(x)
        # facet planes n . x + offset <= 0 inside the hull
        inside = bool((hull.equations[:, -1] <= config.REGIONS.DEGENERACY_TOL).all())
        x = x[hull.vertices]
    except QhullError:
        pass
    if inside:
        return 0.0, True

    gram = x @ x.T
    count = x.shape[0]
    result = minimize(lambda w: w @ gram @ w, np.full(count, 1.0 / count), jac=lambda w: 2 * gram @ w,
                      method="SLSQP", bounds=[(0.0, 1.0)] * count,
                      constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones_like(w)}],
                      options={"ftol": 1e-16, "maxiter": 1000})
    weights = np.clip(result.x, 0.0, None)
    weights /= weights.sum()
    distance = float(np.linalg.norm(weights @ x))
    if inside is None and distance ** 2 <= config.REGIONS.CENTER_TOL:
        return 0.0, True
    return distance, False


def _slice_support(pair: CanonicalPair, t: float, direction: torch.Tensor, rank: int, restarts: int, seed: int,
                   num_workers: Optional[int]) -> Optional[torch.Tensor]:
    problem = FactorProblem(operators=jnr_operators(pair), rank=rank, objective="support", constraint="slice",
                            params=direction, targets=torch.tensor([t], dtype=torch.float64), sense=-1)
    best, _ = optimize_with_restarts(problem, restarts, seed, num_workers)
    if not best.converged:
        logger.warning(f"jnr_cross_section d={pair.dim} t={t:.6f}: direction {direction.tolist()} "
                       f"residual {best.residual:.3e}")
        return None
    return slice_point(pair, from_factor(best.factor))


def jnr_cross_section(pair: CanonicalPair, t: float, n_directions: int = 64, seed: int = 0,
                      rank: Optional[int] = None, restarts: Optional[int] = None,
                      num_workers: Optional[int] = None) -> CrossSection:
    """Approximate {(<G1>, <G2>, <G3>) : <T> = t, <Q> = <P> = 0} from constrained support points.

    Each direction n yields the rank-2 state maximizing n . <G> on the slice, so the hull of these points is an
    inner approximation. det = (t^2 - r^2) / 4 at radius r: the farthest point gives det_min, the hull point
    nearest the origin gives det_max. The farthest point is refined by re-solving along its own direction,
    which never decreases the radius.
    """
    if n_directions < 20:
        raise ValueError(f"n_directions must be at least 20, got {n_directions}")
    rank = config.REGIONS.JNR_RANK if rank is None else min(rank, pair.dim)
    restarts = config.REGIONS.JNR_RESTARTS if restarts is None else restarts

    spectrum = build_quadratics(pair).t.eigvalsh()
    lower, upper = spectrum[0].item(), spectrum[-1].item()
    if not lower - 1e-12 <= t <= upper + 1e-12:
        raise InfeasibleTraceError(t, lower, upper)

    axes = torch.cat([torch.eye(3, dtype=torch.float64), -torch.eye(3, dtype=torch.float64)])
    directions = torch.cat([axes, random_directions(n_directions - 6, 3, seed)])

    points: List[torch.Tensor] = []
    converged = True
    for index, direction in enumerate(tqdm(directions, desc=f"slice d={pair.dim} t={t:.4f}", leave=False)):
        point = _slice_support(pair, t, direction, rank, restarts, split_seed(seed, index), num_workers)
        if point is None:
            converged = False
            continue
        points.append(point)

    if not points:
        raise InfeasibleTraceError(t, lower, upper)

    farthest = max(points, key=lambda p: torch.linalg.vector_norm(p).item())
    for step in range(config.REGIONS.JNR_REFINE_STEPS):
        radius = torch.linalg.vector_norm(farthest).item()
        if radius < 1e-12:
            break
        point = _slice_support(pair, t, farthest / radius, rank, restarts, split_seed(seed, n_directions + step),
                               num_workers)
        if point is None or torch.linalg.vector_norm(point).item() <= radius + 1e-12:
            break
        points.append(point)
        farthest = point

    points = torch.stack(points)
    radii = torch.linalg.vector_norm(points, dim=1)
    dets = 0.25 * (t ** 2 - radii ** 2)

    nearest, origin_inside = hull_distance(points)

    return CrossSection(t=t,
                        points=points,
                        dets=dets,
                        det_min=dets.min().item(),
                        det_max=0.25 * (t ** 2 - nearest ** 2),
                        origin_inside=origin_inside,
                        converged=converged)
