import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import torch

from lib.config import config
from lib.covariance import variance
from lib.metrics import SquaredError
from lib.operators import CanonicalPair, encoding_unitary
from lib.structures import HermitianOperator, QuantumState
from lib.utils import logger, split_seed
from lib.utils.exceptions import DimensionError, InsensitiveMeasurementError, NonInvertibleWindowError


class MomSimResult(NamedTuple):
    nu: int
    empirical_mse: float
    predicted_mse: float
    ratio: float
    trials: int
    window: Tuple[float, float]


class MeanCurve(object):
    """mu(theta) = tr(M e^{i theta H} rho e^{-i theta H}) evaluated in the eigenbasis of H."""

    def __init__(self, state: QuantumState, m: HermitianOperator, h: HermitianOperator):
        state.check_operator(m)
        state.check_operator(h)
        values, vectors = h.eigh()
        self.rho = vectors.conj().T @ state.density @ vectors
        self.m = vectors.conj().T @ m.matrix @ vectors
        # rho_theta[j, k] = rho[j, k] exp(i theta (l_j - l_k))
        self.gaps = (values[:, None] - values[None, :]).to(torch.complex128)
        self.weights = self.m.T * self.rho
        self.spread = (values[-1] - values[0]).item()

    def __call__(self, thetas: torch.Tensor) -> torch.Tensor:
        thetas = torch.as_tensor(thetas, dtype=torch.float64)
        phases = torch.exp(1j * thetas.to(torch.complex128)[..., None, None] * self.gaps)
        return (self.weights * phases).sum(dim=(-2, -1)).real

    def slope(self, thetas: torch.Tensor) -> torch.Tensor:
        thetas = torch.as_tensor(thetas, dtype=torch.float64)
        phases = torch.exp(1j * thetas.to(torch.complex128)[..., None, None] * self.gaps)
        return (1j * self.gaps * self.weights * phases).sum(dim=(-2, -1)).real


def evolved_state(state: QuantumState, h: HermitianOperator, theta: float) -> QuantumState:
    values, vectors = h.eigh()
    unitary = (vectors * torch.exp(1j * theta * values.to(torch.complex128))) @ vectors.conj().T
    return QuantumState(unitary @ state.density @ unitary.conj().T, state.dims)


def monotone_window(curve: MeanCurve, theta_true: float, points: Optional[int] = None) -> Tuple[float, float]:
    """Largest interval around theta_true, within half a period of the fastest mode, where mu is strictly monotone."""
    points = config.METROLOGY.WINDOW_POINTS if points is None else points
    sign = math.copysign(1.0, curve.slope(torch.tensor(theta_true, dtype=torch.float64)).item())

    half_width = math.pi / max(curve.spread, 1e-12)
    grid = torch.linspace(theta_true - half_width, theta_true + half_width, points, dtype=torch.float64)
    slopes = sign * curve.slope(grid)
    centre = int(torch.argmin((grid - theta_true).abs()).item())

    lower = centre
    while lower > 0 and slopes[lower - 1] > 0:
        lower -= 1
    upper = centre
    while upper < points - 1 and slopes[upper + 1] > 0:
        upper += 1

    if upper - lower < 2:
        raise NonInvertibleWindowError(f"mean curve is not monotone around theta={theta_true}")
    return grid[lower].item(), grid[upper].item()


def invert_means(curve: MeanCurve, means: torch.Tensor, window: Tuple[float, float],
                 steps: Optional[int] = None) -> torch.Tensor:
    """Vectorized bisection for mu(theta) = mean on a monotone window, clamped at its ends."""
    steps = config.METROLOGY.BISECTION_STEPS if steps is None else steps
    lower = torch.full_like(means, window[0])
    upper = torch.full_like(means, window[1])
    ends = curve(torch.tensor(window, dtype=torch.float64))
    increasing = ends[1].item() > ends[0].item()

    for _ in range(steps):
        middle = 0.5 * (lower + upper)
        below = curve(middle) < means
        go_right = below if increasing else ~below
        lower = torch.where(go_right, middle, lower)
        upper = torch.where(go_right, upper, middle)

    return 0.5 * (lower + upper)


def sample_means(state: QuantumState, m: HermitianOperator, nu: int, trials: int,
                 rng: np.random.Generator) -> torch.Tensor:
    """Empirical means of nu projective measurements of M, one per trial."""
    values, vectors = m.eigh()
    probabilities = torch.einsum("ik,ij,jk->k", vectors.conj(), state.density, vectors).real.clamp(min=0.0)
    probabilities = (probabilities / probabilities.sum()).numpy()

    counts = rng.multinomial(nu, probabilities, size=trials)
    return torch.from_numpy(counts.astype(np.float64)) @ values / nu


def _check_shots(nu: int, trials: int) -> None:
    if nu < 1:
        raise ValueError(f"shot count must be positive, got {nu}")
    if trials < 2:
        raise ValueError(f"need at least two trials, got {trials}")


def mom_simulate_single(state: QuantumState, m: HermitianOperator, h: HermitianOperator, theta_true: float,
                        nu: Optional[int] = None, trials: Optional[int] = None, seed: int = 0) -> MomSimResult:
    """Monte-Carlo method of moments for the single phase theta of e^{i theta H}, measuring M."""
    nu = config.METROLOGY.SHOTS if nu is None else nu
    trials = config.METROLOGY.TRIALS if trials is None else trials
    _check_shots(nu, trials)

    commutator = state.expect(HermitianOperator.commutator(m, h))
    if abs(commutator) <= 1e-8:
        raise InsensitiveMeasurementError(f"<-i[M, H]> = {commutator:.3e} on the input state")

    curve = MeanCurve(state, m, h)
    window = monotone_window(curve, theta_true)

    encoded = evolved_state(state, h, theta_true)
    spread = math.sqrt(max(variance(encoded, m), 0.0) / nu)
    reach = curve(torch.tensor(window, dtype=torch.float64)).diff().abs().item()
    if 6 * spread >= reach:
        raise NonInvertibleWindowError(f"statistical spread {spread:.3e} of the mean exceeds the invertible range "
                                       f"{reach:.3e}; increase the shot count")

    rng = np.random.default_rng(split_seed(seed, 0))
    means = sample_means(encoded, m, nu, trials, rng)
    estimates = invert_means(curve, means, window)

    errors = SquaredError(reduction="summary")
    errors.add(estimates, theta_true)
    stats = errors.reduce()
    empirical = stats["mean"]

    slope = curve.slope(torch.tensor(theta_true, dtype=torch.float64)).item()
    predicted = variance(encoded, m) / (nu * slope ** 2)
    logger.debug(f"mom_simulate_single nu={nu} trials={trials}: empirical {empirical:.6e} "
                 f"(+- {stats['std_error']:.2e}) predicted {predicted:.6e}")
    return MomSimResult(nu, empirical, predicted, empirical / predicted, trials, window)


class DisplacementMeans(object):
    """(<Q>, <P>) after e^{i(r1 Q + r2 P)}, batched over parameter pairs."""

    def __init__(self, state: QuantumState, pair: CanonicalPair):
        self.state = state
        self.pair = pair

    def __call__(self, params: torch.Tensor) -> torch.Tensor:
        params = torch.as_tensor(params, dtype=torch.float64).reshape(-1, 2)
        generators = params[:, 0, None, None] * self.pair.q.matrix + params[:, 1, None, None] * self.pair.p.matrix
        values, vectors = torch.linalg.eigh(generators)
        phases = torch.exp(1j * values.to(torch.complex128))[:, None, :]
        unitaries = (vectors * phases) @ vectors.conj().transpose(-2, -1)
        densities = unitaries @ self.state.density @ unitaries.conj().transpose(-2, -1)
        return torch.stack([torch.einsum("bij,ji->b", densities, self.pair.q.matrix).real,
                            torch.einsum("bij,ji->b", densities, self.pair.p.matrix).real], dim=-1)

    def jacobian(self, params: torch.Tensor, step: float = 1e-6) -> torch.Tensor:
        params = torch.as_tensor(params, dtype=torch.float64).reshape(-1, 2)
        columns = []
        for k in range(2):
            shift = torch.zeros(2, dtype=torch.float64)
            shift[k] = step
            columns.append((self(params + shift) - self(params - shift)) / (2 * step))
        return torch.stack(columns, dim=-1)


def mom_simulate_multi(state: QuantumState, pair: CanonicalPair, r_true: Sequence[float], nu: Optional[int] = None,
                       trials: Optional[int] = None, seed: int = 0, newton_steps: int = 30) -> MomSimResult:
    """Two-parameter method of moments for e^{i(r1 Q + r2 P)} with Q measured on half the shots and P on the rest.

    Each trial solves (<Q>, <P>)(r) = empirical means by Newton iteration started at r_true; the
    prediction is tr(C^-1 Sigma C^-T) with Sigma the covariance of the two sub-ensemble means.
    """
    nu = config.METROLOGY.SHOTS if nu is None else nu
    trials = config.METROLOGY.TRIALS if trials is None else trials
    _check_shots(nu, trials)
    if nu < 2:
        raise ValueError("need at least one shot per measured observable")
    r_true = torch.as_tensor(r_true, dtype=torch.float64).reshape(-1)
    if r_true.numel() != 2:
        raise DimensionError(f"r_true must hold two parameters, got {r_true.numel()}")

    means_of = DisplacementMeans(state, pair)
    jacobian = means_of.jacobian(r_true)[0]
    if torch.linalg.cond(jacobian).item() > config.METROLOGY.CONDITION_LIMIT:
        raise InsensitiveMeasurementError("(<Q>, <P>) does not resolve both displacement parameters")

    unitary = encoding_unitary(pair, r_true[0].item(), r_true[1].item()).matrix
    encoded = QuantumState(unitary @ state.density @ unitary.conj().T, state.dims)
    shots_q = nu // 2
    shots_p = nu - shots_q

    rng = np.random.default_rng(split_seed(seed, 1))
    observed = torch.stack([sample_means(encoded, pair.q, shots_q, trials, rng),
                            sample_means(encoded, pair.p, shots_p, trials, rng)], dim=-1)

    estimates = r_true.expand(trials, 2).clone()
    for _ in range(newton_steps):
        residuals = means_of(estimates) - observed
        steps = torch.linalg.solve(means_of.jacobian(estimates), residuals.unsqueeze(-1)).squeeze(-1)
        estimates = estimates - steps
        if steps.abs().max().item() < 1e-13:
            break

    errors = SquaredError(reduction="summary")
    errors.add(estimates, r_true)
    stats = errors.reduce()
    empirical = stats["mean"]

    sigma = torch.diag(torch.tensor([variance(encoded, pair.q) / shots_q, variance(encoded, pair.p) / shots_p],
                                    dtype=torch.float64))
    inverse = torch.linalg.inv(jacobian)
    predicted = torch.trace(inverse @ sigma @ inverse.T).item()
    logger.debug(f"mom_simulate_multi nu={nu} trials={trials}: empirical {empirical:.6e} "
                 f"(+- {stats['std_error']:.2e}) predicted {predicted:.6e}")
    return MomSimResult(nu, empirical, predicted, empirical / predicted, trials, (float("nan"), float("nan")))
