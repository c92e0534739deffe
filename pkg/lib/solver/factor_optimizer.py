import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import torch
from scipy.optimize import minimize

from lib.config import config
from lib.utils import MetricLogger, logger, make_generator, parallel_map
from .objectives import CONSTRAINTS, OBJECTIVES, FactorProblem, expectations
from .penalty_schedule import MultiStepPenalty


class RestartResult(NamedTuple):
    value: float
    factor: torch.Tensor
    residual: float
    converged: bool
    restart: int


class FactorOptimizer:
    """Local optimization of one FactorProblem from a single starting point."""

    def __init__(self, problem: FactorProblem, method: Optional[str] = None):
        if problem.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {problem.objective!r}")
        if problem.constraint not in CONSTRAINTS:
            raise ValueError(f"unknown constraint {problem.constraint!r}")

        self.problem = problem
        self.objective = OBJECTIVES[problem.objective]
        self.constraint = CONSTRAINTS[problem.constraint]
        self.method = config.SOLVER.METHOD if method is None else method
        if self.method not in ("lbfgs", "nelder-mead"):
            raise ValueError(f"unknown optimizer method {self.method!r}")

        self.tolerance = config.SOLVER.CONSTRAINT_TOL

    def unpack(self, x: torch.Tensor) -> torch.Tensor:
        return torch.complex(x[0], x[1])

    def evaluate(self, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        e = expectations(self.unpack(x), self.problem.operators)
        value = self.problem.sense * self.objective(e, self.problem.params)
        residuals = self.constraint(e, self.problem.targets)
        return value, residuals

    def loss(self, x: torch.Tensor, schedule: MultiStepPenalty) -> torch.Tensor:
        value, residuals = self.evaluate(x)
        return value + schedule.penalty(residuals)

    def initial_point(self, seed: int) -> torch.Tensor:
        generator = make_generator(seed)
        return torch.randn(2, self.problem.dim, self.problem.rank, dtype=torch.float64, generator=generator)

    def minimize_lbfgs(self, x: torch.Tensor, schedule: MultiStepPenalty) -> torch.Tensor:
        x = x.detach().clone().requires_grad_(True)
        optimizer = torch.optim.LBFGS([x], lr=1.0,
                                      max_iter=config.SOLVER.MAX_ITER,
                                      history_size=config.SOLVER.HISTORY_SIZE,
                                      tolerance_grad=1e-13,
                                      tolerance_change=1e-16,
                                      line_search_fn="strong_wolfe")

        def closure():
            optimizer.zero_grad()
            loss = self.loss(x, schedule)
            loss.backward()
            return loss

        optimizer.step(closure)
        return x.detach()

    def minimize_nelder_mead(self, x: torch.Tensor, schedule: MultiStepPenalty) -> torch.Tensor:
        shape = x.shape

        def fun(flat: np.ndarray) -> float:
            with torch.no_grad():
                loss = self.loss(torch.from_numpy(flat).reshape(shape), schedule)
            return loss.item() if math.isfinite(loss.item()) else 1e300

        result = minimize(fun, x.reshape(-1).numpy(), method="Nelder-Mead",
                          options={"maxiter": config.SOLVER.NELDER_MEAD_MAX_ITER, "xatol": 1e-12,
                                   "fatol": 1e-15, "adaptive": True})
        return torch.from_numpy(result.x).reshape(shape)

    def run(self, seed: int = 0, initial_factor: Optional[torch.Tensor] = None, restart: int = 0) -> RestartResult:
        if initial_factor is None:
            x = self.initial_point(seed)
        else:
            initial_factor = torch.as_tensor(initial_factor).to(torch.complex128)
            x = torch.stack([initial_factor.real, initial_factor.imag])

        schedule = MultiStepPenalty(num_constraints=len(self.constraint(torch.zeros(self.problem.operators.shape[0],
                                                                                    dtype=torch.float64),
                                                                        self.problem.targets)),
                                    base=config.SOLVER.PENALTY_BASE,
                                    gamma=config.SOLVER.PENALTY_GAMMA,
                                    rounds=config.SOLVER.PENALTY_ROUNDS,
                                    extra_rounds=config.SOLVER.EXTRA_ROUNDS)
        minimize_step = self.minimize_lbfgs if self.method == "lbfgs" else self.minimize_nelder_mead

        while True:
            x = minimize_step(x, schedule)
            # the objective is scale invariant in A
            x = x / torch.linalg.vector_norm(x)

            with torch.no_grad():
                value, residuals = self.evaluate(x)
            residual = residuals.abs().max().item() if residuals.numel() > 0 else 0.0

            if residuals.numel() == 0:
                break
            schedule.step(residuals)
            if schedule.finished(residual, self.tolerance):
                break

        converged = math.isfinite(value.item()) and residual < self.tolerance
        return RestartResult(value=self.problem.sense * value.item(),
                             factor=self.unpack(x),
                             residual=residual,
                             converged=converged,
                             restart=restart)


class _RestartItem(NamedTuple):
    problem: FactorProblem
    seed: int
    restart: int
    method: Optional[str]
    initial_factor: Optional[torch.Tensor]


def _run_restart(item: _RestartItem) -> RestartResult:
    optimizer = FactorOptimizer(item.problem, item.method)
    return optimizer.run(item.seed, item.initial_factor, item.restart)


def select_best(problem: FactorProblem, results: Sequence[RestartResult]) -> RestartResult:
    """Best objective among converged results, ties to the lower restart index; least residual if none converged."""
    converged = [r for r in results if r.converged]
    if converged:
        return min(converged, key=lambda r: (problem.sense * r.value, r.restart))
    return min(results, key=lambda r: (r.residual, r.restart))


def optimize_with_restarts(problem: FactorProblem, restarts: Optional[int] = None, seed: int = 0,
                           num_workers: Optional[int] = None, method: Optional[str] = None,
                           initial_factors: Sequence[torch.Tensor] = ()) -> Tuple[RestartResult, List[RestartResult]]:
    """Run restart i from seed + i, plus one run per supplied initial factor, and reduce deterministically."""
    restarts = config.SOLVER.RESTARTS if restarts is None else restarts
    if restarts < 0 or restarts + len(initial_factors) == 0:
        raise ValueError(f"need at least one restart, got {restarts}")

    items = [_RestartItem(problem, seed + i, i, method, None) for i in range(restarts)]
    items += [_RestartItem(problem, seed, restarts + j, method, factor) for j, factor in enumerate(initial_factors)]

    results = parallel_map(_run_restart, items, num_workers)

    meters = MetricLogger(delimiter="  ")
    for result in results:
        meters.update(objective=result.value, residual=result.residual)
    converged = sum(r.converged for r in results)
    best = select_best(problem, results)
    logger.debug(meters.delimiter.join([f"{problem.objective}/{problem.constraint}",
                                        f"converged: {converged}/{len(results)}",
                                        str(meters), f"best: {best.value:.12e} (run {best.restart})"]))
    return best, results
