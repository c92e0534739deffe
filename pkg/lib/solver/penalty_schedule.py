from bisect import bisect_right

import torch


class MultiStepPenalty:
    """Augmented-Lagrangian schedule for equality constraints.

    The quadratic weight follows base * gamma ** bisect_right(milestones, round), i.e. one escalation per round
    until the last milestone; multipliers are updated from the residuals after every round.
    """

    def __init__(self, num_constraints, base=1e2, gamma=1e2, rounds=3, extra_rounds=6):
        if rounds < 1:
            raise ValueError("Penalty schedule needs at least one round, got {}".format(rounds))
        if base <= 0 or gamma < 1:
            raise ValueError("Penalty weights must be positive and non-decreasing, got base={} gamma={}"
                             .format(base, gamma))

        self.milestones = list(range(1, rounds))
        self.base = base
        self.gamma = gamma
        self.rounds = rounds
        self.extra_rounds = extra_rounds
        self.round = 0
        self.multipliers = torch.zeros(num_constraints, dtype=torch.float64)

    @property
    def weight(self) -> float:
        return self.base * self.gamma ** bisect_right(self.milestones, self.round)

    def penalty(self, residuals: torch.Tensor) -> torch.Tensor:
        if residuals.numel() == 0:
            return residuals.sum()
        return torch.dot(self.multipliers, residuals) + 0.5 * self.weight * torch.sum(residuals ** 2)

    def step(self, residuals: torch.Tensor) -> None:
        if residuals.numel() > 0:
            self.multipliers = self.multipliers + self.weight * residuals.detach()
        self.round += 1

    def finished(self, residual: float, tolerance: float) -> bool:
        if self.round < self.rounds:
            return False
        return residual < tolerance or self.round >= self.rounds + self.extra_rounds
