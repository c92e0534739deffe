import torch

from lib.metrics import Scalar


class SquaredError(Scalar):
    """Squared estimation error per trial, summed over the parameter axis for vector estimates.

    Trials whose estimate is not finite are dropped.
    """

    def add(self, estimate, truth) -> None:
        estimate = torch.as_tensor(estimate, dtype=torch.float64)
        truth = torch.as_tensor(truth, dtype=torch.float64)

        error = (estimate - truth).square()
        if error.ndim > 1:
            error = error.sum(dim=-1)
        super().add(error[torch.isfinite(error)])
