from typing import Dict, List, Union

import torch

from lib.metrics import Metric

REDUCTIONS = ("mean", "median", "summary")


class Scalar(Metric):
    """Collects float64 samples; `reduce` returns nan (or an all-nan summary) while empty."""

    def __init__(self, reduction: str = "mean"):
        super().__init__()
        if reduction not in REDUCTIONS:
            raise ValueError(f"reduction must be one of {REDUCTIONS}, got {reduction!r}")
        self.reduction = reduction
        self.values: List[torch.Tensor] = []

    def __len__(self) -> int:
        return sum(chunk.numel() for chunk in self.values)

    def add(self, value) -> None:
        self.values.append(torch.as_tensor(value, dtype=torch.float64).reshape(-1))

    def reset(self) -> None:
        self.values = []

    def samples(self) -> torch.Tensor:
        if not self.values:
            return torch.zeros(0, dtype=torch.float64)
        return torch.cat(self.values)

    def reduce(self) -> Union[float, Dict[str, float]]:
        samples = self.samples()
        if self.reduction == "summary":
            return self._summary(samples)
        if samples.numel() == 0:
            return float("nan")
        return samples.mean().item() if self.reduction == "mean" else samples.median().item()

    @staticmethod
    def _summary(samples: torch.Tensor) -> Dict[str, float]:
        count = samples.numel()
        if count == 0:
            nan = float("nan")
            return {"count": 0, "mean": nan, "std_error": nan, "min": nan, "max": nan}
        std_error = samples.std().item() / count ** 0.5 if count > 1 else float("nan")
        return {"count": count,
                "mean": samples.mean().item(),
                "std_error": std_error,
                "min": samples.min().item(),
                "max": samples.max().item()}
