from collections import defaultdict
from typing import Dict, List

import torch


class RunningSeries:
    """Values of one quantity across optimizer restarts."""

    def __init__(self):
        self.series: List[float] = []

    def update(self, value: float) -> None:
        self.series.append(value)

    def __len__(self) -> int:
        return len(self.series)

    @property
    def values(self) -> torch.Tensor:
        return torch.tensor(self.series, dtype=torch.float64)

    @property
    def median(self) -> float:
        return self.values.median().item()

    @property
    def mean(self) -> float:
        return self.values.mean().item()

    @property
    def min(self) -> float:
        return self.values.min().item()

    @property
    def max(self) -> float:
        return self.values.max().item()

    def spread(self) -> Dict[str, float]:
        return {"min": self.min, "median": self.median, "max": self.max}


class MetricLogger:
    """Named running series, rendered as one log line."""

    def __init__(self, delimiter: str = "\t"):
        self.meters: Dict[str, RunningSeries] = defaultdict(RunningSeries)
        self.delimiter = delimiter

    def update(self, **kwargs) -> None:
        for name, value in kwargs.items():
            if isinstance(value, torch.Tensor):
                value = value.item()
            if not isinstance(value, (bool, int, float)):
                raise TypeError(f"meter {name} expects a number, got {type(value).__name__}")
            self.meters[name].update(float(value))

    def __getitem__(self, name: str) -> RunningSeries:
        return self.meters[name]

    def __str__(self) -> str:
        parts = []
        for name, meter in self.meters.items():
            if not len(meter):
                continue
            parts.append(f"{name}: {meter.median:.6e} [{meter.min:.6e}, {meter.max:.6e}]")
        return self.delimiter.join(parts)

    def summary(self) -> Dict[str, Dict[str, float]]:
        return {name: meter.spread() for name, meter in self.meters.items() if len(meter)}
