class Metric:
    """Accumulates samples with `add` and reduces them on demand."""

    def add(self, *args) -> None:
        raise NotImplementedError

    def reduce(self):
        raise NotImplementedError

    def reset(self) -> None:
        raise NotImplementedError
