class FiniteQPError(Exception):
    """Base class of all library errors."""


class DimensionError(FiniteQPError, ValueError):
    pass


class InvalidStateError(FiniteQPError, ValueError):
    pass


class InfeasibleTraceError(FiniteQPError, ValueError):
    """Trace target outside the attainable range, or an empty slice."""

    def __init__(self, target: float, lower: float, upper: float):
        self.target = target
        self.lower = lower
        self.upper = upper
        super().__init__(f"trace {target:.12g} outside attainable range [{lower:.12g}, {upper:.12g}]")


class IllConditionedError(FiniteQPError, ArithmeticError):
    pass


class InsensitiveMeasurementError(IllConditionedError):
    def __init__(self, message: str = ""):
        hint = "the measured observables carry no information on the parameters; choose a different measured set"
        super().__init__(f"{message}: {hint}" if message else hint)


class NonInvertibleWindowError(FiniteQPError, ValueError):
    pass


class ConfigError(FiniteQPError, ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InvalidOperatorError(FiniteQPError, ValueError):
    pass
