"""Exception types shared across the analytic and simulation engines."""


class StabilityViolation(ValueError):
    """Parameters fall outside (or on the boundary of) the stability region."""


class RootNotFound(ArithmeticError):
    """No negative polynomial zero yields a nonnegative stationary solution."""


class SingularSystem(ArithmeticError):
    """The stationary linear system is numerically rank-deficient."""


class EmptyFeasibleRegion(ValueError):
    """No point of the requested arrival-rate range satisfies stability."""


class InvalidConfig(ValueError):
    """Simulation configuration is internally inconsistent."""


class InsufficientData(ValueError):
    """Not enough simulated deliveries to form the requested estimate."""
