"""Exception types raised across the package."""


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    def __init__(self, deviation: float, what: str = "matrix"):
        self.deviation = deviation
        super().__init__(f"{what} is not Hermitian (max |M - M^dagger| = {deviation:.3e})")


class SubspaceError(ValueError):
    pass


class ChannelValidationError(ValueError):
    """Kraus data that do not define a valid channel (or descriptor parameters that are invalid)."""

    def __init__(self, message: str, deviation: float | None = None):
        self.deviation = deviation
        super().__init__(message)


class NumericalError(ArithmeticError):
    """Two independent routes to the same quantity disagree beyond tolerance."""
