"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain an operation accepts."""


class UnsupportedRegimeError(ParameterError):
    """Parameters fall in a regime this package deliberately does not handle."""


class EndpointSingularityError(ParameterError):
    """A density was evaluated exactly at an endpoint where it diverges."""


class AccuracyError(RuntimeError):
    """A numerical routine failed to reach its requested tolerance."""
