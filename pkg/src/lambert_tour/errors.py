"""Exception types shared across the package."""


class LambertTourError(Exception):
    """Base class for package errors."""


class ValidationError(LambertTourError):
    """Invalid input data (catalog rows, config values, domain bounds)."""


class GeometryError(LambertTourError):
    """Transfer plane undefined: endpoints collinear with the focus."""


class ConvergenceError(LambertTourError):
    """An iterative solver exhausted its iteration cap."""


class InfeasibleError(LambertTourError):
    """No feasible solution exists for the requested problem."""
