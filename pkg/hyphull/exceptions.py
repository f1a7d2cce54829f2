"""Custom exceptions for hyphull."""


class HypHullError(Exception):
    """Base exception for all hyphull errors."""


class OutOfDomainError(HypHullError):
    """Raised when an argument lies outside the domain of a formula or model."""


class EmptyPathError(HypHullError):
    """Raised when a hull is requested for a path with no points."""


class InvalidConfigError(HypHullError):
    """Raised when simulation or estimation parameters are inconsistent."""


class ToleranceNotMetError(HypHullError):
    """Raised when adaptive quadrature exhausts its panel budget."""


class NumericalError(HypHullError):
    """Raised when a runtime numerical identity check fails."""


class OscillationWarning(UserWarning):
    """Emitted when an oscillatory integrand is evaluated outside its reliable range."""
