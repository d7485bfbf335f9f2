"""Semantic exception hierarchy for the package."""


class WienerCodingError(Exception):
    """Base error for this package."""


class ParameterError(WienerCodingError, ValueError):
    """Inputs violate a contract (domain, type, or consistency)."""


class UnsupportedConfigurationError(ParameterError):
    """Configuration is valid but not supported by this operation."""


class ModelError(WienerCodingError):
    """Analytical model cannot be evaluated (e.g. infinite length with positive weight)."""


class InfeasibleError(WienerCodingError):
    """Optimization problem has an empty feasible set."""


class SearchError(WienerCodingError):
    """A root/bracket search failed to converge."""


class HorizonError(WienerCodingError):
    """Simulation horizon too short or exceeded."""
