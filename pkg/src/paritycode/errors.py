"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ParityCodeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ParityCodeError, ValueError):
    """Mismatched vector/configuration lengths."""


class InvalidParameterError(ParityCodeError, ValueError):
    pass


class InvalidGraphError(ParityCodeError, ValueError):
    pass


class CodeDesignError(ParityCodeError):
    """A layout cannot be turned into a valid parity code."""


class CodeFileError(CodeDesignError):
    """Malformed code or model file; ``location`` names the offending field."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class CountMismatchError(CodeDesignError):
    pass


class DependentStabilisersError(CodeDesignError):
    pass


class InfeasibleLogicalXError(CodeDesignError):
    def __init__(self, logical: int, message: str | None = None):
        self.logical = logical
        super().__init__(message or f"no logical X exists for logical spin {logical}")


class InfeasibleTargetError(CodeDesignError):
    def __init__(self, residual: frozenset[int]):
        self.residual = residual
        super().__init__(f"target not expressible; residual logical subset {sorted(residual)}")


class LabelConsistencyError(CodeDesignError):
    """Intersection labelling and GF(2) decomposition disagree."""


class GadgetError(ParityCodeError, ValueError):
    pass


class ConnectivityError(ParityCodeError, ValueError):
    pass


class DimensionCapError(ParityCodeError):
    """Hilbert space exceeds the configured size cap."""


class SolverError(ParityCodeError):
    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
