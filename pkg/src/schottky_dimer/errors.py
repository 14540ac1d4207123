"""Exception types shared across the package."""


class SchottkyDimerError(Exception):
    """Base class for all package-specific failures."""


class AdmissibilityError(SchottkyDimerError):
    """Group or graph data violates a geometric admissibility requirement."""


class TruncationError(SchottkyDimerError):
    """A truncated series or lattice sum failed its tail or conditioning test."""


class GraphError(SchottkyDimerError):
    """Malformed minimal-graph data; parse failures carry the line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(SchottkyDimerError):
    """Invalid or unsupported run configuration."""


class QuadratureError(SchottkyDimerError):
    """Adaptive integration failed to reach the requested tolerance."""


class PoleCollisionError(SchottkyDimerError):
    """An evaluation point landed too close to a pole of a truncated series."""
