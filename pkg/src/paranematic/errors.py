"""Exception types shared across the package."""


class ParanematicError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ParanematicError):
    """A run configuration file is missing, malformed, or inconsistent."""


class OverlapError(ParanematicError):
    """Two particles overlap or touch where a positive gap is required."""


class IllConditioned(ParanematicError):
    """A linear system is too ill-conditioned to solve reliably."""

    def __init__(self, message: str, cond: float = float("nan")):
        super().__init__(message)
        self.cond = cond


class NonConverged(ParanematicError):
    """An iterative solve exhausted its iteration budget."""

    def __init__(self, message: str, iterations: int = -1, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class MeshTooCoarse(ParanematicError):
    """A grid spacing is too large to resolve the geometry."""


class InsufficientDecay(ParanematicError):
    """Field values in a fitting window are too small or too noisy to fit a decay rate."""
