"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the region where a closed-form expression is defined."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NumericalFailure(RuntimeError):
    """Base class for failures raised while time stepping."""


class PositivityError(NumericalFailure):
    def __init__(self, cell, x, h):
        self.cell = cell
        self.x = x
        self.h = h
        super().__init__(f"nonpositive water depth h={h!r} in cell {cell} (x={x:.6g})")


class DivergenceError(NumericalFailure):
    def __init__(self, cell, x, what):
        self.cell = cell
        self.x = x
        self.what = what
        super().__init__(f"divergence in cell {cell} (x={x:.6g}): {what}")


class StepLimitError(NumericalFailure):
    """Raised when an integration exceeds its step budget."""
