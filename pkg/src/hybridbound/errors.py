"""Exception types shared across the package."""


class HybridBoundError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HybridBoundError, ValueError):
    """A numeric argument is non-finite, non-positive or otherwise invalid."""


class ShapeError(HybridBoundError, ValueError):
    """Array dimensions do not compose."""


class DomainError(HybridBoundError, ValueError):
    """An argument lies outside the range where a formula is valid."""


class ContractViolation(HybridBoundError, ValueError):
    """An input breaks a documented precondition (e.g. non-unitary gate)."""


class DivergenceError(HybridBoundError, RuntimeError):
    """Training produced a non-finite risk."""

    def __init__(self, step, value):
        super().__init__(f"training diverged at step {step}: risk = {value!r}")
        self.step = step
        self.value = value


class ConfigError(HybridBoundError, ValueError):
    """A configuration document failed to parse or validate.

    ``problems`` holds every violation found, not only the first.
    """

    def __init__(self, problems, line=None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        self.line = line
        msg = "; ".join(self.problems)
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
