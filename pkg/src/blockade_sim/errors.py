"""Exception types shared across the package."""


class BlockadeSimError(Exception):
    """Base class for all errors raised by blockade_sim."""


class ParameterError(BlockadeSimError, ValueError):
    pass


class TruncationError(ParameterError):
    """Photon-number truncation below what the model needs."""


class DimensionMismatchError(BlockadeSimError, ValueError):
    """Operators or vectors living on different spaces."""


class SingularDenominatorError(BlockadeSimError, ArithmeticError):
    """A closed-form expression hit a (near-)vanishing denominator."""


class UndefinedCorrelationError(BlockadeSimError, ArithmeticError):
    """Correlation requested for a state with (numerically) no photons."""


class StepSizeError(ParameterError):
    """Integration step too large for the explicit scheme to be stable."""


class SteadyStateError(BlockadeSimError, RuntimeError):
    """Steady state is degenerate or the solve did not converge."""


class InvariantViolation(BlockadeSimError, RuntimeError):
    """A density matrix left its physical tolerances."""


class ConfigError(BlockadeSimError, ValueError):
    """Sweep configuration failed to parse or validate."""
