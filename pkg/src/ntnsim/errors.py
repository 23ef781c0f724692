"""Exception types raised by the simulator."""


class DomainError(ValueError):
    """An argument is outside the physical/mathematical domain of an operation."""


class ContractError(ValueError):
    """Inputs violate an interface contract (dimension mismatch, empty input, ...)."""


class ConfigurationError(ValueError):
    """A scenario configuration is invalid or cannot be parsed."""


class NumericalError(ArithmeticError):
    """A linear-algebra step failed (singular or rank-deficient system)."""


class InfeasibleError(RuntimeError):
    """A resource-allocation problem has no feasible solution."""
