"""Exception types raised by the library."""


class ContractViolation(ValueError):
    """An argument violated a documented precondition or type invariant."""


class EstimationError(RuntimeError):
    """Count data too degenerate to produce an estimate (e.g. all-zero counts)."""


class ConfigError(ValueError):
    """Invalid or unparseable experiment configuration; message names the field."""
