"""Exception types shared across the package."""


class LoccacheError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LoccacheError):
    """Invalid configuration; the message names the offending field."""


class AllocationError(LoccacheError):
    """Memory allocation problem is infeasible or degenerate."""


class OracleScopeError(LoccacheError):
    """A brute-force oracle was asked for an instance outside its scope."""


class IntegralityError(LoccacheError):
    """A cache multiplicity t(j) that must be an integer is not."""


class InfeasibleError(LoccacheError):
    """No feasible answer exists (e.g. no file size meets the deadline)."""
