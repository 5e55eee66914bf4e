"""Exception hierarchy shared by all quantclock modules."""


class QuantclockError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QuantclockError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidInputError(QuantclockError, ValueError):
    """Structurally invalid input (non-monotone cdf, decreasing clock path, ...)."""


class ConfigError(QuantclockError, ValueError):
    """Invalid run configuration (unknown keys, missing seed, bad counts)."""


class NumericsError(QuantclockError, ArithmeticError):
    """A numerical routine failed to reach its stated tolerance.

    ``achieved`` carries the tolerance actually reached when known.
    """

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class DivergenceError(NumericsError):
    """An iterative bracket/search grew beyond its safety limit."""


class UnsupportedLawError(QuantclockError, ValueError):
    """A law lacks the ingredient (cdf, density, bound) an operation needs."""


class SamplerStuckError(QuantclockError, RuntimeError):
    """A rejection or coupling loop exceeded its iteration cap.

    ``acceptance_rate`` reports the observed acceptance fraction when available.
    """

    def __init__(self, msg, acceptance_rate=None):
        super().__init__(msg)
        self.acceptance_rate = acceptance_rate


class EnvelopeFailureError(SamplerStuckError):
    """A rejection envelope was violated or its acceptance collapsed."""


class DegenerateDError(SamplerStuckError):
    """Coupling-from-the-past cannot coalesce (mixing variable a.s. constant)."""


class PreconditionError(QuantclockError, ValueError):
    """A documented precondition of a design construction is violated."""


class NotSelfDecomposableError(PreconditionError):
    """A target law fed to the OU-style design is not self-decomposable."""


class DegenerateSplitError(PreconditionError):
    """The gamma split degenerates (mixing variable identically one)."""


class VerificationError(QuantclockError, RuntimeError):
    """A statistical verification battery failed."""
