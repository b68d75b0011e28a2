"""Exception hierarchy shared by every engine.

The CLI maps :class:`ConfigError` to exit code 2 and every other
:class:`HolonomyError` to exit code 3.
"""


class HolonomyError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(HolonomyError):
    """Malformed run configuration or command-line input."""


class DomainError(HolonomyError, ValueError):
    """Input outside the mathematical domain of an operation."""


class DSLError(HolonomyError):
    """Semantic error in a matrix definition (shape, identifiers)."""


class DSLSyntaxError(DSLError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EvaluationError(HolonomyError):
    """A matrix entry evaluated to a non-finite value."""


class HermiticityError(HolonomyError):
    def __init__(self, deviation, tol):
        super().__init__(
            f"matrix is not Hermitian: max |H - H^dagger| = {deviation:.3e} > {tol:.3e}"
        )
        self.deviation = deviation
        self.tol = tol


class NumericError(HolonomyError):
    """Iteration cap hit, or cancellation swamped the result."""


class DegeneracyError(HolonomyError):
    def __init__(self, index, gap, gap_tol):
        super().__init__(
            f"spectral gap {gap:.3e} below {gap_tol:.3e} at sample {index}"
        )
        self.index = index
        self.gap = gap


class ResolutionError(HolonomyError):
    """Consecutive samples too far apart to follow a single band."""


class UndefinedPhaseError(HolonomyError):
    """Overlap too close to zero for its argument to mean anything."""


class SingularityError(HolonomyError):
    """Path passes through (or too close to) the solenoid axis."""


class GaugeError(DomainError):
    """Gauge function fails its declared winding or evaluates non-finite."""


class InvariantViolation(HolonomyError, ValueError):
    """Constructor arguments break a type invariant."""
