"""Exception hierarchy shared by every module."""


class ConvexDomError(Exception):
    """Base class for all library errors."""


class NegativeEntry(ConvexDomError):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"negative entry {value!r} at ({i}, {j})")


class RowSumViolation(ConvexDomError):
    def __init__(self, i, total):
        self.i, self.total = i, total
        super().__init__(f"row {i} sums to {total!r}, expected 1")


class InvalidBelief(ConvexDomError):
    pass


class LengthMismatch(ConvexDomError):
    pass


class ShapeMismatch(ConvexDomError):
    pass


class OutOfSupport(ConvexDomError):
    pass


class QuantileOutOfRange(ConvexDomError):
    pass


class GridRequired(ConvexDomError):
    pass


class MixedSupport(ConvexDomError):
    pass


class ZeroNormalizer(ConvexDomError):
    def __init__(self, message="observation has zero probability under the model", step=None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)


class EnumerationCapExceeded(ConvexDomError):
    def __init__(self, count, cap, k=None):
        self.count, self.cap, self.k = count, cap, k
        where = f" at k={k}" if k is not None else ""
        super().__init__(f"enumeration of {count} tuples{where} exceeds cap {cap}")


class InsufficientCoverage(ConvexDomError):
    def __init__(self, x, mass):
        self.x, self.mass = x, mass
        super().__init__(f"observation grid captures only {mass:.9f} of the mass for state {x}")


class WrongFamilies(ConvexDomError):
    pass


class NotTwoState(ConvexDomError):
    pass


class NoConvergence(ConvexDomError):
    def __init__(self, iterations):
        self.iterations = iterations
        super().__init__(f"value iteration did not converge in {iterations} iterations")


class ModelFileError(ConvexDomError):
    """Parse or validation error in a model file, with an optional position."""

    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class UnknownSensor(ConvexDomError):
    pass


class UnknownExample(ConvexDomError):
    pass


class CoverageWarning(UserWarning):
    """Posterior mass has collapsed onto a few grid cells."""
