"""Exception hierarchy shared by all modules.

Every domain failure raises a subclass of :class:`BratteliError`; the CLI
maps these to exit code 1 and usage problems to exit code 2.
"""


class BratteliError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class ShapeMismatch(BratteliError):
    pass


class ZeroRowOrColumn(BratteliError):
    pass


class EmptyRootLevel(BratteliError):
    pass


class DepthExceeded(BratteliError):
    pass


class InvalidCuts(BratteliError):
    pass


class IndexOutOfRange(BratteliError):
    pass


class NoPairableEdges(BratteliError):
    pass


class BundlesTooSmall(BratteliError):
    def __init__(self, required, found):
        super().__init__(f"bundle sizes must exceed {required}, found {found}")
        self.required = required
        self.found = found


class ConsistencyViolation(BratteliError):
    def __init__(self, level, vertex, lhs, rhs):
        super().__init__(
            f"consistency fails at level {level}, vertex {vertex}: {lhs} != {rhs}"
        )
        self.level = level
        self.vertex = vertex
        self.lhs = lhs
        self.rhs = rhs


class NotNormalized(BratteliError):
    pass


class NotPrimitive(BratteliError):
    pass


class UnsupportedTail(BratteliError):
    pass


class NotSymmetric(BratteliError):
    pass


class ToleranceAmbiguous(BratteliError):
    pass


class UnreachableTarget(BratteliError):
    def __init__(self, targets, best):
        super().__init__(f"cannot realize fractions {targets}; best achievable {best}")
        self.targets = targets
        self.best = best


class WrongDiagram(BratteliError):
    pass


class ArgumentOutOfRange(BratteliError):
    pass


class ParseError(BratteliError):
    """A structured input file failed to parse; message carries the field path."""
