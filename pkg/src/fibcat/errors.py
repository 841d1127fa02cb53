"""Exception hierarchy shared by all fibcat modules."""


class FibcatError(Exception):
    """Base class for every error raised by fibcat."""


class StructuralError(FibcatError, ValueError):
    """A table refers to an index outside its declared range.

    Distinct from an axiom failure, which is reported (not raised) by the
    validators.
    """


class PreconditionError(FibcatError, ValueError):
    """An operation was called with arguments violating its precondition."""


class NotAFibration(FibcatError):
    """No Cartesian lift exists for some (base arrow, codomain object) pair."""

    def __init__(self, alpha, Y, message=None):
        self.alpha = alpha
        self.Y = Y
        super().__init__(message or f"no Cartesian lift of base arrow {alpha} with codomain {Y}")


class InternalConsistencyError(FibcatError, AssertionError):
    """A uniqueness or closure claim that must hold for valid Cartesian data failed."""


class GlueConditionViolated(FibcatError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"glue data rejected: {report.first}")


class MissingPullback(FibcatError):
    def __init__(self, cospan):
        self.cospan = cospan
        super().__init__(f"no pullback for cospan {cospan}")


class RelationNotPreserved(FibcatError):
    def __init__(self, pair, image):
        self.pair = pair
        self.image = image
        super().__init__(f"base map sends related pair {pair} to unrelated pair {image}")


class ProductNotPreserved(FibcatError):
    def __init__(self, functor, sizes):
        self.sizes = sizes
        super().__init__(f"{functor} does not preserve the product of sets of sizes {sizes}")


class SectionViolation(FibcatError):
    pass


class ShapeMismatch(FibcatError, ValueError):
    pass


class NotAPullback(FibcatError):
    """A square declared to be a pullback is not one."""

    def __init__(self, point, message):
        self.point = point
        super().__init__(message)
