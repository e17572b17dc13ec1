"""Exception hierarchy shared by all modules."""


class MeasureError(Exception):
    """Base class for every error raised by this package."""


class AmbiguousPrefix(MeasureError):
    """One string is a prefix of the other and the reals were not declared equal."""


class InvariantViolation(MeasureError, ValueError):
    """A structure failed one of its defining invariants.

    ``where`` names the offending string (or pair) when there is one.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class NotExact(MeasureError, ValueError):
    """An operation that needs an exact oracle received an approximate one."""


class DepthExceeded(MeasureError, LookupError):
    """A cylinder below the depth of a ``stop`` assignment was queried."""


class NotContinuousWithin(MeasureError):
    def __init__(self, max_depth, epsilon=None):
        msg = f"no level <= {max_depth} has all cylinders of mass <= {epsilon}"
        super().__init__(msg)
        self.max_depth = max_depth
        self.epsilon = epsilon


class Indecisive(MeasureError):
    """Approximations never separated a cylinder's mass from the threshold."""

    def __init__(self, sigma, precision):
        super().__init__(f"cannot decide mass of {sigma or '@'} at precision {precision}")
        self.sigma = sigma
        self.precision = precision


class DeadNode(MeasureError):
    def __init__(self, sigma):
        super().__init__(f"tree node {sigma or '@'} has no child in the tree")
        self.sigma = sigma


class ModulusUnavailable(MeasureError):
    def __init__(self, k, depth):
        super().__init__(f"level l_{k} is not reached within depth {depth}")
        self.k = k
        self.depth = depth


class Infeasible(MeasureError):
    def __init__(self, sigma):
        super().__init__(f"no measure satisfies the constraints at {sigma or '@'}")
        self.sigma = sigma


class MissingConstraint(MeasureError, KeyError):
    def __init__(self, sigma):
        super().__init__(f"w/Pre undefined at {sigma or '@'}")
        self.sigma = sigma

    def __str__(self):
        return self.args[0]


class FormatError(MeasureError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
