"""Exception types raised by opcalc."""


class OpcalcError(Exception):
    """Base class for all library errors."""


class GeometryError(OpcalcError, ValueError):
    """Invalid partition or mismatched geometries."""


class GeometryNotAxisComplete(GeometryError):
    def __init__(self, axis, cell, other):
        self.axis = axis
        self.cell = cell
        self.other = other
        super().__init__(
            f"partition is not axis-complete along axis {axis}: cell {other} "
            f"partially overlaps the axis line through cell {cell}"
        )


class NotInvertible(OpcalcError, ArithmeticError):
    """A representation block is numerically singular."""

    def __init__(self, alpha, condition):
        self.alpha = alpha
        self.condition = condition
        super().__init__(
            f"block B_{set_repr(alpha)} is singular (condition estimate {condition:.3e})"
        )


class FunctionUndefinedOnSpectrum(OpcalcError, ArithmeticError):
    def __init__(self, alpha, eigenvalue, reason=""):
        self.alpha = alpha
        self.eigenvalue = eigenvalue
        msg = f"function undefined at eigenvalue {eigenvalue!r} of block B_{set_repr(alpha)}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class EigenSolverFailure(OpcalcError, ArithmeticError):
    def __init__(self, alpha, cause):
        self.alpha = alpha
        super().__init__(f"eigenvalue solver failed on block B_{set_repr(alpha)}: {cause}")


class BoundDiverges(OpcalcError, ArithmeticError):
    """The Neumann-series inverse bound needs delta * ||A^-1|| < 1."""


class SizeGuardExceeded(OpcalcError, MemoryError):
    def __init__(self, side, limit):
        self.side = side
        self.limit = limit
        super().__init__(
            f"dense realization of side {side} exceeds the guard {limit} "
            "(raise it with max_side= or OPCALC_MAX_DENSE)"
        )


def set_repr(alpha):
    """Render a bitmask subset as ``{1,3}``."""
    axes = [str(n + 1) for n in range(alpha.bit_length()) if alpha >> n & 1]
    return "{" + ",".join(axes) + "}"
