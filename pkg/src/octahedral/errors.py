"""Exception types shared across the package."""


class OctahedralError(Exception):
    """Base class for all package errors."""


class NonPositiveG(OctahedralError, ValueError):
    def __init__(self, g):
        super().__init__(f"base circumradius must be positive, got g={g!r}")
        self.g = g


class InvalidOrientation(OctahedralError, ValueError):
    pass


class DegenerateLeg(OctahedralError, ValueError):
    def __init__(self, leg, length):
        super().__init__(f"leg {leg} is degenerate (length {length:.3e})")
        self.leg = leg
        self.length = length


class SingularJacobian(OctahedralError, ArithmeticError):
    def __init__(self, margin, tol):
        super().__init__(f"Jacobian is singular: normalized det {margin:.3e} below {tol:.1e}")
        self.margin = margin
        self.tol = tol


class StructureViolation(OctahedralError, ArithmeticError):
    """det J / g^3 failed to be reproduced by a quadratic in g."""

    def __init__(self, residual, tol):
        super().__init__(f"hold-out residual {residual:.3e} exceeds {tol:.1e}")
        self.residual = residual
        self.tol = tol


class DegenerateOrientation(OctahedralError, ValueError):
    def __init__(self, guard, value):
        super().__init__(f"orientation violates guard {guard} (value {value:.3e}); use classify_orientation")
        self.guard = guard
        self.value = value


class CaseMismatch(OctahedralError, ValueError):
    pass


class PlanInfeasible(OctahedralError):
    """Raised when an endpoint column of the planning grid has no feasible cell."""

    def __init__(self, message, failure):
        super().__init__(message)
        self.failure = failure


class InfeasibleStart(PlanInfeasible):
    pass


class InfeasibleEnd(PlanInfeasible):
    pass
