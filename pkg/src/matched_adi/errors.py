"""Structured exceptions raised by the solver stack.

Every error carries enough context (axis, line, node or cut location) to
identify the offending geometry or linear system without a debugger.
"""

from __future__ import annotations


class MatchedAdiError(Exception):
    """Base class for all solver errors."""


class RefinementRequired(MatchedAdiError):
    """Two interface cuts share a grid cell; the mesh cannot resolve them."""

    def __init__(self, axis: str, line_index: int, cell: int, msg: str = ""):
        self.axis = axis
        self.line_index = line_index
        self.cell = cell
        super().__init__(
            msg
            or f"two cuts inside one cell on {axis}-line {line_index}, "
            f"cell ({cell}, {cell + 1}); a finer grid is required"
        )


class TooManyCrossings(MatchedAdiError):
    """A grid line intersects the interface more than twice."""

    def __init__(self, axis: str, line_index: int, count: int):
        self.axis = axis
        self.line_index = line_index
        self.count = count
        super().__init__(
            f"{count} interface cuts on {axis}-line {line_index}; at most two are supported"
        )


class DegenerateNormal(MatchedAdiError):
    """The implicit-function gradient vanishes where a normal is needed."""


class StencilUnavailable(MatchedAdiError):
    """Not enough usable same-side nodes to build a one-sided stencil."""


class TangentDegenerate(MatchedAdiError):
    """Interface tangent is parallel to the auxiliary grid lines."""


class DuplicateAbscissae(MatchedAdiError):
    """Finite-difference weights requested on coincident sample points."""


class SingularMibSystem(MatchedAdiError):
    """The local fictitious-value system is numerically singular."""


class ZeroPivot(MatchedAdiError):
    """A tridiagonal elimination hit a vanishing pivot."""

    def __init__(self, row: int, value: float = 0.0):
        self.row = row
        self.value = value
        super().__init__(f"zero pivot at row {row} (|pivot| = {abs(value):.3e})")


class PatternMismatch(MatchedAdiError):
    """Out-of-band entries do not fit the declared perturbation pattern."""


class SingularCapacitance(MatchedAdiError):
    """The low-rank capacitance matrix of a Woodbury solve is singular."""


class NoConvergence(MatchedAdiError):
    """An iterative eigenvalue or linear solve failed to converge."""


class IterativeSolveNoConvergence(NoConvergence):
    """An inner linear solve missed its residual target."""


class FitUnderdetermined(MatchedAdiError):
    """Too few data points remain to fit a convergence rate."""
