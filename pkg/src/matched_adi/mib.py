"""Interface-aware stencils: one-sided weights, tangential derivatives, and
fictitious values.

A second-difference stencil that straddles the interface is repaired by
substituting fictitious values: smooth extensions of the field from one
side onto nodes of the other side.  The extensions are fixed by the two
physical matching conditions at the cut,

    [u] = phi,          [alpha u_d] = psi_d,

where d is the grid direction of the host line and psi_d is the decomposed
per-axis flux jump.  Discretising both conditions with one-sided formulas
that never reference values from across the interface yields a small linear
system for the fictitious values (2x2 for a lone cut, 4x4 for a corner cut
pair), whose solution expresses each fictitious value as a linear
combination of same-line unknowns plus coefficients on the jump data.

The decomposed flux jump requires the tangential derivative on one side of
the interface.  It is approximated by a central difference of two auxiliary
values on the neighbouring parallel grid lines, each interpolated from
three same-side nodes, so the whole tangential stencil spans six nodes.

Orientation conventions: the normal angle theta points from the interior
(-) into the exterior (+); the tangent is tau = (-sin theta, cos theta).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin
from typing import Callable

import numpy as np

from .errors import (
    DuplicateAbscissae,
    SingularMibSystem,
    StencilUnavailable,
    TangentDegenerate,
)
from .geometry import CORNER, PLUS, CrossingGroup, Grid2D, LineCrossing

_TANGENT_TOL = 1e-10
_MIB_DET_TOL = 1e-14

# Window search limit for the auxiliary-point interpolation nodes.
_MAX_WINDOW_SHIFT = 8


@dataclass(frozen=True)
class OneSidedWeights:
    """Finite-difference weights of one derivative order at one point."""

    abscissae: tuple[float, ...]
    x0: float
    order: int
    weights: np.ndarray

    def apply(self, values) -> float:
        return float(np.dot(self.weights, values))


def fd_weights(abscissae, x0: float, order: int) -> OneSidedWeights:
    """Weights reproducing the ``order``-th derivative at ``x0`` exactly for
    polynomials of degree below the number of samples."""
    xs = np.asarray(abscissae, dtype=float)
    if xs.ndim != 1:
        raise ValueError("abscissae must be a 1D sequence")
    if order not in (0, 1):
        raise ValueError(f"derivative order must be 0 or 1, got {order}")
    if xs.size < order + 1:
        raise ValueError("need at least order + 1 sample points")
    scale = max(np.max(np.abs(xs - x0)), 1.0e-30)
    t = (xs - x0) / scale
    diffs = np.abs(t[:, None] - t[None, :]) + np.eye(xs.size)
    if np.min(diffs) < 1e-14:
        raise DuplicateAbscissae(f"coincident abscissae in {xs.tolist()}")
    vander = np.vander(t, increasing=True).T  # row r: t**r
    rhs = np.zeros(xs.size)
    rhs[order] = 1.0 if order == 0 else 1.0 / scale
    try:
        w = np.linalg.solve(vander, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded above
        raise DuplicateAbscissae(str(exc)) from exc
    return OneSidedWeights(tuple(xs.tolist()), float(x0), order, w)


@dataclass(frozen=True)
class JumpData:
    """Evaluators of the interface data: value jump, flux jump, and the
    tangential derivative of the value jump.  All take (x, y, t)."""

    phi: Callable
    psi: Callable
    phi_tau: Callable


@dataclass(frozen=True)
class TangentialStencil:
    """Six-node approximation of the tangential derivative at a cut.

    ``nodes`` are (i, j) grid indices, all on ``side``; applying ``weights``
    to the corresponding field values yields du/dtau at the cut point.
    """

    crossing: LineCrossing
    side: int
    nodes: tuple[tuple[int, int], ...]
    weights: np.ndarray
    aux_points: tuple[tuple[float, float], tuple[float, float]]

    def apply(self, u: np.ndarray) -> float:
        ii = [n[0] for n in self.nodes]
        jj = [n[1] for n in self.nodes]
        return float(np.dot(self.weights, u[ii, jj]))


def _interp_window(coords, sides_on_line, aux, want_side, h):
    """Three consecutive same-side nodes nearest the auxiliary coordinate.

    Scans windows centred on the node nearest ``aux`` and shifts outward
    (0, +1, -1, ...) until an all-``want_side`` window is found; windows
    containing the wrong side are skipped, which naturally pushes the
    selection away from the interface.  Steeply inclined tangents can put
    the auxiliary point past the node range or even outside the domain, in
    which case the nearest window extrapolates to it.
    """
    n = coords.size
    jc = int(round((aux - coords[0]) / h))
    jc = min(max(jc, 0), n - 1)
    for mag in range(_MAX_WINDOW_SHIFT + 1):
        for shift in ((mag,) if mag == 0 else (mag, -mag)):
            base = jc + shift
            lo, hi = base - 1, base + 1
            if lo < 0 or hi >= n:
                continue
            if not np.all(sides_on_line[lo : hi + 1] == want_side):
                continue
            return (lo, base, hi)
    return None


def build_tangential_stencil(
    grid: Grid2D, node_sides: np.ndarray, crossing: LineCrossing, side: int
) -> TangentialStencil:
    """Six-node tangential-derivative stencil drawn from one side only.

    The tangent line through the cut is intersected with the two parallel
    neighbouring grid lines; each auxiliary value is interpolated from three
    consecutive same-side nodes on its line (mild extrapolation is allowed
    when the auxiliary point falls just outside the node range, as happens
    for nearly grazing cuts on coarse grids).
    """
    th = crossing.theta
    h = grid.h
    coords = grid.axis_coords()
    line = crossing.line_index
    cut = crossing.cut_coordinate

    if crossing.axis == "y":
        # cut on vertical line x = x_i; auxiliary lines x_{i +/- 1}
        if abs(sin(th)) < _TANGENT_TOL:
            raise TangentDegenerate(
                f"tangent parallel to x = const lines at {crossing.point(grid)}"
            )
        offset = h * cos(th) / sin(th)
        scale = sin(th) / (2.0 * h)
        aux_spec = [(line - 1, cut + offset), (line + 1, cut - offset)]
    else:
        # cut on horizontal line y = y_j; auxiliary lines y_{j +/- 1}
        if abs(cos(th)) < _TANGENT_TOL:
            raise TangentDegenerate(
                f"tangent parallel to y = const lines at {crossing.point(grid)}"
            )
        offset = h * sin(th) / cos(th)
        scale = cos(th) / (2.0 * h)
        aux_spec = [(line + 1, cut - offset), (line - 1, cut + offset)]

    nodes: list[tuple[int, int]] = []
    weights: list[float] = []
    aux_points = []
    for sign, (nbr, aux) in zip((+1.0, -1.0), aux_spec):
        if nbr < 0 or nbr >= grid.n:
            raise StencilUnavailable(
                f"auxiliary line index {nbr} outside grid at {crossing.point(grid)}"
            )
        if crossing.axis == "y":
            sides_line = node_sides[nbr, :]
        else:
            sides_line = node_sides[:, nbr]
        window = _interp_window(coords, sides_line, aux, side, h)
        if window is None:
            raise StencilUnavailable(
                f"no 3-node side={side:+d} window near auxiliary point "
                f"{aux:.6g} on neighbour line {nbr} ({crossing.axis}-line {line})"
            )
        interp = fd_weights(coords[list(window)], aux, 0)
        for k, wk in zip(window, interp.weights):
            if crossing.axis == "y":
                nodes.append((nbr, k))
            else:
                nodes.append((k, nbr))
            weights.append(sign * scale * wk)
        if crossing.axis == "y":
            aux_points.append((grid.coord(nbr), aux))
        else:
            aux_points.append((aux, grid.coord(nbr)))

    return TangentialStencil(
        crossing=crossing,
        side=side,
        nodes=tuple(nodes),
        weights=np.asarray(weights),
        aux_points=(aux_points[0], aux_points[1]),
    )


def tangential_with_fallback(
    grid: Grid2D, node_sides: np.ndarray, crossing: LineCrossing
) -> TangentialStencil:
    """Exterior-side stencil, falling back to the interior side when the
    exterior window is unavailable."""
    try:
        return build_tangential_stencil(grid, node_sides, crossing, PLUS)
    except StencilUnavailable:
        return build_tangential_stencil(grid, node_sides, crossing, -PLUS)


def decomposed_flux_jump(
    crossing: LineCrossing,
    psi_value: float,
    phi_tau_value: float,
    u_tau: float,
    alpha_minus: float,
    alpha_plus: float,
    tau_side: int = PLUS,
) -> float:
    """Per-axis flux jump from the normal flux jump and tangential data.

    For a cut on a horizontal line ([alpha u_x] is matched) this returns
        cos(th) psi - sin(th) ((a+ - a-) u_tau + a_side phi_tau),
    and for a cut on a vertical line ([alpha u_y])
        sin(th) psi + cos(th) ((a+ - a-) u_tau + a_side phi_tau),
    where u_tau is the tangential derivative evaluated on ``tau_side`` and
    a_side is alpha of the opposite side (alpha- when u_tau is the exterior
    derivative, alpha+ otherwise).
    """
    th = crossing.theta
    dalpha = alpha_plus - alpha_minus
    a_side = alpha_minus if tau_side == PLUS else alpha_plus
    bracket = dalpha * u_tau + a_side * phi_tau_value
    if crossing.axis == "x":
        return cos(th) * psi_value - sin(th) * bracket
    return sin(th) * psi_value + cos(th) * bracket


def _side_factors(side: int, alpha_minus: float, alpha_plus: float):
    """(value-equation sign, flux-equation signed alpha) of one side."""
    if side == PLUS:
        return 1.0, alpha_plus
    return -1.0, -alpha_minus


@dataclass(frozen=True)
class FictitiousStencil:
    """One fictitious value as a linear map of line unknowns and jump data.

    ``node`` is the line-local index carrying the fictitious value,
    ``implicit_nodes``/``implicit_weights`` the combination of same-line
    unknowns at the new time level, and ``slot_coeffs`` the coefficients on
    the nonhomogeneous slots ((phi, psi_d) for a lone cut, (phi1, psi_d1,
    phi2, psi_d2) for a corner pair).  ``tangential`` holds the stencils
    whose application to the current field feeds the psi_d slots.
    """

    node: int
    extension_side: int
    implicit_nodes: tuple[int, ...]
    implicit_weights: np.ndarray
    slot_coeffs: np.ndarray
    tangential: tuple[TangentialStencil, ...] = ()


def solve_regular_fictitious(
    crossing: LineCrossing,
    alpha_minus: float,
    alpha_plus: float,
    grid: Grid2D,
) -> tuple[FictitiousStencil, FictitiousStencil]:
    """Fictitious-value pair for a lone cut between line nodes J and J+1.

    Both matching conditions are discretised with 3-point one-sided
    formulas; the returned stencils carry the extension of the far side
    onto node J and of the near side onto node J+1, each as a combination
    of the four line unknowns J-1 .. J+2 plus (phi, psi_d) slots.
    """
    jlo = crossing.left_node
    if jlo - 1 < 0 or jlo + 2 >= grid.n:
        raise StencilUnavailable(
            f"cut between nodes {jlo}, {jlo + 1} too close to the boundary"
        )
    c = grid.axis_coords()
    cut = crossing.cut_coordinate
    s_lo = crossing.side_of_left
    s_hi = -s_lo

    w_lo = [fd_weights(c[jlo - 1 : jlo + 2], cut, order) for order in (0, 1)]
    w_hi = [fd_weights(c[jlo : jlo + 3], cut, order) for order in (0, 1)]
    f_lo = _side_factors(s_lo, alpha_minus, alpha_plus)
    f_hi = _side_factors(s_hi, alpha_minus, alpha_plus)

    # unknowns: F0 = far-side extension at node J, F1 = near-side at J+1
    a = np.empty((2, 2))
    k = np.empty((2, 4))  # coefficients of (u_{J-1}, u_J, u_{J+1}, u_{J+2})
    for e in (0, 1):
        wl, wh = w_lo[e].weights, w_hi[e].weights
        a[e, 0] = f_hi[e] * wh[0]
        a[e, 1] = f_lo[e] * wl[2]
        k[e] = [f_lo[e] * wl[0], f_lo[e] * wl[1], f_hi[e] * wh[1], f_hi[e] * wh[2]]

    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det) < _MIB_DET_TOL:
        raise SingularMibSystem(
            f"matching system determinant {det:.3e} at cut "
            f"{crossing.point(grid)} on {crossing.axis}-line {crossing.line_index}"
        )
    ainv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
    node_w = -ainv @ k          # (2, 4) weights on line unknowns
    slot_w = ainv               # (2, 2) coefficients on (phi, psi_d)

    nodes = tuple(range(jlo - 1, jlo + 3))
    lower = FictitiousStencil(jlo, s_hi, nodes, node_w[0], slot_w[0])
    upper = FictitiousStencil(jlo + 1, s_lo, nodes, node_w[1], slot_w[1])
    return lower, upper


def solve_corner_fictitious(
    group: CrossingGroup,
    alpha_minus: float,
    alpha_plus: float,
    grid: Grid2D,
) -> tuple[FictitiousStencil, ...]:
    """Four fictitious values for a cut pair with one node in between.

    The matching conditions are imposed at both cuts with 4-point,
    third-order one-sided formulas.  The three extensions needed to repair
    the second difference (at nodes j-1, j, j+1) are augmented by a fourth
    at j-2 or j+2, chosen on the side whose cut lies closer to its outer
    node, to square the system.
    """
    if group.kind != CORNER:
        raise ValueError("corner solver called on a non-corner group")
    c1, c2 = group.crossings
    j = c1.right_node
    if c2.left_node != j:
        raise ValueError("corner group must have exactly one node between cuts")
    if j - 2 < 0 or j + 2 >= grid.n:
        raise StencilUnavailable(f"corner pair at node {j} too close to the boundary")

    c = grid.axis_coords()
    s_in = -c1.side_of_left       # side of the middle node j
    s_out = c1.side_of_left
    if c2.side_of_left != s_in:
        raise SingularMibSystem("inconsistent sides around a corner cut pair")

    d1 = abs(c1.cut_coordinate - c[j - 1])
    d2 = abs(c[j + 1] - c2.cut_coordinate)
    n4 = j - 2 if d1 < d2 else j + 2

    # 4-point sample sets: outer side leans away from each cut, the sliver
    # side always uses the same four nodes including the extra extension.
    out_nodes = {1: (j - 2, j - 1, j, j + 1), 2: (j - 1, j, j + 1, j + 2)}
    in_nodes = (j - 2, j - 1, j, j + 1) if n4 == j - 2 else (j - 1, j, j + 1, j + 2)

    f_out = _side_factors(s_out, alpha_minus, alpha_plus)
    f_in = _side_factors(s_in, alpha_minus, alpha_plus)

    # unknown order: F at j-1 (in-side), j (out-side), j+1 (in-side), n4 (in-side)
    unknown_at = {j - 1: 0, j: 1, j + 1: 2, n4: 3}
    real_cols = {j - 2: 0, j - 1: 1, j: 2, j + 1: 3, j + 2: 4}

    a = np.zeros((4, 4))
    k = np.zeros((4, 5))
    row = 0
    for cut_no, crossing in ((1, c1), (2, c2)):
        cut = crossing.cut_coordinate
        for order in (0, 1):
            for nodes_g, fac in ((out_nodes[cut_no], f_out), (in_nodes, f_in)):
                w = fd_weights(c[list(nodes_g)], cut, order)
                for node, wk in zip(nodes_g, w.weights):
                    coef = fac[order] * wk
                    # out-side: fictitious only at node j; in-side: real only at j
                    is_fict = (node == j) if fac is f_out else (node != j)
                    if is_fict:
                        a[row, unknown_at[node]] += coef
                    else:
                        k[row, real_cols[node]] += coef
            row += 1

    if abs(np.linalg.det(a)) < _MIB_DET_TOL:
        raise SingularMibSystem(
            f"corner matching system determinant {np.linalg.det(a):.3e} "
            f"around node {j} on {group.axis}-line {group.line_index}"
        )
    ainv = np.linalg.inv(a)
    node_w = -ainv @ k
    slot_w = ainv

    nodes5 = tuple(range(j - 2, j + 3))
    order_nodes = (j - 1, j, j + 1, n4)
    sides = (s_in, s_out, s_in, s_in)
    return tuple(
        FictitiousStencil(nd, sd, nodes5, node_w[m], slot_w[m])
        for m, (nd, sd) in enumerate(zip(order_nodes, sides))
    )
