"""Operator assembly and time stepping for the interface heat problem.

The heat equation is divided through by the piecewise diffusivity, so each
node carries the equation (1/a) u_t = u_xx + u_yy + f/a, and the interface
enters purely through corrected second-difference operators.  Near a cut
the correction substitutes fictitious values, which splits each corrected
operator into three time-invariant pieces

    delta_ss u  =  D u(new)  +  B u(current)  +  Phi(t),

where D couples same-line unknowns at the new time level (the perturbed
tridiagonal line systems), B feeds in the six-node tangential stencils
applied to the current field, and Phi collects the prescribed jump data.
Everything except the slot values of Phi is assembled once per (grid,
interface, dt) and reused for all steps.

Two integrators share the assembly: the two-sweep splitting scheme (one
tridiagonal solve per line and direction per step) and the unsplit
backward Euler companion used for stability analysis and cross-checks.
The intermediate sweep variable is given the boundary values consistent
with eliminating it from the two sweeps, so the splitting scheme satisfies
its factored one-step identity to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IterativeSolveNoConvergence
from .fields import CachedPiecewise, PiecewiseField, cache_on_points
from .geometry import (
    CORNER,
    PLUS,
    REGULAR,
    CrossingTopology,
    Grid2D,
    InterfaceModel,
    classify_grid,
    find_crossings,
)
from .linalg import BatchedTridiagonalSolver, PerturbedSystem, TridiagonalMatrix, reduce_system
from .mib import (
    FictitiousStencil,
    JumpData,
    solve_corner_fictitious,
    solve_regular_fictitious,
    tangential_with_fallback,
)

DOUGLAS = "douglas"
EULER = "euler"


@dataclass
class ProblemSpec:
    """Complete description of one interface heat problem on a grid."""

    grid: Grid2D
    interface: InterfaceModel | None
    alpha_minus: float
    alpha_plus: float
    source: PiecewiseField
    boundary: Callable  # Dirichlet data g(x, y, t) on the domain boundary
    initial: PiecewiseField  # evaluated at t = 0
    jumps: JumpData | None = None

    def __post_init__(self):
        if self.alpha_minus <= 0 or self.alpha_plus <= 0:
            raise ValueError("diffusivities must be positive")
        self.side = classify_grid(self.grid, self.interface)
        self.plus_mask = self.side == PLUS
        self.alpha = np.where(self.plus_mask, self.alpha_plus, self.alpha_minus)
        self.inv_alpha = 1.0 / self.alpha

    def initial_state(self) -> "FieldState":
        X, Y = self.grid.node_mesh()
        u0 = self.initial.evaluate(X, Y, 0.0, self.plus_mask)
        return FieldState(u0, 0.0)


@dataclass
class FieldState:
    """Field values on the full grid at one time, indexed u[i, j]."""

    u: np.ndarray
    t: float

    def copy(self) -> "FieldState":
        return FieldState(self.u.copy(), self.t)


@dataclass
class LineSystem:
    """Implicit matrix of one grid line: bands plus out-of-band entries."""

    axis: str
    index: int
    tri: TridiagonalMatrix
    entries: list[tuple[int, int, float]]
    groups: list[tuple[str, int]]

    def to_perturbed(self) -> PerturbedSystem:
        return PerturbedSystem(self.tri.copy(), list(self.entries), list(self.groups))


@dataclass
class AxisOperators:
    """Assembled pieces of one corrected second-difference direction."""

    axis: str
    dss: sp.csr_matrix          # implicit-side operator rows (time level k+1)
    btan: sp.csr_matrix         # tangential feedback on the current field
    cslots: sp.csr_matrix       # map from jump-data slots to node corrections
    slot_data: Callable         # t -> slot value vector
    n_slots: int
    lines: list[LineSystem]
    solver: BatchedTridiagonalSolver
    stencils: dict = field(default_factory=dict)

    def explicit_apply(self, u_flat: np.ndarray, t: float) -> np.ndarray:
        """Corrected second difference of a known field at time t."""
        out = self.dss @ u_flat
        if self.n_slots:
            out += self.btan @ u_flat
            out += self.cslots @ self.slot_data(t)
        return out


@dataclass
class OperatorSet:
    """Everything assemble-once the integrators need for a fixed dt."""

    problem: ProblemSpec
    topology: CrossingTopology
    dt: float
    x: AxisOperators
    y: AxisOperators
    _source_cache: CachedPiecewise
    _edge_cache: dict
    _euler_lu: object = None
    _euler_matrix: sp.csr_matrix = None

    def source_at(self, t: float) -> np.ndarray:
        return self._source_cache.at(t)

    def boundary_edges(self, t: float) -> dict[str, np.ndarray]:
        return {name: cache.at(t) for name, cache in self._edge_cache.items()}

    def axis(self, axis: str) -> AxisOperators:
        return self.x if axis == "x" else self.y

    def euler_matrix(self) -> sp.csr_matrix:
        """Global unsplit implicit matrix with Dirichlet boundary rows."""
        if self._euler_matrix is None:
            n = self.problem.grid.n
            interior = _interior_mask(n).ravel()
            diag = np.where(interior, self.problem.inv_alpha.ravel(), 1.0)
            a = sp.diags(diag) - self.dt * (self.x.dss + self.y.dss)
            self._euler_matrix = a.tocsr()
        return self._euler_matrix

    def euler_feedback_matrix(self) -> sp.csr_matrix:
        """Current-field coefficient matrix of the unsplit scheme."""
        n = self.problem.grid.n
        interior = _interior_mask(n).ravel()
        diag = np.where(interior, self.problem.inv_alpha.ravel(), 0.0)
        return (sp.diags(diag) + self.dt * (self.x.btan + self.y.btan)).tocsr()

    def _lu(self):
        if self._euler_lu is None:
            self._euler_lu = spla.splu(self.euler_matrix().tocsc())
        return self._euler_lu


def _interior_mask(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=bool)
    m[1:-1, 1:-1] = True
    return m


def _flat_index(n: int, axis: str, line: int, k: int) -> int:
    """Flattened node index of line-local position k (row-major [i, j])."""
    if axis == "y":
        return line * n + k
    return k * n + line


class _SlotEvaluator:
    """Vectorised jump-data slots (phi_c, psi_c) for one axis' crossings.

    psi_c is the data part of the decomposed per-axis flux jump: the normal
    flux jump rotated into the axis plus the contribution of the prescribed
    tangential jump; the field-dependent tangential term lives in the B
    matrix instead.
    """

    def __init__(self, axis, crossings, tangential_sides, grid, jumps, alpha_minus, alpha_plus):
        self._jumps = jumps
        pts = np.array([c.point(grid) for c in crossings], dtype=float).reshape(-1, 2)
        self._px = pts[:, 0]
        self._py = pts[:, 1]
        theta = np.array([c.theta for c in crossings], dtype=float)
        a_side = np.where(np.array(tangential_sides) == PLUS, alpha_minus, alpha_plus)
        if axis == "x":
            self._c_psi = np.cos(theta)
            self._c_tau = -np.sin(theta) * a_side
        else:
            self._c_psi = np.sin(theta)
            self._c_tau = np.cos(theta) * a_side
        self.m = len(crossings)

    def __call__(self, t: float) -> np.ndarray:
        out = np.zeros(2 * self.m)
        if self.m == 0 or self._jumps is None:
            return out
        out[0::2] = self._jumps.phi(self._px, self._py, t)
        out[1::2] = self._c_psi * self._jumps.psi(self._px, self._py, t)
        out[1::2] += self._c_tau * self._jumps.phi_tau(self._px, self._py, t)
        return out


def _assemble_axis(problem: ProblemSpec, topology: CrossingTopology, dt: float, axis: str) -> AxisOperators:
    grid = problem.grid
    n = grid.n
    h = grid.h
    am, ap = problem.alpha_minus, problem.alpha_plus
    sides = problem.side

    groups = topology.groups.get(axis, []) if topology is not None else []
    crossings = [c for g in groups for c in g.crossings]
    crossing_slot = {id(c): 2 * k for k, c in enumerate(crossings)}

    # Corrected rows, one dict per perturbed line node: {line-local col: value}
    corrected: dict[tuple[int, int], dict[int, float]] = {}
    slot_coefs: list[tuple[int, int, float]] = []   # (flat row, slot col, coef)
    btan_coefs: list[tuple[int, int, float]] = []   # (flat row, flat col, coef)
    line_groups: dict[int, list[tuple[str, int]]] = {}
    stencils: dict = {}
    tangential_sides: list[int] = []

    def add_row(line, node, cols, weights):
        row = corrected.setdefault((line, node), {})
        for c_loc, w in zip(cols, weights):
            row[c_loc] = row.get(c_loc, 0.0) + w / (h * h)

    def add_slots(line, node, slot_pairs, fict: FictitiousStencil, tangs):
        """slot_pairs: [(crossing, phi_coef_index, psi_coef_index)] matching
        the stencil's slot layout; tangs: tangential stencil per crossing."""
        grow = _flat_index(n, axis, line, node)
        for (crossing, i_phi, i_psi), tang in zip(slot_pairs, tangs):
            base = crossing_slot[id(crossing)]
            cphi = fict.slot_coeffs[i_phi] / (h * h)
            cpsi = fict.slot_coeffs[i_psi] / (h * h)
            if cphi != 0.0:
                slot_coefs.append((grow, base, cphi))
            if cpsi != 0.0:
                slot_coefs.append((grow, base + 1, cpsi))
            kappa = _tangential_multiplier(axis, crossing.theta, am, ap)
            for (ci, cj), tw in zip(tang.nodes, tang.weights):
                v = cpsi * kappa * tw
                if v != 0.0:
                    btan_coefs.append((grow, ci * n + cj, v))

    for g in groups:
        line = g.line_index
        if g.kind == REGULAR:
            (c,) = g.crossings
            tang = tangential_with_fallback(grid, sides, c)
            tangential_sides.append(tang.side)
            lo, up = solve_regular_fictitious(c, am, ap, grid)
            jl = c.left_node
            # row jl: (u_{jl-1} - 2 u_jl + F_up) / h^2
            add_row(line, jl, (jl - 1, jl), (1.0, -2.0))
            add_row(line, jl, up.implicit_nodes, up.implicit_weights)
            add_slots(line, jl, [(c, 0, 1)], up, [tang])
            # row jl+1: (F_lo - 2 u_{jl+1} + u_{jl+2}) / h^2
            add_row(line, jl + 1, (jl + 1, jl + 2), (-2.0, 1.0))
            add_row(line, jl + 1, lo.implicit_nodes, lo.implicit_weights)
            add_slots(line, jl + 1, [(c, 0, 1)], lo, [tang])
            line_groups.setdefault(line, []).append((REGULAR, jl))
            stencils[(line, c.cut_coordinate)] = (lo, up, tang)
        else:
            c1, c2 = g.crossings
            t1 = tangential_with_fallback(grid, sides, c1)
            t2 = tangential_with_fallback(grid, sides, c2)
            tangential_sides.extend((t1.side, t2.side))
            f_lo, f_mid, f_hi, f_ext = solve_corner_fictitious(g, am, ap, grid)
            j = c1.right_node
            pairs = [(c1, 0, 1), (c2, 2, 3)]
            # row j-1: (u_{j-2} - 2 u_{j-1} + F_mid) / h^2
            add_row(line, j - 1, (j - 2, j - 1), (1.0, -2.0))
            add_row(line, j - 1, f_mid.implicit_nodes, f_mid.implicit_weights)
            add_slots(line, j - 1, pairs, f_mid, [t1, t2])
            # row j: (F_lo - 2 u_j + F_hi) / h^2
            add_row(line, j, (j,), (-2.0,))
            add_row(line, j, f_lo.implicit_nodes, f_lo.implicit_weights)
            add_row(line, j, f_hi.implicit_nodes, f_hi.implicit_weights)
            for st in (f_lo, f_hi):
                add_slots(line, j, pairs, st, [t1, t2])
            # row j+1: (F_mid - 2 u_{j+1} + u_{j+2}) / h^2
            add_row(line, j + 1, (j + 1, j + 2), (-2.0, 1.0))
            add_row(line, j + 1, f_mid.implicit_nodes, f_mid.implicit_weights)
            add_slots(line, j + 1, pairs, f_mid, [t1, t2])
            line_groups.setdefault(line, []).append((CORNER, j))
            stencils[(line, c1.cut_coordinate)] = (f_lo, f_mid, f_hi, f_ext, t1, t2)

    # Global implicit-side operator: standard rows plus corrected rows.
    t1d = sp.diags(
        [np.full(n - 1, 1.0), np.full(n, -2.0), np.full(n - 1, 1.0)], (-1, 0, 1)
    ) / (h * h)
    mask1d = np.zeros(n)
    mask1d[1:-1] = 1.0
    # zero end rows of the 1D stencil, then zero rows of transverse-boundary nodes
    t1d = sp.diags(mask1d) @ t1d
    eye_int = sp.diags(mask1d)
    if axis == "y":
        dss = sp.kron(eye_int, t1d, format="lil")
    else:
        dss = sp.kron(t1d, eye_int, format="lil")

    for (line, node), row in sorted(corrected.items()):
        grow = _flat_index(n, axis, line, node)
        dss.rows[grow] = []
        dss.data[grow] = []
        for c_loc in sorted(row):
            dss[grow, _flat_index(n, axis, line, c_loc)] = row[c_loc]
    dss = dss.tocsr()

    n2 = n * n
    n_slots = 2 * len(crossings)
    btan = _coo(btan_coefs, (n2, n2))
    cslots = _coo(slot_coefs, (n2, max(n_slots, 1)))
    slot_eval = _SlotEvaluator(
        axis, crossings, tangential_sides, grid, problem.jumps, am, ap
    )

    # Per-line implicit systems (1/alpha - dt * delta) with Dirichlet ends.
    lines: list[LineSystem] = []
    tris: list[TridiagonalMatrix] = []
    ops_list: list[list] = []
    ia = problem.inv_alpha
    for line in range(1, n - 1):
        sub = np.zeros(n)
        diag = np.ones(n)
        sup = np.zeros(n)
        ialine = ia[:, line] if axis == "x" else ia[line, :]
        diag[1:-1] = ialine[1:-1] + 2.0 * dt / (h * h)
        sub[1:-1] = -dt / (h * h)
        sup[1:-1] = -dt / (h * h)
        entries: list[tuple[int, int, float]] = []
        for (gl, node), row in corrected.items():
            if gl != line:
                continue
            # replace the three band entries and collect out-of-band ones
            sub[node] = 0.0
            diag[node] = ialine[node]
            sup[node] = 0.0
            for c_loc, w in row.items():
                v = -dt * w
                d = c_loc - node
                if d == 0:
                    diag[node] += v
                elif d == -1:
                    sub[node] = v
                elif d == 1:
                    sup[node] = v
                else:
                    entries.append((node, c_loc, v))
        tri = TridiagonalMatrix(sub, diag, sup)
        groups_line = sorted(line_groups.get(line, []), key=lambda t: t[1])
        ls = LineSystem(axis, line, tri, entries, groups_line)
        lines.append(ls)
        reduced, rops = reduce_system(ls.to_perturbed())
        tris.append(reduced)
        ops_list.append(rops)

    solver = BatchedTridiagonalSolver(tris, ops_list)
    return AxisOperators(
        axis=axis,
        dss=dss,
        btan=btan,
        cslots=cslots,
        slot_data=slot_eval,
        n_slots=n_slots,
        lines=lines,
        solver=solver,
        stencils=stencils,
    )


def _tangential_multiplier(axis: str, theta: float, am: float, ap: float) -> float:
    if axis == "x":
        return -np.sin(theta) * (ap - am)
    return np.cos(theta) * (ap - am)


def _coo(triples, shape) -> sp.csr_matrix:
    if not triples:
        return sp.csr_matrix(shape)
    rows, cols, vals = zip(*triples)
    return sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()


def assemble_operators(problem: ProblemSpec, topology: CrossingTopology | None = None,
                       dt: float = None) -> OperatorSet:
    """Build all time-invariant operators for stepping with increment dt."""
    if dt is None or dt <= 0:
        raise ValueError("assemble_operators requires a positive dt")
    if topology is None:
        topology = find_crossings(problem.grid, problem.interface)
    X, Y = problem.grid.node_mesh()
    source_cache = CachedPiecewise(problem.source, X, Y, problem.plus_mask)
    coords = problem.grid.axis_coords()
    d = problem.grid.half_width
    edge_cache = {
        "left": cache_on_points(problem.boundary, np.full_like(coords, -d), coords),
        "right": cache_on_points(problem.boundary, np.full_like(coords, d), coords),
        "bottom": cache_on_points(problem.boundary, coords, np.full_like(coords, -d)),
        "top": cache_on_points(problem.boundary, coords, np.full_like(coords, d)),
    }
    ax = _assemble_axis(problem, topology, dt, "x")
    ay = _assemble_axis(problem, topology, dt, "y")
    return OperatorSet(
        problem=problem, topology=topology, dt=dt, x=ax, y=ay,
        _source_cache=source_cache, _edge_cache=edge_cache,
    )


def _edge_second_difference(values: np.ndarray, h: float) -> np.ndarray:
    """Second difference along a boundary edge; ends are unused."""
    out = np.zeros_like(values)
    out[1:-1] = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / (h * h)
    return out


def douglas_step(ops: OperatorSet, state: FieldState, dt: float | None = None,
                 threads: int = 1) -> FieldState:
    """One step of the two-sweep splitting scheme.

    Sweep 1 solves (1/a - dt dxx) u* = (1/a + dt dyy) u + (dt/a) f(t+dt)
    line by line in x; sweep 2 solves (1/a - dt dyy) u(new) = (1/a) u* -
    dt dyy u in y.  All interface corrections are evaluated with
    current-time jump data and tangential values, which keeps every line
    system independent.  The intermediate variable receives the boundary
    values implied by eliminating it between the sweeps.
    """
    if dt is not None and abs(dt - ops.dt) > 1e-15 * max(1.0, ops.dt):
        raise ValueError("operator set was assembled for a different dt")
    dt = ops.dt
    problem = ops.problem
    grid = problem.grid
    n = grid.n
    h = grid.h
    u = state.u
    t0 = state.t
    t1 = t0 + dt
    ia = problem.inv_alpha
    alpha = problem.alpha

    uv = u.ravel()
    dy_u = ops.y.dss @ uv
    f1 = ops.source_at(t1)
    g1 = ops.boundary_edges(t1)

    rhs1 = ia * u + dt * ia * f1
    rhs1 += dt * dy_u.reshape(n, n)
    if ops.y.n_slots:
        corr_y = ops.y.btan @ uv + ops.y.cslots @ ops.y.slot_data(t0)
        rhs1 += dt * corr_y.reshape(n, n)
    if ops.x.n_slots:
        corr_x = ops.x.btan @ uv + ops.x.cslots @ ops.x.slot_data(t0)
        rhs1 += dt * corr_x.reshape(n, n)

    # consistent intermediate boundary values on the x-edges:
    # u* = g(t1) - a dt dyy(g(t1) - u_edge)
    for i_edge, name in ((0, "left"), (n - 1, "right")):
        ge = g1[name]
        dd = _edge_second_difference(ge - u[i_edge, :], h)
        rhs1[i_edge, :] = ge - alpha[i_edge, :] * dt * dd

    ustar = np.empty_like(u)
    ustar[:, 1:-1] = ops.x.solver.solve(rhs1[:, 1:-1], threads=threads)
    ustar[:, 0] = 0.0
    ustar[:, -1] = 0.0

    rhs2 = ia * ustar - dt * dy_u.reshape(n, n)
    rhs2[:, 0] = g1["bottom"]
    rhs2[:, -1] = g1["top"]

    r2 = np.ascontiguousarray(rhs2[1:-1, :].T)
    cols = ops.y.solver.solve(r2, threads=threads)

    unew = np.empty_like(u)
    unew[1:-1, :] = cols.T
    unew[0, :] = g1["left"]
    unew[-1, :] = g1["right"]
    unew[:, 0] = g1["bottom"]
    unew[:, -1] = g1["top"]
    return FieldState(unew, t1)


def implicit_euler_step(ops: OperatorSet, state: FieldState, dt: float | None = None) -> FieldState:
    """One step of the unsplit backward Euler companion scheme."""
    if dt is not None and abs(dt - ops.dt) > 1e-15 * max(1.0, ops.dt):
        raise ValueError("operator set was assembled for a different dt")
    dt = ops.dt
    problem = ops.problem
    n = problem.grid.n
    ia = problem.inv_alpha
    u = state.u
    t0 = state.t
    t1 = t0 + dt

    uv = u.ravel()
    rhs = (ia * u + dt * ia * ops.source_at(t1)).ravel()
    for axops in (ops.x, ops.y):
        if axops.n_slots:
            rhs += dt * (axops.btan @ uv)
            rhs += dt * (axops.cslots @ axops.slot_data(t0))
    rhs2d = rhs.reshape(n, n)
    g1 = ops.boundary_edges(t1)
    rhs2d[0, :] = g1["left"]
    rhs2d[-1, :] = g1["right"]
    rhs2d[1:-1, 0] = g1["bottom"][1:-1]
    rhs2d[1:-1, -1] = g1["top"][1:-1]

    x = ops._lu().solve(rhs2d.ravel())
    res = ops.euler_matrix() @ x - rhs2d.ravel()
    scale = np.linalg.norm(rhs2d)
    if scale > 0 and np.linalg.norm(res) > 1e-10 * scale:
        raise IterativeSolveNoConvergence(
            f"backward Euler solve residual {np.linalg.norm(res) / scale:.3e}"
        )
    return FieldState(x.reshape(n, n), t1)


@dataclass
class StepDiagnostics:
    times: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)


def advance(
    problem: ProblemSpec,
    scheme: str,
    dt: float,
    t_final: float,
    threads: int = 1,
    operators: OperatorSet | None = None,
    on_step: Callable | None = None,
    record_residuals: bool = False,
) -> tuple[FieldState, StepDiagnostics]:
    """March the problem from its initial state to t_final.

    t_final need not be an integer multiple of dt: a final partial step is
    taken with a one-off operator assembly.  ``on_step`` is called with the
    state after every step.
    """
    if scheme not in (DOUGLAS, EULER):
        raise ValueError(f"unknown scheme {scheme!r}")
    if dt <= 0 or t_final < 0:
        raise ValueError("need dt > 0 and t_final >= 0")

    n_steps = int(np.floor(t_final / dt + 1e-9))
    remainder = t_final - n_steps * dt
    if remainder < 1e-9 * dt:
        remainder = 0.0

    if operators is not None and abs(operators.dt - dt) > 1e-15 * max(1.0, dt):
        raise ValueError("supplied operator set was assembled for a different dt")
    topology = operators.topology if operators is not None else find_crossings(
        problem.grid, problem.interface
    )
    ops = operators if operators is not None else assemble_operators(problem, topology, dt)
    step = douglas_step if scheme == DOUGLAS else implicit_euler_step

    state = problem.initial_state()
    diags = StepDiagnostics()
    for k in range(n_steps):
        new = step(ops, state, threads=threads) if scheme == DOUGLAS else step(ops, state)
        new.t = (k + 1) * dt  # avoid accumulated addition error
        if record_residuals:
            diags.times.append(new.t)
            diags.residuals.append(_sweep_residual(ops, state, new))
        state = new
        if on_step is not None:
            on_step(state)
    if remainder > 0.0:
        tail_ops = assemble_operators(problem, topology, remainder)
        state = (
            douglas_step(tail_ops, state, threads=threads)
            if scheme == DOUGLAS
            else implicit_euler_step(tail_ops, state)
        )
        state.t = t_final
        if on_step is not None:
            on_step(state)
    return state, diags


def _sweep_residual(ops: OperatorSet, old: FieldState, new: FieldState) -> float:
    """Residual of the unsplit equation evaluated on the splitting result."""
    problem = ops.problem
    dt = ops.dt
    uv_old = old.u.ravel()
    uv_new = new.u.ravel()
    lhs = ops.euler_matrix() @ uv_new
    rhs = ops.euler_feedback_matrix() @ uv_old
    rhs += np.where(
        _interior_mask(problem.grid.n).ravel(),
        dt * (problem.inv_alpha * ops.source_at(new.t)).ravel(),
        0.0,
    )
    for axops in (ops.x, ops.y):
        if axops.n_slots:
            rhs += dt * (axops.cslots @ axops.slot_data(old.t))
    interior = _interior_mask(problem.grid.n).ravel()
    return float(np.max(np.abs((lhs - rhs)[interior])))
