"""Operator assembly and the two time integrators."""

import numpy as np
import pytest

from matched_adi.adi import (
    FieldState,
    ProblemSpec,
    advance,
    assemble_operators,
    douglas_step,
    implicit_euler_step,
)
from matched_adi.fields import PiecewiseField, SeparableField
from matched_adi.geometry import CircleInterface, Grid2D
from matched_adi.linalg import thomas_solve, TridiagonalMatrix
from matched_adi.problems import get_case
from helpers import constant_problem, smooth_problem


def full_second_difference(u, h, axis):
    out = np.zeros_like(u)
    if axis == 0:
        out[1:-1, :] = (u[:-2, :] - 2 * u[1:-1, :] + u[2:, :]) / h**2
    else:
        out[:, 1:-1] = (u[:, :-2] - 2 * u[:, 1:-1] + u[:, 2:]) / h**2
    return out


class TestAssembly:
    def test_no_interface_lines_are_textbook_tridiagonal(self):
        prob = smooth_problem(n=11, alpha=0.5)
        dt = 0.01
        ops = assemble_operators(prob, None, dt)
        h = prob.grid.h
        for ax in (ops.x, ops.y):
            for ls in ax.lines:
                assert not ls.entries and not ls.groups
                assert np.allclose(ls.tri.diag[1:-1], 2.0 + 2 * dt / h**2)
                assert np.allclose(ls.tri.sub[1:-1], -dt / h**2)
                assert ls.tri.diag[0] == 1.0 and ls.tri.diag[-1] == 1.0
            assert ax.n_slots == 0

    def test_perturbed_row_count_on_center_line(self):
        # two lone cuts on the y = 0 line perturb four rows
        case = get_case("1")
        prob = case.problem(21)
        ops = assemble_operators(prob, None, 1e-3)
        line = [ls for ls in ops.x.lines if ls.index == 10][0]
        h = prob.grid.h
        standard = 1.0 / prob.alpha[:, 10] + 2e-3 / h**2
        perturbed = [
            i for i in range(1, 20)
            if abs(line.tri.diag[i] - standard[i]) > 1e-12 or
            any(r == i for r, _, _ in line.entries)
        ]
        assert len(perturbed) == 4

    def test_corner_block_spans_five_columns(self, unit_circle_grid21):
        case = get_case("1")
        prob = case.problem(21)
        ops = assemble_operators(prob, None, 1e-3)
        corner_lines = [
            ls for ax in (ops.x, ops.y) for ls in ax.lines
            if any(kind == "corner" for kind, _ in ls.groups)
        ]
        assert len(corner_lines) == 4
        for ls in corner_lines:
            (kind, j) = [g for g in ls.groups if g[0] == "corner"][0]
            rows = sorted({r for r, _, _ in ls.entries})
            assert rows == [j - 1, j, j + 1]
            for r, c, _ in ls.entries:
                assert j - 2 <= c <= j + 2

    def test_operator_assembly_is_reproducible(self):
        case = get_case("3")
        prob = case.problem(21)
        a = assemble_operators(prob, None, 1e-3)
        b = assemble_operators(prob, None, 1e-3)
        assert (a.x.dss != b.x.dss).nnz == 0
        assert (a.y.btan != b.y.btan).nnz == 0
        assert (a.x.cslots != b.x.cslots).nnz == 0

    def test_transparency_on_polynomials(self):
        """Matched media, zero jumps: corrected operators are exact on
        quadratics everywhere, and on cubics across corner blocks."""
        prob = constant_problem(CircleInterface(1.0), n=21, half_width=1.99, am=2.0, ap=2.0)
        ops = assemble_operators(prob, None, 1e-3)
        X, Y = prob.grid.node_mesh()
        interior = np.zeros((21, 21), bool)
        interior[1:-1, 1:-1] = True
        u2 = 0.3 * X**2 - 0.7 * X * Y + 1.1 * Y**2 - X + 2 * Y - 0.5
        dxx = ops.x.explicit_apply(u2.ravel(), 0.0).reshape(21, 21)
        dyy = ops.y.explicit_apply(u2.ravel(), 0.0).reshape(21, 21)
        assert np.max(np.abs(dxx - 0.6)[interior]) < 1e-8
        assert np.max(np.abs(dyy - 2.2)[interior]) < 1e-8


class TestDouglasStep:
    def test_constant_steady_state_without_interface(self):
        prob = constant_problem(None, n=13, half_width=1.0, am=2.0, ap=2.0, c=1.5)
        ops = assemble_operators(prob, None, 0.05)
        s1 = douglas_step(ops, prob.initial_state())
        assert np.max(np.abs(s1.u - 1.5)) < 1e-13

    def test_constant_steady_state_across_interface(self):
        # piecewise media with zero jumps: constants solve the problem
        prob = constant_problem(CircleInterface(0.5), n=21, am=1.0, ap=10.0, c=2.25)
        ops = assemble_operators(prob, None, 0.05)
        state = prob.initial_state()
        for _ in range(3):
            state = douglas_step(ops, state)
        assert np.max(np.abs(state.u - 2.25)) < 1e-12

    def test_factored_one_step_identity(self, rng):
        """The two sweeps reproduce the factored scheme exactly."""
        prob = smooth_problem(n=13, alpha=0.7)
        h = prob.grid.h
        dt = h * h
        ops = assemble_operators(prob, None, dt)
        uk = rng.standard_normal((13, 13))
        new = douglas_step(ops, FieldState(uk.copy(), 0.0))
        u1 = new.u
        alpha = 0.7
        f1 = ops.source_at(dt)
        dxx = lambda u: full_second_difference(u, h, 0)
        dyy = lambda u: full_second_difference(u, h, 1)
        lhs = u1 / alpha - dt * dxx(u1) - dt * dyy(u1) + alpha * dt**2 * dxx(dyy(u1))
        rhs = uk / alpha + alpha * dt**2 * dxx(dyy(uk)) + dt * f1 / alpha
        assert np.max(np.abs(lhs - rhs)[1:-1, 1:-1]) < 1e-12

    def test_example1_coarse_error_matches_reference(self):
        case = get_case("1")
        prob = case.problem(21)
        state, _ = advance(prob, "douglas", 1e-3, 2.0)
        exact = case.exact_on_grid(prob.grid, 2.0)
        linf = np.max(np.abs(state.u - exact))
        assert linf == pytest.approx(1.92e-2, rel=0.05)

    def test_boundary_carries_dirichlet_data_exactly(self):
        case = get_case("4")
        prob = case.problem(21)
        ops = assemble_operators(prob, None, 0.01)
        state = prob.initial_state()
        for _ in range(3):
            state = douglas_step(ops, state)
            g = ops.boundary_edges(state.t)
            assert np.array_equal(state.u[0, :], g["left"])
            assert np.array_equal(state.u[-1, :], g["right"])
            assert np.array_equal(state.u[:, 0], g["bottom"])
            assert np.array_equal(state.u[:, -1], g["top"])

    def test_thread_count_does_not_change_bits(self):
        case = get_case("5b")
        prob = case.problem(41)
        ops = assemble_operators(prob, None, 0.01)
        s0 = prob.initial_state()
        a = douglas_step(ops, s0, threads=1)
        b = douglas_step(ops, s0, threads=4)
        assert np.array_equal(a.u, b.u)

    def test_operator_reuse_is_bitwise(self):
        case = get_case("2")
        prob = case.problem(21)
        ops = assemble_operators(prob, None, 1e-2)
        s1 = douglas_step(ops, prob.initial_state())
        s2 = douglas_step(ops, s1)
        ops_b = assemble_operators(prob, None, 1e-2)
        r1 = douglas_step(ops_b, prob.initial_state())
        ops_c = assemble_operators(prob, None, 1e-2)
        r2 = douglas_step(ops_c, r1)
        assert np.array_equal(s2.u, r2.u)

    def test_wrong_dt_rejected(self):
        prob = smooth_problem(n=11)
        ops = assemble_operators(prob, None, 0.01)
        with pytest.raises(ValueError):
            douglas_step(ops, prob.initial_state(), dt=0.02)


class TestImplicitEuler:
    def test_constant_field_unchanged(self):
        prob = constant_problem(None, n=13, half_width=1.0, am=3.0, ap=3.0, c=-0.75)
        ops = assemble_operators(prob, None, 0.1)
        s1 = implicit_euler_step(ops, prob.initial_state())
        assert np.max(np.abs(s1.u + 0.75)) < 1e-12

    def test_one_dimensional_degenerate_matches_thomas(self):
        """y-independent data reduces each column to the same 1D solve."""
        n = 21
        alpha = 0.8
        grid = Grid2D(1.0, n)
        h = grid.h
        dt = 0.02
        u0 = lambda x: np.cos(1.1 * x)
        f1d = lambda x: np.sin(0.6 * x)
        # independent 1D backward Euler oracle
        sub = np.full(n, -dt / h**2)
        sup = np.full(n, -dt / h**2)
        diag = np.full(n, 1.0 / alpha + 2 * dt / h**2)
        diag[0] = diag[-1] = 1.0
        sub[0] = sup[-1] = 0.0
        sub[-1] = sup[0] = 0.0
        coords = grid.axis_coords()
        rhs = u0(coords) / alpha + dt * f1d(coords) / alpha
        rhs[0] = u0(coords[0])
        rhs[-1] = u0(coords[-1])
        u1d = thomas_solve(TridiagonalMatrix(sub, diag, sup), rhs)

        u_f = SeparableField(((lambda t: 1.0, lambda x, y: u0(x)),))
        f_f = SeparableField(((lambda t: 1.0, lambda x, y: f1d(x)),))

        def g(x, y, t):
            xx = np.asarray(x, float)
            out = np.interp(xx.ravel(), coords, u1d).reshape(xx.shape)
            return np.where(np.isclose(t, 0.0), u0(xx), out)

        prob = ProblemSpec(grid, None, alpha, alpha, PiecewiseField(f_f, f_f),
                           g, PiecewiseField(u_f, u_f), None)
        ops = assemble_operators(prob, None, dt)
        s1 = implicit_euler_step(ops, prob.initial_state())
        for i in range(n):
            assert np.max(np.abs(s1.u[i, :] - u1d[i])) < 1e-11

    def test_matches_dense_global_solve_on_interface_grid(self):
        """Backward Euler equals a dense solve of the assembled one-step
        system D u1 = B u0 + data on a small interface grid."""
        case = get_case("2")
        prob = case.problem(11)
        dt = 0.01
        ops = assemble_operators(prob, None, dt)
        s0 = prob.initial_state()
        s1 = implicit_euler_step(ops, s0)

        n = 11
        d = ops.euler_matrix().toarray()
        b = ops.euler_feedback_matrix().toarray()
        rhs = b @ s0.u.ravel()
        rhs += dt * (ops.x.cslots @ ops.x.slot_data(0.0))
        rhs += dt * (ops.y.cslots @ ops.y.slot_data(0.0))
        interior = np.zeros((n, n), bool)
        interior[1:-1, 1:-1] = True
        rhs += np.where(interior.ravel(), dt * (prob.inv_alpha * ops.source_at(dt)).ravel(), 0.0)
        g1 = ops.boundary_edges(dt)
        rhs2d = rhs.reshape(n, n)
        rhs2d[0, :] = g1["left"]
        rhs2d[-1, :] = g1["right"]
        rhs2d[1:-1, 0] = g1["bottom"][1:-1]
        rhs2d[1:-1, -1] = g1["top"][1:-1]
        dense = np.linalg.solve(d, rhs2d.ravel()).reshape(n, n)
        assert np.max(np.abs(dense - s1.u)) < 1e-10

    def test_douglas_euler_order_of_agreement(self):
        prob = smooth_problem(n=17)
        diffs = []
        for dt in (0.04, 0.02, 0.01):
            ops = assemble_operators(prob, None, dt)
            s0 = prob.initial_state()
            d1 = douglas_step(ops, s0)
            e1 = implicit_euler_step(ops, s0)
            diffs.append(np.max(np.abs(d1.u - e1.u)))
        order = np.log2(diffs[0] / diffs[1])
        assert order >= 1.7, f"observed order {order:.2f}"


class TestAdvance:
    def test_zero_steps_returns_initial_state(self):
        prob = smooth_problem(n=11)
        state, _ = advance(prob, "douglas", 0.1, 0.0)
        assert state.t == 0.0
        assert np.array_equal(state.u, prob.initial_state().u)

    def test_partial_final_step(self):
        prob = smooth_problem(n=11)
        dt = 0.04
        state, _ = advance(prob, "douglas", dt, 2.5 * dt)
        assert state.t == pytest.approx(2.5 * dt)
        ops = assemble_operators(prob, None, dt)
        s = douglas_step(ops, douglas_step(ops, prob.initial_state()))
        tail = assemble_operators(prob, None, 0.5 * dt)
        s = douglas_step(tail, s)
        assert np.allclose(state.u, s.u, atol=1e-14)

    def test_rejects_bad_arguments(self):
        prob = smooth_problem(n=11)
        with pytest.raises(ValueError):
            advance(prob, "leapfrog", 0.1, 1.0)
        with pytest.raises(ValueError):
            advance(prob, "douglas", -0.1, 1.0)

    def test_residual_diagnostics_shrink_with_dt(self):
        case = get_case("2")
        prob = case.problem(21)
        res = []
        for dt in (0.02, 0.01):
            _, diags = advance(prob, "douglas", dt, 5 * dt, record_residuals=True)
            res.append(max(diags.residuals))
        assert res[1] < res[0]
