"""Manufactured-solution self-checks for the built-in benchmark cases."""

import numpy as np
import pytest

from matched_adi.geometry import classify_grid
from matched_adi.problems import (
    case_idents,
    get_case,
    jump_check,
    phi_tau_check,
    residual_check,
)

ALL_CASES = case_idents()


def test_registry():
    assert ALL_CASES == ["1", "2", "3", "4", "5a", "5b"]
    with pytest.raises(KeyError):
        get_case("99")


@pytest.mark.parametrize("ident", ALL_CASES)
def test_branches_satisfy_heat_equation(ident):
    worst = residual_check(get_case(ident), m=100, seed=11)
    assert worst < 1e-8, f"PDE residual {worst:.2e}"


@pytest.mark.parametrize("ident", ALL_CASES)
def test_declared_jumps_match_branches(ident):
    devs = jump_check(get_case(ident), m=100, seed=12)
    for name, dev in devs.items():
        assert dev < 1e-8, f"{name} deviation {dev:.2e}"


@pytest.mark.parametrize("ident", ALL_CASES)
def test_phi_tau_is_arc_length_derivative_of_phi(ident):
    dev = phi_tau_check(get_case(ident))
    assert dev < 1e-6, f"phi_tau deviation {dev:.2e}"


@pytest.mark.parametrize("ident", ALL_CASES)
def test_boundary_lies_in_exterior(ident):
    case = get_case(ident)
    grid = case.grid(21)
    sides = classify_grid(grid, case.interface)
    assert np.all(sides[0, :] == 1) and np.all(sides[-1, :] == 1)
    assert np.all(sides[:, 0] == 1) and np.all(sides[:, -1] == 1)


@pytest.mark.parametrize("ident", ALL_CASES)
def test_initial_state_matches_exact_solution(ident):
    case = get_case(ident)
    prob = case.problem(21)
    s0 = prob.initial_state()
    assert s0.t == 0.0
    assert np.allclose(s0.u, case.exact_on_grid(prob.grid, 0.0), atol=1e-14)


def test_example2_constant_jump_values():
    case = get_case("2")
    x, y = case.interface.boundary_point(np.linspace(0, 2 * np.pi, 17))
    assert np.allclose(case.jumps.phi(x, y, 0.3), 1.0)
    assert np.allclose(case.jumps.psi(x, y, 0.7), -0.75)
    assert np.allclose(case.jumps.phi_tau(x, y, 0.1), 0.0)


def test_example1_jumps_vanish():
    case = get_case("1")
    x, y = case.interface.boundary_point(np.linspace(0, 2 * np.pi, 17))
    for fn in (case.jumps.phi, case.jumps.psi, case.jumps.phi_tau):
        assert np.allclose(fn(x, y, 0.5), 0.0)


@pytest.mark.parametrize("ident,expected_alpha", [("1", (1, 10)), ("2", (2, 10)), ("3", (1, 10))])
def test_case_parameters(ident, expected_alpha):
    case = get_case(ident)
    assert (case.alpha_minus, case.alpha_plus) == expected_alpha
