"""Grid, interface classification and crossing detection."""

import numpy as np
import pytest

from matched_adi.errors import DegenerateNormal, RefinementRequired, TooManyCrossings
from matched_adi.geometry import (
    CircleInterface,
    Grid2D,
    PolarLeafInterface,
    classify_grid,
    classify_node,
    find_crossings,
    normal_angle,
)

FOUR_LEAF = PolarLeafInterface(4, 0.10)
TWO_LEAF = PolarLeafInterface(2, 0.25)


def test_grid_spacing_and_extent():
    g = Grid2D(1.99, 21)
    assert g.h == pytest.approx(2 * 1.99 / 20)
    assert g.x(0) == -1.99
    assert g.x(20) == pytest.approx(1.99)
    assert g.y(10) == pytest.approx(0.0)
    c = g.axis_coords()
    assert c.shape == (21,)
    assert np.allclose(np.diff(c), g.h)


def test_classify_node_circle():
    g = Grid2D(1.99, 21)
    iface = CircleInterface(1.0)
    # origin node (i=j=10) is inside, the far corner is outside
    assert classify_node(g, iface, 10, 10) == -1
    assert classify_node(g, iface, 20, 10) == +1  # (1.99, 0)


def test_classify_node_four_leaf():
    # at polar angle 0 the curve radius is 1/2, so (0.55, 0) lies outside
    g = Grid2D(0.99, 41)
    x = 0.55
    i = int(round((x + 0.99) / g.h))
    assert abs(g.x(i) - 0.55) < g.h  # nearest node
    assert np.sign(FOUR_LEAF.sigma(0.55, 0.0)) == 1.0
    assert classify_node(g, FOUR_LEAF, i, 20) == np.sign(FOUR_LEAF.sigma(g.x(i), 0.0))


def test_on_node_cut_goes_to_plus_side():
    g = Grid2D(2.0, 21)  # integer domain puts nodes exactly on the circle
    iface = CircleInterface(1.0)
    # node at (1, 0): sigma is 0 there, nudge assigns the exterior
    i = int(round((1.0 + 2.0) / g.h))
    assert g.x(i) == pytest.approx(1.0)
    assert classify_node(g, iface, i, 10) == +1


def test_circle_crossings_analytic_positions():
    g = Grid2D(1.99, 21)
    iface = CircleInterface(1.0)
    topo = find_crossings(g, iface)
    # line y = 0 cuts at x = -1 and x = +1 with normals along -x and +x
    cuts = topo.line_crossings("x", 10)
    assert len(cuts) == 2
    assert cuts[0].cut_coordinate == pytest.approx(-1.0, abs=1e-12)
    assert cuts[1].cut_coordinate == pytest.approx(1.0, abs=1e-12)
    assert abs(abs(cuts[0].theta) - np.pi) < 1e-9
    assert abs(cuts[1].theta) < 1e-9
    # line outside the circle sees nothing
    j_out = int(round((1.5 + 1.99) / g.h))
    assert topo.line_crossings("x", j_out) == []


@pytest.mark.parametrize("n", [21, 41, 81])
def test_circle_cuts_match_closed_form_on_every_line(n):
    g = Grid2D(1.99, n)
    iface = CircleInterface(1.0)
    topo = find_crossings(g, iface)
    for axis in ("x", "y"):
        for c in topo.crossings[axis]:
            fixed = g.coord(c.line_index)
            expect = np.sqrt(1.0 - fixed * fixed)
            assert min(abs(c.cut_coordinate - expect), abs(c.cut_coordinate + expect)) <= 1e-12


def test_crossing_sigma_residual_and_sides(half_circle_grid21):
    grid, iface, topo = half_circle_grid21
    for axis in ("x", "y"):
        for c in topo.crossings[axis]:
            x, y = c.point(grid)
            assert abs(iface.sigma(x, y)) <= 1e-10 * grid.h
            # straddling nodes carry opposite signs
            lo = classify_node(grid, iface, *(
                (c.left_node, c.line_index) if axis == "x" else (c.line_index, c.left_node)
            ))
            hi = classify_node(grid, iface, *(
                (c.right_node, c.line_index) if axis == "x" else (c.line_index, c.right_node)
            ))
            assert lo == c.side_of_left
            assert lo == -hi
            # cut strictly between the straddling nodes
            assert grid.coord(c.left_node) < c.cut_coordinate < grid.coord(c.right_node)


def test_find_crossings_deterministic(half_circle_grid21):
    grid, iface, topo = half_circle_grid21
    topo2 = find_crossings(grid, iface)
    a = [(c.axis, c.line_index, c.cut_coordinate, c.theta) for c in topo.crossings["x"] + topo.crossings["y"]]
    b = [(c.axis, c.line_index, c.cut_coordinate, c.theta) for c in topo2.crossings["x"] + topo2.crossings["y"]]
    assert a == b  # bit-identical


def test_leaf_crossings_match_dense_bisection_oracle():
    """Dense-sampling oracle: 1e6 sigma samples per line, then bisection."""
    g = Grid2D(0.99, 41)
    topo = find_crossings(g, FOUR_LEAF)
    t = np.linspace(-0.99, 0.99, 1_000_001)
    for axis in ("x", "y"):
        for line in range(g.n):
            fixed = g.coord(line)
            sig = FOUR_LEAF.sigma(t, fixed) if axis == "x" else FOUR_LEAF.sigma(fixed, t)
            sig = np.where(np.abs(sig) < 1e-12, 1e-12, sig)
            flips = np.nonzero(np.sign(sig[:-1]) != np.sign(sig[1:]))[0]
            cuts = topo.line_crossings(axis, line)
            assert len(cuts) == len(flips)
            for c, k in zip(cuts, flips):
                lo, hi = t[k], t[k + 1]
                f = (lambda s: FOUR_LEAF.sigma(s, fixed)) if axis == "x" else (
                    lambda s: FOUR_LEAF.sigma(fixed, s))
                flo = f(lo)
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    fm = f(mid)
                    if fm == 0.0:
                        lo = hi = mid
                        break
                    if np.sign(fm) == np.sign(flo):
                        lo = mid
                    else:
                        hi = mid
                assert abs(c.cut_coordinate - 0.5 * (lo + hi)) <= 1e-10


def test_normal_angle_circle_and_leaf():
    circ = CircleInterface(1.0)
    assert normal_angle(circ, 1.0, 0.0) == pytest.approx(0.0)
    assert normal_angle(circ, 0.0, 1.0) == pytest.approx(np.pi / 2)

    # leaf normal against a central-difference gradient of sigma
    leaf = TWO_LEAF
    s = np.pi / 4
    x, y = leaf.boundary_point(s)
    th = normal_angle(leaf, x, y)
    eps = 1e-6
    gx = (leaf.sigma(x + eps, y) - leaf.sigma(x - eps, y)) / (2 * eps)
    gy = (leaf.sigma(x, y + eps) - leaf.sigma(x, y - eps)) / (2 * eps)
    assert th == pytest.approx(np.arctan2(gy, gx), abs=1e-6)
    # normal points from inside to outside and has unit length by construction
    d = 1e-4
    assert leaf.sigma(x + d * np.cos(th), y + d * np.sin(th)) > 0
    assert leaf.sigma(x - d * np.cos(th), y - d * np.sin(th)) < 0


def test_corner_pairs_have_exactly_one_node_between(unit_circle_grid21):
    grid, iface, topo = unit_circle_grid21
    corner = [g for ax in ("x", "y") for g in topo.groups[ax] if g.kind == "corner"]
    regular = [g for ax in ("x", "y") for g in topo.groups[ax] if g.kind == "regular"]
    assert len(corner) == 4  # one sliver near each extreme point of the circle
    for g in corner:
        c1, c2 = g.crossings
        assert c2.left_node - c1.left_node == 1
    # regular cuts on a shared line keep at least two nodes between them
    by_line = {}
    for g in regular:
        by_line.setdefault((g.axis, g.line_index), []).append(g.crossings[0])
    for cuts in by_line.values():
        if len(cuts) == 2:
            lo, hi = sorted(cuts, key=lambda c: c.cut_coordinate)
            assert hi.left_node - lo.left_node >= 2


def test_refinement_required_for_unresolvable_grid():
    # the four-leaf interface has a grazing line at this resolution
    with pytest.raises(RefinementRequired):
        find_crossings(Grid2D(0.99, 43), FOUR_LEAF)


def test_too_many_crossings_rejected():
    # a six-lobe star with deep valleys cuts some lines four times
    with pytest.raises(TooManyCrossings) as exc:
        find_crossings(Grid2D(0.99, 21), PolarLeafInterface(6, 0.3))
    assert exc.value.count > 2


def test_degenerate_normal_raises():
    with pytest.raises(DegenerateNormal):
        normal_angle(CircleInterface(1.0), 0.0, 0.0)


def test_classify_grid_matches_classify_node(half_circle_grid21):
    grid, iface, _ = half_circle_grid21
    sides = classify_grid(grid, iface)
    for i in range(0, grid.n, 5):
        for j in range(0, grid.n, 5):
            assert sides[i, j] == classify_node(grid, iface, i, j)


def test_no_interface_is_all_plus():
    g = Grid2D(1.0, 11)
    assert np.all(classify_grid(g, None) == 1)
    assert find_crossings(g, None).total_crossings == 0
