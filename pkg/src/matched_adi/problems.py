"""Built-in benchmark problems with piecewise manufactured solutions.

Each case prescribes an exact solution per side of the interface; the
source, Dirichlet boundary data, initial condition and interface jump data
all follow from it, so every computed field has an exact reference.  The
five cases cover: a continuous solution across a circle, constant jumps,
space-dependent jumps, fully space-time-dependent jumps, and the same
solution over two star-shaped interfaces with concave segments.

Self-check helpers at the bottom verify, with finite-difference oracles,
that each branch satisfies the heat equation with the declared source and
that the declared jump data matches the two branches along the interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adi import ProblemSpec
from .fields import PiecewiseField, SeparableField
from .geometry import CircleInterface, Grid2D, InterfaceModel, PolarLeafInterface, classify_grid
from .mib import JumpData

_COS = np.cos
_SIN = np.sin


@dataclass(frozen=True)
class ExampleCase:
    """One benchmark problem: exact branches plus everything derived."""

    ident: str
    half_width: float
    interface: InterfaceModel
    alpha_minus: float
    alpha_plus: float
    u_minus: SeparableField
    u_plus: SeparableField
    grad_u_minus: Callable        # (x, y, t) -> (du/dx, du/dy)
    grad_u_plus: Callable
    f_minus: SeparableField
    f_plus: SeparableField
    jumps: JumpData
    t_final: float
    dt_spatial: float             # step small enough for spatial studies

    def exact(self) -> PiecewiseField:
        return PiecewiseField(self.u_minus, self.u_plus)

    def grid(self, n: int) -> Grid2D:
        return Grid2D(self.half_width, n)

    def problem(self, n: int) -> ProblemSpec:
        return ProblemSpec(
            grid=self.grid(n),
            interface=self.interface,
            alpha_minus=self.alpha_minus,
            alpha_plus=self.alpha_plus,
            source=PiecewiseField(self.f_minus, self.f_plus),
            boundary=self.u_plus,
            initial=self.exact(),
            jumps=self.jumps,
        )

    def exact_on_grid(self, grid: Grid2D, t: float) -> np.ndarray:
        X, Y = grid.node_mesh()
        plus_mask = classify_grid(grid, self.interface) > 0
        return self.exact().evaluate(X, Y, t, plus_mask)


def _normal_angles(iface: InterfaceModel, x, y):
    gx, gy = iface.grad_sigma(x, y)
    return np.arctan2(gy, gx)


def example1() -> ExampleCase:
    """Circle r = 1, continuous solution and flux ([u] = [a u_n] = 0)."""
    am, ap = 1.0, 10.0

    def r2(x, y):
        return x * x + y * y

    u_minus = SeparableField(((_COS, lambda x, y: (r2(x, y) ** 3 - 1.0) / am - 3.0 / ap),))
    u_plus = SeparableField(((_COS, lambda x, y: -3.0 / (ap * r2(x, y))),))
    f_minus = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: (r2(x, y) ** 3 - 1.0) / am - 3.0 / ap),
        (_COS, lambda x, y: -36.0 * r2(x, y) ** 2),
    ))
    f_plus = SeparableField((
        (_SIN, lambda x, y: 3.0 / (ap * r2(x, y))),
        (_COS, lambda x, y: 12.0 / r2(x, y) ** 2),
    ))

    def grad_minus(x, y, t):
        c = 6.0 * r2(x, y) ** 2 * np.cos(t) / am
        return c * x, c * y

    def grad_plus(x, y, t):
        c = 6.0 * np.cos(t) / (ap * r2(x, y) ** 2)
        return c * x, c * y

    zero = lambda x, y, t: np.zeros_like(np.asarray(x, dtype=float))
    return ExampleCase(
        ident="1", half_width=1.99, interface=CircleInterface(1.0),
        alpha_minus=am, alpha_plus=ap,
        u_minus=u_minus, u_plus=u_plus,
        grad_u_minus=grad_minus, grad_u_plus=grad_plus,
        f_minus=f_minus, f_plus=f_plus,
        jumps=JumpData(zero, zero, zero),
        t_final=2.0, dt_spatial=1e-4,
    )


def example2() -> ExampleCase:
    """Circle r = 1/2, constant jumps [u] = 1 and [a u_n] = -3/4."""
    am, ap = 2.0, 10.0

    def r2(x, y):
        return x * x + y * y

    u_minus = SeparableField((
        (_COS, lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: r2(x, y) - 1.0),
    ))
    shift = 0.25 * (1.0 - 9.0 / (8.0 * ap))
    u_plus = SeparableField((
        (_COS, lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: shift + (0.5 * r2(x, y) ** 2 + r2(x, y)) / ap),
    ))
    f_minus = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: np.full_like(np.asarray(x, dtype=float), -4.0 * am)),
    ))
    f_plus = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: -8.0 * r2(x, y) - 4.0),
    ))

    def grad_minus(x, y, t):
        return 2.0 * x, 2.0 * y

    def grad_plus(x, y, t):
        c = 2.0 * (r2(x, y) + 1.0) / ap
        return c * x, c * y

    ones = lambda x, y, t: np.ones_like(np.asarray(x, dtype=float))
    return ExampleCase(
        ident="2", half_width=0.99, interface=CircleInterface(0.5),
        alpha_minus=am, alpha_plus=ap,
        u_minus=u_minus, u_plus=u_plus,
        grad_u_minus=grad_minus, grad_u_plus=grad_plus,
        f_minus=f_minus, f_plus=f_plus,
        jumps=JumpData(
            phi=ones,
            psi=lambda x, y, t: np.full_like(np.asarray(x, dtype=float), -0.75),
            phi_tau=lambda x, y, t: np.zeros_like(np.asarray(x, dtype=float)),
        ),
        t_final=1.0, dt_spatial=1e-4,
    )


def example3(k: float = 2.0) -> ExampleCase:
    """Circle r = 1/2, space-dependent (but steady) jump data."""
    am, ap = 1.0, 10.0

    def r2(x, y):
        return x * x + y * y

    u_minus = SeparableField((
        (_COS, lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: np.exp(r2(x, y))),
    ))
    u_plus = SeparableField((
        (_COS, lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: np.sin(k * x) * np.cos(k * y)),
    ))
    f_minus = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: -4.0 * am * np.exp(r2(x, y)) * (r2(x, y) + 1.0)),
    ))
    f_plus = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: np.ones_like(np.asarray(x, dtype=float))),
        (lambda t: 1.0, lambda x, y: 2.0 * ap * k * k * np.sin(k * x) * np.cos(k * y)),
    ))

    def grad_minus(x, y, t):
        c = 2.0 * np.exp(r2(x, y))
        return c * x, c * y

    def grad_plus(x, y, t):
        return k * np.cos(k * x) * np.cos(k * y), -k * np.sin(k * x) * np.sin(k * y)

    e14 = np.exp(0.25)

    def phi(x, y, t):
        return np.sin(k * x) * np.cos(k * y) - e14

    def psi(x, y, t):
        th = np.arctan2(y, x)
        return ap * k * (
            np.cos(th) * np.cos(k * x) * np.cos(k * y)
            - np.sin(th) * np.sin(k * x) * np.sin(k * y)
        ) - am * e14

    def phi_tau(x, y, t):
        th = np.arctan2(y, x)
        return -k * np.sin(th) * np.cos(k * x) * np.cos(k * y) - k * np.cos(th) * np.sin(
            k * x
        ) * np.sin(k * y)

    return ExampleCase(
        ident="3", half_width=0.99, interface=CircleInterface(0.5),
        alpha_minus=am, alpha_plus=ap,
        u_minus=u_minus, u_plus=u_plus,
        grad_u_minus=grad_minus, grad_u_plus=grad_plus,
        f_minus=f_minus, f_plus=f_plus,
        jumps=JumpData(phi, psi, phi_tau),
        t_final=1.0, dt_spatial=1e-4,
    )


def _wave_case(ident, iface, dt_spatial, jumps_from_branches, k: float = 2.0):
    """Shared construction of the oscillating-wave cases (4, 5a, 5b)."""
    am, ap = 1.0, 10.0
    sm = lambda x, y: np.sin(k * x) * np.cos(k * y)
    sp_ = lambda x, y: np.cos(k * x) * np.sin(k * y)
    u_minus = SeparableField(((_COS, sm),))
    u_plus = SeparableField(((_COS, sp_),))
    f_minus = SeparableField((
        (_COS, lambda x, y: 2.0 * k * k * am * sm(x, y)),
        (lambda t: -np.sin(t), sm),
    ))
    f_plus = SeparableField((
        (_COS, lambda x, y: 2.0 * k * k * ap * sp_(x, y)),
        (lambda t: -np.sin(t), sp_),
    ))

    def grad_minus(x, y, t):
        c = k * np.cos(t)
        return c * np.cos(k * x) * np.cos(k * y), -c * np.sin(k * x) * np.sin(k * y)

    def grad_plus(x, y, t):
        c = k * np.cos(t)
        return -c * np.sin(k * x) * np.sin(k * y), c * np.cos(k * x) * np.cos(k * y)

    if jumps_from_branches:
        def theta(x, y):
            return _normal_angles(iface, x, y)

        def phi(x, y, t):
            return (sp_(x, y) - sm(x, y)) * np.cos(t)

        def psi(x, y, t):
            th = theta(x, y)
            gpx, gpy = grad_plus(x, y, t)
            gmx, gmy = grad_minus(x, y, t)
            return ap * (gpx * np.cos(th) + gpy * np.sin(th)) - am * (
                gmx * np.cos(th) + gmy * np.sin(th)
            )

        def phi_tau(x, y, t):
            th = theta(x, y)
            gpx, gpy = grad_plus(x, y, t)
            gmx, gmy = grad_minus(x, y, t)
            return (gpx - gmx) * (-np.sin(th)) + (gpy - gmy) * np.cos(th)
    else:
        # closed forms on the circle, where the normal angle is the polar angle
        def phi(x, y, t):
            return (sp_(x, y) - sm(x, y)) * np.cos(t)

        def psi(x, y, t):
            th = np.arctan2(y, x)
            sskk = np.sin(k * x) * np.sin(k * y)
            cckk = np.cos(k * x) * np.cos(k * y)
            return k * np.cos(t) * (
                (am * np.sin(th) - ap * np.cos(th)) * sskk
                + (ap * np.sin(th) - am * np.cos(th)) * cckk
            )

        def phi_tau(x, y, t):
            th = np.arctan2(y, x)
            sskk = np.sin(k * x) * np.sin(k * y)
            cckk = np.cos(k * x) * np.cos(k * y)
            return k * np.cos(t) * (np.cos(th) + np.sin(th)) * (cckk + sskk)

    return ExampleCase(
        ident=ident, half_width=0.99, interface=iface,
        alpha_minus=am, alpha_plus=ap,
        u_minus=u_minus, u_plus=u_plus,
        grad_u_minus=grad_minus, grad_u_plus=grad_plus,
        f_minus=f_minus, f_plus=f_plus,
        jumps=JumpData(phi, psi, phi_tau),
        t_final=1.0, dt_spatial=dt_spatial,
    )


def example4() -> ExampleCase:
    """Circle r = 1/2, fully space-time-dependent jump data."""
    return _wave_case("4", CircleInterface(0.5), 1e-6, jumps_from_branches=False)


def example5a() -> ExampleCase:
    """Two-lobe star interface, time-dependent jumps, concave segments."""
    return _wave_case("5a", PolarLeafInterface(2, 0.25), 2.5e-6, jumps_from_branches=True)


def example5b() -> ExampleCase:
    """Four-lobe star interface, time-dependent jumps, concave segments."""
    return _wave_case("5b", PolarLeafInterface(4, 0.10), 1e-5, jumps_from_branches=True)


_BUILDERS = {
    "1": example1,
    "2": example2,
    "3": example3,
    "4": example4,
    "5a": example5a,
    "5b": example5b,
}


def get_case(ident: str) -> ExampleCase:
    try:
        return _BUILDERS[str(ident)]()
    except KeyError:
        raise KeyError(
            f"unknown example {ident!r}; choose from {sorted(_BUILDERS)}"
        ) from None


def case_idents() -> list[str]:
    return list(_BUILDERS)


# ---------------------------------------------------------------------------
# manufactured-solution self-checks (finite-difference oracles)

_FD_H = 2e-3
_FD_DT = 1e-5


def _laplacian_fd(f, x, y, t, h=_FD_H):
    """Fourth-order five-point Laplacian of a branch formula."""
    acc = 2.0 * (-30.0) * f(x, y, t) / (12.0 * h * h)
    d = np.zeros_like(np.asarray(x, dtype=float))
    for axis in range(2):
        vals = []
        for step in (-2, -1, 1, 2):
            xx = x + step * h if axis == 0 else x
            yy = y + step * h if axis == 1 else y
            vals.append(f(xx, yy, t))
        d += (-vals[0] + 16.0 * vals[1] + 16.0 * vals[2] - vals[3]) / (12.0 * h * h)
    return d + acc


def _time_derivative_fd(f, x, y, t, dt=_FD_DT):
    return (f(x, y, t + dt) - f(x, y, t - dt)) / (2.0 * dt)


def _sample_side(case: ExampleCase, side: int, m: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Random interior points on one side, kept away from the boundary."""
    pts_x, pts_y = [], []
    d = case.half_width * 0.97
    while len(pts_x) < m:
        x = rng.uniform(-d, d, 4 * m)
        y = rng.uniform(-d, d, 4 * m)
        s = case.interface.sigma(x, y)
        keep = (s < -1e-3) if side < 0 else (s > 1e-3)
        pts_x.extend(x[keep][: m - len(pts_x)])
        pts_y.extend(y[keep][: m - len(pts_y)])
    return np.asarray(pts_x), np.asarray(pts_y)


def residual_check(case: ExampleCase, m: int = 100, seed: int = 0) -> float:
    """Max |u_t - alpha lap(u) - f| over random space-time samples per side."""
    rng = np.random.RandomState(seed)
    worst = 0.0
    for side, u, f, alpha in (
        (-1, case.u_minus, case.f_minus, case.alpha_minus),
        (+1, case.u_plus, case.f_plus, case.alpha_plus),
    ):
        x, y = _sample_side(case, side, m, rng)
        t = rng.uniform(0.0, case.t_final, m)
        res = _time_derivative_fd(u, x, y, t) - alpha * _laplacian_fd(u, x, y, t) - f(x, y, t)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def jump_check(case: ExampleCase, m: int = 100, seed: int = 0) -> dict[str, float]:
    """Max deviation of declared jump data from the two branches on the curve."""
    rng = np.random.RandomState(seed)
    s = rng.uniform(0.0, 2.0 * np.pi, m)
    t = rng.uniform(0.0, case.t_final, m)
    x, y = case.interface.boundary_point(s)
    th = _normal_angles(case.interface, x, y)
    nx, ny = np.cos(th), np.sin(th)
    gpx, gpy = case.grad_u_plus(x, y, t)
    gmx, gmy = case.grad_u_minus(x, y, t)
    phi_ref = case.u_plus(x, y, t) - case.u_minus(x, y, t)
    psi_ref = case.alpha_plus * (gpx * nx + gpy * ny) - case.alpha_minus * (gmx * nx + gmy * ny)
    tau_ref = (gpx - gmx) * (-ny) + (gpy - gmy) * nx
    return {
        "phi": float(np.max(np.abs(case.jumps.phi(x, y, t) - phi_ref))),
        "psi": float(np.max(np.abs(case.jumps.psi(x, y, t) - psi_ref))),
        "phi_tau": float(np.max(np.abs(case.jumps.phi_tau(x, y, t) - tau_ref))),
    }


def phi_tau_check(case: ExampleCase, m: int = 60, seed: int = 1, ds: float = 1e-5) -> float:
    """Max |phi_tau - d phi / d(arc length)| along the curve.

    The tangent tau = (-sin th, cos th) points in the direction of
    increasing polar angle for the curves used here, so the arc-length
    derivative of phi along the parametrisation matches phi_tau.
    """
    rng = np.random.RandomState(seed)
    s = rng.uniform(0.0, 2.0 * np.pi, m)
    t = rng.uniform(0.0, case.t_final, m)
    xp, yp = case.interface.boundary_point(s + ds)
    xm, ym = case.interface.boundary_point(s - ds)
    arc = np.hypot(xp - xm, yp - ym)
    dphi = case.jumps.phi(xp, yp, t) - case.jumps.phi(xm, ym, t)
    x, y = case.interface.boundary_point(s)
    return float(np.max(np.abs(dphi / arc - case.jumps.phi_tau(x, y, t))))
