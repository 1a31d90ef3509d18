"""Problem factories shared across test modules."""

import numpy as np

from matched_adi.adi import ProblemSpec
from matched_adi.fields import PiecewiseField, SeparableField
from matched_adi.geometry import Grid2D
from matched_adi.mib import JumpData


def smooth_problem(n=17, alpha=0.7, half_width=1.0):
    """Manufactured no-interface problem: u = cos t cos x cos y."""
    u_f = SeparableField(((np.cos, lambda x, y: np.cos(x) * np.cos(y)),))
    f_f = SeparableField((
        (lambda t: -np.sin(t), lambda x, y: np.cos(x) * np.cos(y)),
        (np.cos, lambda x, y: 2 * alpha * np.cos(x) * np.cos(y)),
    ))
    return ProblemSpec(
        Grid2D(half_width, n), None, alpha, alpha,
        PiecewiseField(f_f, f_f), u_f, PiecewiseField(u_f, u_f), None,
    )


def constant_problem(interface, n=21, half_width=0.99, am=1.0, ap=10.0, c=3.7):
    """Constant exact solution with zero jumps across an optional interface."""
    const = SeparableField(((lambda t: 1.0, lambda x, y: np.full_like(np.asarray(x, float), c)),))
    zero_f = SeparableField(((lambda t: 0.0, lambda x, y: np.zeros_like(np.asarray(x, float))),))
    zero_j = lambda x, y, t: np.zeros_like(np.asarray(x, float))
    return ProblemSpec(
        Grid2D(half_width, n), interface, am, ap,
        PiecewiseField(zero_f, zero_f), const, PiecewiseField(const, const),
        JumpData(zero_j, zero_j, zero_j) if interface is not None else None,
    )
