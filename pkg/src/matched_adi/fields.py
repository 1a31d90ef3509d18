"""Space-time field evaluators with optional time-separable fast paths.

Manufactured solutions, sources and boundary data in this package all have
the form sum_k g_k(t) * G_k(x, y).  Representing them as explicit
(time factor, spatial factor) terms lets the time stepper precompute the
spatial factors on the grid once and assemble a field at any t with a few
AXPYs instead of re-evaluating transcendentals on every node each step.
Plain callables are accepted everywhere and simply skip that fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SeparableField:
    """Sum of products of a scalar time factor and a spatial factor."""

    terms: tuple[tuple[Callable, Callable], ...]

    def __call__(self, x, y, t):
        out = None
        for tf, sf in self.terms:
            part = tf(t) * sf(x, y)
            out = part if out is None else out + part
        return out


def constant_in_time(spatial: Callable) -> SeparableField:
    return SeparableField(((lambda t: 1.0, spatial),))


class _CachedSeparable:
    def __init__(self, field: SeparableField, x, y):
        self._factors = [(tf, np.asarray(sf(x, y), dtype=float)) for tf, sf in field.terms]
        self._shape = np.shape(x)

    def at(self, t: float) -> np.ndarray:
        out = np.zeros(self._shape)
        for tf, arr in self._factors:
            out += tf(t) * arr
        return out


class _CachedGeneric:
    def __init__(self, fn, x, y):
        self._fn = fn
        self._x = x
        self._y = y

    def at(self, t: float) -> np.ndarray:
        return np.asarray(self._fn(self._x, self._y, t), dtype=float)


def cache_on_points(field, x, y):
    """Evaluator of ``field`` on fixed points, fast for separable fields."""
    if isinstance(field, SeparableField):
        return _CachedSeparable(field, x, y)
    return _CachedGeneric(field, x, y)


@dataclass(frozen=True)
class PiecewiseField:
    """Two-branch field selected by the node side (+1 exterior, -1 interior).

    Branches are evaluated only on their own subset of points, so branch
    formulas may be singular on the other side of the interface.
    """

    minus: SeparableField | Callable
    plus: SeparableField | Callable

    def evaluate(self, x, y, t, plus_mask) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        pm = np.asarray(plus_mask, dtype=bool)
        im = ~pm
        ya = np.asarray(y, dtype=float)
        if im.any():
            out[im] = self.minus(x[im], ya[im], t)
        if pm.any():
            out[pm] = self.plus(x[pm], ya[pm], t)
        return out


class CachedPiecewise:
    """Piecewise field bound to a fixed point set and side mask."""

    def __init__(self, field: PiecewiseField, x, y, plus_mask):
        self._shape = np.shape(x)
        self._pm = np.asarray(plus_mask, dtype=bool)
        self._im = ~self._pm
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self._minus = cache_on_points(field.minus, x[self._im], y[self._im])
        self._plus = cache_on_points(field.plus, x[self._pm], y[self._pm])

    def at(self, t: float) -> np.ndarray:
        out = np.empty(self._shape)
        out[self._im] = self._minus.at(t)
        out[self._pm] = self._plus.at(t)
        return out
