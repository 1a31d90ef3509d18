"""Tridiagonal and perturbed-tridiagonal solvers plus eigenvalue helpers.

The interface treatment perturbs a handful of rows of each 1D implicit
system away from tridiagonal form.  Two perturbation patterns occur:

  * ``regular``: a lone cut between rows I and I+1 adds entries at
    (I, I+2) and (I+1, I-1); two elementary row operations restore
    tridiagonal form.
  * ``corner``: a cut pair around row j widens rows j-1, j, j+1 to span
    columns j-2 .. j+2; six row operations restore tridiagonal form.

``reduce_and_solve`` performs those row operations followed by a single
Thomas solve, which keeps the per-line cost at O(N).  ``woodbury_solve``
and ``to_dense`` provide independent oracle solutions for testing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import (
    NoConvergence,
    PatternMismatch,
    SingularCapacitance,
    ZeroPivot,
)

try:  # optional JIT for the batched substitution loops
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is normally available
    _njit = None

if _njit is not None:

    @_njit(cache=True)
    def _substitute_jit(x, sub, dinv, cp, lo, hi):  # pragma: no cover - compiled
        n = x.shape[0]
        for l in range(lo, hi):
            x[0, l] = x[0, l] * dinv[0, l]
        for i in range(1, n):
            for l in range(lo, hi):
                x[i, l] = (x[i, l] - sub[i, l] * x[i - 1, l]) * dinv[i, l]
        for i in range(n - 2, -1, -1):
            for l in range(lo, hi):
                x[i, l] = x[i, l] - cp[i, l] * x[i + 1, l]

else:
    _substitute_jit = None

_PIVOT_TINY = 1e-300

REGULAR = "regular"
CORNER = "corner"

# Relative offsets (row - anchor, col - anchor) of admissible out-of-band
# entries for each pattern.  Anchor: first perturbed row (regular), middle
# perturbed row (corner).
_PATTERN_OFFSETS = {
    REGULAR: {(0, 2), (1, -1)},
    CORNER: {(-1, 1), (-1, 2), (0, -2), (0, 2), (1, -2), (1, -1)},
}


@dataclass
class TridiagonalMatrix:
    """Bands of an N x N tridiagonal matrix; sub[0] and sup[-1] are unused."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.sup = np.asarray(self.sup, dtype=float)
        n = self.diag.size
        if self.sub.size != n or self.sup.size != n:
            raise ValueError("band arrays must share one length")

    @property
    def n(self) -> int:
        return self.diag.size

    def copy(self) -> "TridiagonalMatrix":
        return TridiagonalMatrix(self.sub.copy(), self.diag.copy(), self.sup.copy())

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        a += np.diag(self.sub[1:], -1)
        a += np.diag(self.sup[:-1], 1)
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y


@dataclass
class PerturbedSystem:
    """Tridiagonal core plus grouped out-of-band entries.

    ``groups`` is a list of (kind, anchor) pairs; every out-of-band entry
    must sit at one of the admissible offsets of exactly one group.
    """

    tri: TridiagonalMatrix
    entries: list[tuple[int, int, float]] = field(default_factory=list)
    groups: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        self._validate()

    def _validate(self):
        n = self.tri.n
        claimed = {}
        for kind, anchor in self.groups:
            if kind not in _PATTERN_OFFSETS:
                raise PatternMismatch(f"unknown pattern kind {kind!r}")
            for dr, dc in _PATTERN_OFFSETS[kind]:
                claimed[(anchor + dr, anchor + dc)] = (kind, anchor)
        for r, c, _ in self.entries:
            if not (0 <= r < n and 0 <= c < n):
                raise PatternMismatch(f"entry ({r}, {c}) outside the matrix")
            if abs(r - c) <= 1:
                raise PatternMismatch(f"entry ({r}, {c}) lies inside the tridiagonal band")
            if (r, c) not in claimed:
                raise PatternMismatch(f"entry ({r}, {c}) matches no declared group")

    @property
    def n(self) -> int:
        return self.tri.n

    def to_dense(self) -> np.ndarray:
        a = self.tri.to_dense()
        for r, c, v in self.entries:
            a[r, c] += v
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.tri.matvec(x)
        for r, c, v in self.entries:
            y[r] += v * x[c]
        return y


def thomas_factor(tri: TridiagonalMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """LU-style factorisation: returns (sub, inverse pivots, scaled sup)."""
    n = tri.n
    dinv = np.empty(n)
    cp = np.empty(n)
    piv = tri.diag[0]
    if abs(piv) < _PIVOT_TINY:
        raise ZeroPivot(0, piv)
    dinv[0] = 1.0 / piv
    cp[0] = tri.sup[0] * dinv[0]
    for i in range(1, n):
        piv = tri.diag[i] - tri.sub[i] * cp[i - 1]
        if abs(piv) < _PIVOT_TINY:
            raise ZeroPivot(i, piv)
        dinv[i] = 1.0 / piv
        cp[i] = tri.sup[i] * dinv[i]
    return tri.sub, dinv, cp


def thomas_solve(tri: TridiagonalMatrix, rhs: np.ndarray) -> np.ndarray:
    """Direct O(N) solve of a tridiagonal system."""
    sub, dinv, cp = thomas_factor(tri)
    n = tri.n
    y = np.empty(n)
    y[0] = rhs[0] * dinv[0]
    for i in range(1, n):
        y[i] = (rhs[i] - sub[i] * y[i - 1]) * dinv[i]
    x = y
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


def _op_sequence(kind: str, anchor: int) -> list[tuple[int, int, int]]:
    """Ordered row operations (target, source, pivot column) for a group."""
    if kind == REGULAR:
        i = anchor
        return [(i + 1, i, i - 1), (i, i + 1, i + 2)]
    j = anchor
    return [
        (j, j - 1, j - 2),
        (j + 1, j - 1, j - 2),
        (j + 1, j, j - 1),
        (j - 1, j + 1, j + 2),
        (j, j + 1, j + 2),
        (j - 1, j, j + 1),
    ]


class _WorkMatrix:
    """Band + out-of-band working copy used during the row-op reduction."""

    def __init__(self, p: PerturbedSystem):
        self.tri = p.tri.copy()
        self.extra: dict[tuple[int, int], float] = {}
        for r, c, v in p.entries:
            if v != 0.0:
                self.extra[(r, c)] = self.extra.get((r, c), 0.0) + v

    def get(self, r: int, c: int) -> float:
        d = c - r
        if d == 0:
            return self.tri.diag[r]
        if d == -1:
            return self.tri.sub[r]
        if d == 1:
            return self.tri.sup[r]
        return self.extra.get((r, c), 0.0)

    def add(self, r: int, c: int, v: float):
        d = c - r
        if d == 0:
            self.tri.diag[r] += v
        elif d == -1:
            self.tri.sub[r] += v
        elif d == 1:
            self.tri.sup[r] += v
        else:
            self.extra[(r, c)] = self.extra.get((r, c), 0.0) + v

    def set_zero(self, r: int, c: int):
        self.extra.pop((r, c), None)

    def row_cols(self, r: int) -> list[int]:
        cols = [c for c in (r - 1, r, r + 1) if 0 <= c < self.tri.n]
        cols += [c for (rr, c) in self.extra if rr == r]
        return sorted(set(cols))


def reduce_system(
    p: PerturbedSystem,
) -> tuple[TridiagonalMatrix, list[tuple[int, int, float]]]:
    """Eliminate out-of-band entries by elementary row operations.

    Returns the reduced tridiagonal matrix together with the ordered list
    of (target_row, source_row, coefficient) operations that must also be
    applied to any right-hand side before the Thomas solve.
    """
    work = _WorkMatrix(p)
    ops: list[tuple[int, int, float]] = []
    for kind, anchor in p.groups:
        for tgt, src, col in _op_sequence(kind, anchor):
            entry = work.get(tgt, col)
            if entry == 0.0:
                ops.append((tgt, src, 0.0))
                continue
            piv = work.get(src, col)
            if abs(piv) < _PIVOT_TINY:
                raise ZeroPivot(src, piv)
            coef = entry / piv
            for c in work.row_cols(src):
                if c == col:
                    continue
                work.add(tgt, c, -coef * work.get(src, c))
            if abs(col - tgt) <= 1:
                work.add(tgt, col, -coef * piv)
            else:
                work.set_zero(tgt, col)
            ops.append((tgt, src, coef))
    leftover = sorted(k for k, v in work.extra.items() if v != 0.0)
    if leftover:
        raise PatternMismatch(f"row operations left entries at {leftover}")
    return work.tri, ops


def reduce_and_solve(
    p: PerturbedSystem, rhs: np.ndarray, counter: dict | None = None
) -> np.ndarray:
    """Row-op reduction followed by one Thomas solve; O(N) overall.

    ``counter``, when given, accumulates an operation tally under the keys
    'row_ops' and 'thomas_rows' so tests can assert the linear cost model.
    """
    tri, ops = reduce_system(p)
    b = np.array(rhs, dtype=float)
    for tgt, src, coef in ops:
        b[tgt] -= coef * b[src]
    if counter is not None:
        counter["row_ops"] = counter.get("row_ops", 0) + len(ops)
        counter["thomas_rows"] = counter.get("thomas_rows", 0) + 2 * tri.n
    return thomas_solve(tri, b)


def woodbury_solve(p: PerturbedSystem, rhs: np.ndarray) -> np.ndarray:
    """Oracle solve of a regular-pattern system via a rank-m update.

    The out-of-band entries of each regular group are written as an outer
    product P Q^T added to a tridiagonal T, and the inverse is applied with
    the Woodbury identity using one Thomas solve per column of P plus one
    for the right-hand side.
    """
    for kind, _ in p.groups:
        if kind != REGULAR:
            raise PatternMismatch("woodbury_solve supports only regular groups")
    m = len(p.groups)
    if m == 0 or not p.entries:
        return thomas_solve(p.tri, np.asarray(rhs, dtype=float))

    n = p.n
    values: dict[tuple[int, int], float] = {}
    for r, c, v in p.entries:
        values[(r, c)] = values.get((r, c), 0.0) + v

    P = np.zeros((n, m))
    Q = np.zeros((n, m))
    tri = p.tri.copy()
    for col, (_, anchor) in enumerate(p.groups):
        i = anchor
        upper = values.get((i, i + 2), 0.0)
        lower = values.get((i + 1, i - 1), 0.0)
        P[i, col] = 1.0
        P[i + 1, col] = 1.0
        Q[i + 2, col] = upper
        Q[i - 1, col] = lower
        # P Q^T also creates in-band entries at (i, i-1) and (i+1, i+2);
        # fold their negation into T so that T + P Q^T reproduces A.
        tri.sub[i] -= lower
        tri.sup[i + 1] -= upper

    sub, dinv, cp = thomas_factor(tri)

    def tsolve(b):
        y = np.empty(n)
        y[0] = b[0] * dinv[0]
        for i in range(1, n):
            y[i] = (b[i] - sub[i] * y[i - 1]) * dinv[i]
        for i in range(n - 2, -1, -1):
            y[i] -= cp[i] * y[i + 1]
        return y

    tb = tsolve(np.asarray(rhs, dtype=float))
    tp = np.column_stack([tsolve(P[:, k]) for k in range(m)])
    cap = np.eye(m) + Q.T @ tp
    if abs(np.linalg.det(cap)) < 1e-14:
        raise SingularCapacitance(f"capacitance determinant {np.linalg.det(cap):.3e}")
    return tb - tp @ np.linalg.solve(cap, Q.T @ tb)


def woodbury_factors(p: PerturbedSystem) -> tuple[TridiagonalMatrix, np.ndarray, np.ndarray]:
    """The (T, P, Q) decomposition used by ``woodbury_solve`` (for tests)."""
    m = len(p.groups)
    n = p.n
    values: dict[tuple[int, int], float] = {}
    for r, c, v in p.entries:
        values[(r, c)] = values.get((r, c), 0.0) + v
    P = np.zeros((n, m))
    Q = np.zeros((n, m))
    tri = p.tri.copy()
    for col, (kind, anchor) in enumerate(p.groups):
        if kind != REGULAR:
            raise PatternMismatch("woodbury factors exist only for regular groups")
        i = anchor
        upper = values.get((i, i + 2), 0.0)
        lower = values.get((i + 1, i - 1), 0.0)
        P[i, col] = 1.0
        P[i + 1, col] = 1.0
        Q[i + 2, col] = upper
        Q[i - 1, col] = lower
        tri.sub[i] -= lower
        tri.sup[i + 1] -= upper
    return tri, P, Q


class BatchedTridiagonalSolver:
    """Pre-factored solver for a family of same-size reduced line systems.

    Holds the Thomas factorisation of every line's reduced tridiagonal
    matrix in (n, L) arrays plus the recorded row operations that must hit
    each right-hand side before substitution.  Per-line arithmetic is
    elementwise across the L axis, so results are independent of how the
    lines are chunked over worker threads.
    """

    def __init__(self, tris: list[TridiagonalMatrix], ops_per_line: list[list[tuple[int, int, float]]]):
        if not tris:
            raise ValueError("need at least one line system")
        n = tris[0].n
        L = len(tris)
        sub = np.empty((n, L), order="C")
        diag = np.empty((n, L))
        sup = np.empty((n, L))
        for l, t in enumerate(tris):
            sub[:, l] = t.sub
            diag[:, l] = t.diag
            sup[:, l] = t.sup
        dinv = np.empty((n, L))
        cp = np.empty((n, L))
        piv = diag[0]
        if np.any(np.abs(piv) < _PIVOT_TINY):
            raise ZeroPivot(0)
        dinv[0] = 1.0 / piv
        cp[0] = sup[0] * dinv[0]
        for i in range(1, n):
            piv = diag[i] - sub[i] * cp[i - 1]
            if np.any(np.abs(piv) < _PIVOT_TINY):
                raise ZeroPivot(i)
            dinv[i] = 1.0 / piv
            cp[i] = sup[i] * dinv[i]
        self.n = n
        self.n_lines = L
        self._sub = sub
        self._dinv = dinv
        self._cp = cp
        # Row operations grouped by sequence position so each group touches
        # any line at most once and can be applied with fancy indexing.
        max_ops = max((len(ops) for ops in ops_per_line), default=0)
        self._op_steps = []
        for step in range(max_ops):
            lines, tgts, srcs, coefs = [], [], [], []
            for l, ops in enumerate(ops_per_line):
                if step < len(ops):
                    tgt, src, coef = ops[step]
                    lines.append(l)
                    tgts.append(tgt)
                    srcs.append(src)
                    coefs.append(coef)
            self._op_steps.append(
                (np.array(lines), np.array(tgts), np.array(srcs), np.array(coefs))
            )

    def solve(self, rhs: np.ndarray, threads: int = 1) -> np.ndarray:
        """Solve all lines; ``rhs`` has shape (n, L) with one line per column."""
        if rhs.shape != (self.n, self.n_lines):
            raise ValueError(f"rhs shape {rhs.shape} != {(self.n, self.n_lines)}")
        x = np.array(rhs, dtype=float)
        for lines, tgts, srcs, coefs in self._op_steps:
            x[tgts, lines] -= coefs * x[srcs, lines]
        if threads <= 1 or self.n_lines < 2 * threads:
            self._substitute(x, 0, self.n_lines)
        else:
            from concurrent.futures import ThreadPoolExecutor

            bounds = np.linspace(0, self.n_lines, threads + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = [
                    pool.submit(self._substitute, x, lo, hi)
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                    if hi > lo
                ]
                for f in futs:
                    f.result()
        return x

    def _substitute(self, x: np.ndarray, lo: int, hi: int):
        if _substitute_jit is not None:
            _substitute_jit(x, self._sub, self._dinv, self._cp, lo, hi)
            return
        sub = self._sub[:, lo:hi]
        dinv = self._dinv[:, lo:hi]
        cp = self._cp[:, lo:hi]
        xs = x[:, lo:hi]
        xs[0] *= dinv[0]
        for i in range(1, self.n):
            xs[i] -= sub[i] * xs[i - 1]
            xs[i] *= dinv[i]
        for i in range(self.n - 2, -1, -1):
            xs[i] -= cp[i] * xs[i + 1]


_EIG_SEED = 20240801


def leading_eigenvalues(
    apply,
    dim: int,
    k: int,
    tol: float = 1e-12,
    maxiter: int | None = None,
    seed: int = _EIG_SEED,
    residual_tol: float = 1e-8,
    return_vectors: bool = False,
):
    """Largest-magnitude eigenvalues of a linear map, sorted descending.

    Uses restarted Arnoldi iteration with a fixed, seeded start vector so
    repeated calls are reproducible.  Every returned Ritz pair is checked
    against ``residual_tol``; on failure a dense eigensolve is attempted
    for dim <= 2500, otherwise NoConvergence is raised.
    """
    if k < 1 or k > dim:
        raise ValueError(f"need 1 <= k <= dim, got k={k}, dim={dim}")

    def _dense():
        m = np.empty((dim, dim))
        e = np.zeros(dim)
        for c in range(dim):
            e[c] = 1.0
            m[:, c] = apply(e)
            e[c] = 0.0
        w, v = scipy.linalg.eig(m)
        order = _sort_order(w)
        w, v = w[order][:k], v[:, order][:, :k]
        return w, v

    v0 = np.random.RandomState(seed).standard_normal(dim)
    op = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=apply, dtype=float)
    ncv = min(dim, max(4 * k + 1, 40))
    vals = vecs = None
    if k < dim - 1:
        try:
            vals, vecs = scipy.sparse.linalg.eigs(
                op, k=k, which="LM", v0=v0, ncv=ncv, tol=tol,
                maxiter=maxiter or 100 * dim,
            )
        except scipy.sparse.linalg.ArpackNoConvergence:
            vals = None
    if vals is None or not _residuals_ok(apply, vals, vecs, residual_tol):
        if dim <= 2500:
            vals, vecs = _dense()
        elif vals is None:
            raise NoConvergence(f"Arnoldi iteration failed for dim={dim}, k={k}")
        else:
            res = _max_residual(apply, vals, vecs)
            raise NoConvergence(
                f"Ritz residual {res:.3e} above {residual_tol:.1e} for dim={dim}"
            )
    order = _sort_order(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    if return_vectors:
        return vals, vecs
    return vals


def _sort_order(vals: np.ndarray) -> np.ndarray:
    return np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))


def _max_residual(apply, vals, vecs) -> float:
    worst = 0.0
    for lam, v in zip(vals, vecs.T):
        av = apply(v.real) + 1j * apply(v.imag)
        worst = max(worst, np.linalg.norm(av - lam * v) / np.linalg.norm(v))
    return worst


def _residuals_ok(apply, vals, vecs, residual_tol) -> bool:
    return _max_residual(apply, vals, vecs) <= residual_tol
