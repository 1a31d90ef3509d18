"""Convergence studies, long-run boundedness checks and rate fitting.

Spatial sweeps refine the mesh at a fixed small time step; temporal sweeps
refine the step at a fixed fine mesh.  Temporal error curves flatten once
the spatial discretisation error dominates, so rate fits exclude that
plateau: a record is plateaued when its error is within 1.5x of the sweep
minimum or its step is at or below the minimiser's.  For problems with
time-dependent jump data the error also stalls at large steps; the
descending branch (the contiguous run of genuinely decaying records next
to the plateau) is fitted separately and the stalled records are reported
as polluted.

Norms: Linf is the max nodal error; L2 is the root mean square over all
grid nodes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .adi import FieldState, advance
from .errors import FitUnderdetermined
from .geometry import Grid2D
from .ioutil import write_csv
from .problems import ExampleCase

DEFAULT_MESHES = (21, 41, 81, 161, 321)

# default step sweep for temporal studies: two points per decade
DEFAULT_DT_SWEEP = tuple(
    float(f"{m}e-{e}") for e in range(0, 7) for m in (1, 5) if not (e == 0 and m == 5)
)

PLATEAU_FACTOR = 1.5


@dataclass(frozen=True)
class ErrorRecord:
    n: int
    dt: float
    t_final: float
    linf: float
    l2: float
    wall_time: float


def exact_error(case: ExampleCase, state: FieldState, grid: Grid2D) -> tuple[float, float]:
    """(Linf, L2) error of a computed field against the exact solution."""
    exact = case.exact_on_grid(grid, state.t)
    err = np.abs(state.u - exact)
    if not np.all(np.isfinite(err)):
        return float("inf"), float("inf")
    return float(err.max()), float(np.sqrt(np.mean(err * err)))


def run_case(
    case: ExampleCase,
    n: int,
    dt: float,
    t_final: float | None = None,
    scheme: str = "douglas",
    threads: int = 1,
) -> tuple[FieldState, ErrorRecord]:
    """Advance one configuration to its stopping time and measure errors."""
    t_final = case.t_final if t_final is None else t_final
    prob = case.problem(n)
    start = time.perf_counter()
    state, _ = advance(prob, scheme, dt, t_final, threads=threads)
    wall = time.perf_counter() - start
    linf, l2 = exact_error(case, state, prob.grid)
    return state, ErrorRecord(n=n, dt=dt, t_final=t_final, linf=linf, l2=l2, wall_time=wall)


def pairwise_orders(values: list[float], ratios: list[float]) -> list[float | None]:
    """Observed orders log(e_prev/e_next) / log(ratio) between neighbours."""
    orders: list[float | None] = [None]
    for k in range(1, len(values)):
        if values[k] <= 0 or values[k - 1] <= 0 or ratios[k] <= 1:
            orders.append(None)
        else:
            orders.append(float(np.log(values[k - 1] / values[k]) / np.log(ratios[k])))
    return orders


def _ls_slope(x: np.ndarray, y: np.ndarray) -> float:
    lx, ly = np.log(x), np.log(y)
    a = np.vstack([lx, np.ones_like(lx)]).T
    slope, _ = np.linalg.lstsq(a, ly, rcond=None)[0]
    return float(slope)


@dataclass
class TemporalFitInfo:
    rate: float                    # fit over all pre-plateau records
    descending_rate: float         # fit over the decaying branch only
    fit_dts: list[float]
    descending_dts: list[float]
    plateau_dts: list[float]
    polluted_dts: list[float]

    @property
    def plateau_detected(self) -> bool:
        return bool(self.plateau_dts)

    @property
    def pollution_detected(self) -> bool:
        return bool(self.polluted_dts)


@dataclass
class ConvergenceTable:
    kind: str                      # 'spatial' or 'temporal'
    case_ident: str
    records: list[ErrorRecord]
    orders_linf: list[float | None] = field(default_factory=list)
    orders_l2: list[float | None] = field(default_factory=list)
    ls_rate_linf: float | None = None
    ls_rate_l2: float | None = None
    fit_linf: TemporalFitInfo | None = None
    fit_l2: TemporalFitInfo | None = None

    def write_csv(self, path: str, params: dict | None = None) -> None:
        meta = dict(params or {})
        meta.setdefault("example", self.case_ident)
        meta.setdefault("kind", self.kind)
        if self.ls_rate_linf is not None:
            meta["ls_rate_Linf"] = f"{self.ls_rate_linf:.6f}"
            meta["ls_rate_L2"] = f"{self.ls_rate_l2:.6f}"
        if self.fit_linf is not None:
            meta["fit_rate_Linf"] = f"{self.fit_linf.rate:.6f}"
            meta["fit_rate_L2"] = f"{self.fit_l2.rate:.6f}"
            meta["descending_rate_Linf"] = f"{self.fit_linf.descending_rate:.6f}"
            meta["descending_rate_L2"] = f"{self.fit_l2.descending_rate:.6f}"
        if self.kind == "spatial":
            columns = ["N", "Linf", "order_Linf", "L2", "order_L2"]
            rows = [
                [r.n, r.linf, ol, r.l2, o2]
                for r, ol, o2 in zip(self.records, self.orders_linf, self.orders_l2)
            ]
            meta.setdefault("dt", self.records[0].dt if self.records else "")
        else:
            columns = ["dt", "Linf", "order_Linf", "L2", "order_L2"]
            rows = [
                [r.dt, r.linf, ol, r.l2, o2]
                for r, ol, o2 in zip(self.records, self.orders_linf, self.orders_l2)
            ]
            meta.setdefault("n", self.records[0].n if self.records else "")
        meta.setdefault("t_final", self.records[0].t_final if self.records else "")
        write_csv(path, columns, rows, meta)


def spatial_convergence(
    case: ExampleCase,
    meshes=DEFAULT_MESHES,
    dt: float | None = None,
    t_final: float | None = None,
    scheme: str = "douglas",
    threads: int = 1,
) -> ConvergenceTable:
    """Mesh-refinement study at a fixed, spatially subdominant time step."""
    dt = case.dt_spatial if dt is None else dt
    records = [run_case(case, n, dt, t_final, scheme, threads)[1] for n in meshes]
    ratios = [1.0] + [
        (records[k].n - 1) / (records[k - 1].n - 1) for k in range(1, len(records))
    ]
    table = ConvergenceTable(
        kind="spatial",
        case_ident=case.ident,
        records=records,
        orders_linf=pairwise_orders([r.linf for r in records], ratios),
        orders_l2=pairwise_orders([r.l2 for r in records], ratios),
    )
    if len(records) >= 2:
        h = np.array([2.0 * case.half_width / (r.n - 1) for r in records])
        table.ls_rate_linf = _ls_slope(h, np.array([r.linf for r in records]))
        table.ls_rate_l2 = _ls_slope(h, np.array([r.l2 for r in records]))
    return table


def _temporal_fit(dts: np.ndarray, errs: np.ndarray) -> TemporalFitInfo:
    """Split a step sweep into plateau / descending / polluted and fit rates.

    Plateau: records with error within 1.5x of the sweep minimum and steps
    at or below the minimiser's.  A floor needs corroboration: if only the
    minimiser itself sits within 1.5x, the sweep never reached the spatial
    limit and nothing is excluded.

    Descending branch: starting from the smallest non-plateau step, extend
    toward larger steps while the pairwise observed order stays at or above
    max(1.0, 2/3 of the best pairwise order in the sweep); records at
    larger steps than the branch are reported as polluted.
    """
    order = np.argsort(dts)[::-1]  # large steps first
    dts = dts[order]
    errs = errs[order]
    k_min = int(np.argmin(errs))
    near_floor = errs <= PLATEAU_FACTOR * errs[k_min]
    if int(np.sum(near_floor)) >= 2:
        plateau = near_floor | (dts <= dts[k_min])
    else:
        plateau = np.zeros_like(near_floor)
    fit_idx = [k for k in range(len(dts)) if not plateau[k]]
    if len(fit_idx) < 2:
        raise FitUnderdetermined(
            f"only {len(fit_idx)} records precede the accuracy plateau"
        )
    rate = _ls_slope(dts[fit_idx], errs[fit_idx])

    def pair_order(hi: int, lo: int) -> float:
        return float(np.log(errs[hi] / errs[lo]) / np.log(dts[hi] / dts[lo]))

    pair_orders = [pair_order(a, b) for a, b in zip(fit_idx[:-1], fit_idx[1:])]
    floor = max(1.0, (2.0 / 3.0) * max(pair_orders, default=0.0))
    descending = [fit_idx[-1]]
    for k, po in zip(reversed(fit_idx[:-1]), reversed(pair_orders)):
        if po >= floor:
            descending.insert(0, k)
        else:
            break
    if len(descending) >= 2:
        descending_rate = _ls_slope(dts[descending], errs[descending])
    else:
        descending_rate = rate
    polluted = [k for k in fit_idx if k < descending[0]]
    return TemporalFitInfo(
        rate=rate,
        descending_rate=descending_rate,
        fit_dts=[float(dts[k]) for k in fit_idx],
        descending_dts=[float(dts[k]) for k in descending],
        plateau_dts=[float(d) for d, p in zip(dts, plateau) if p],
        polluted_dts=[float(dts[k]) for k in polluted],
    )


def temporal_convergence(
    case: ExampleCase,
    dts=DEFAULT_DT_SWEEP,
    n: int = 321,
    t_final: float | None = None,
    scheme: str = "douglas",
    threads: int = 1,
) -> ConvergenceTable:
    """Step-refinement study at a fixed mesh, with plateau-aware rate fits."""
    dts = sorted(dts, reverse=True)
    records = [run_case(case, n, dt, t_final, scheme, threads)[1] for dt in dts]
    ratios = [1.0] + [records[k - 1].dt / records[k].dt for k in range(1, len(records))]
    table = ConvergenceTable(
        kind="temporal",
        case_ident=case.ident,
        records=records,
        orders_linf=pairwise_orders([r.linf for r in records], ratios),
        orders_l2=pairwise_orders([r.l2 for r in records], ratios),
    )
    arr_dt = np.array([r.dt for r in records])
    table.fit_linf = _temporal_fit(arr_dt, np.array([r.linf for r in records]))
    table.fit_l2 = _temporal_fit(arr_dt, np.array([r.l2 for r in records]))
    return table


@dataclass(frozen=True)
class BoundednessResult:
    dt: float
    steps: int
    error_step10: float
    max_error: float
    final_error: float
    nonfinite: bool

    @property
    def bounded(self) -> bool:
        if self.nonfinite:
            return False
        if self.steps <= 10 or self.error_step10 == 0.0:
            return np.isfinite(self.max_error)
        return self.max_error <= 1e6 * self.error_step10


def boundedness_run(
    case: ExampleCase,
    n: int,
    dts,
    steps: int = 10_000,
    scheme: str = "douglas",
    threads: int = 1,
) -> list[BoundednessResult]:
    """March each step size for a fixed step count, tracking the error."""
    results = []
    for dt in dts:
        prob = case.problem(n)
        grid = prob.grid
        errors: list[float] = []

        def track(state):
            errors.append(exact_error(case, state, grid)[0])

        if steps > 0:
            advance(prob, scheme, dt, steps * dt, threads=threads, on_step=track)
        else:
            track(prob.initial_state())
        arr = np.array(errors)
        nonfinite = bool(~np.all(np.isfinite(arr)))
        results.append(
            BoundednessResult(
                dt=dt,
                steps=steps,
                error_step10=float(arr[min(9, len(arr) - 1)]),
                max_error=float(arr.max()) if not nonfinite else float("inf"),
                final_error=float(arr[-1]),
                nonfinite=nonfinite,
            )
        )
    return results


def write_boundedness_csv(path: str, case_ident: str, n: int, results: list[BoundednessResult]) -> None:
    write_csv(
        path,
        ["dt", "steps", "error_step10", "max_error", "final_error", "bounded"],
        [
            [r.dt, r.steps, r.error_step10, r.max_error, r.final_error, int(r.bounded)]
            for r in results
        ],
        {"example": case_ident, "n": n},
    )
