"""Command-line front end: single runs, convergence sweeps, stability reports.

Subcommands
    run             advance one configuration, print errors, optionally dump
                    the field as CSV (x, y, u_num, u_exact, error)
    converge-space  mesh-refinement table at fixed dt
    converge-time   step-refinement table at fixed mesh with fitted rates
    boundedness     long-run error tracking over many steps
    stability       leading eigenvalues of the one-step amplification map

All numeric flags are plain decimals; comma lists such as --meshes 21,41,81
are accepted where sweeps are needed.  Output files are written atomically.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import MatchedAdiError
from .geometry import classify_grid
from .ioutil import write_csv
from .problems import case_idents, get_case
from .stability import assemble_stability_matrices, spectrum_report, write_spectrum_csv
from .studies import (
    DEFAULT_DT_SWEEP,
    DEFAULT_MESHES,
    boundedness_run,
    run_case,
    spatial_convergence,
    temporal_convergence,
    write_boundedness_csv,
)


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--example", required=True, choices=case_idents(), help="benchmark case")
    p.add_argument("--threads", type=int, default=1, help="worker threads for line sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matched-adi",
        description="Interface heat-equation solver with matched line sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="advance one configuration and report errors")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--tfinal", type=float, default=None)
    p.add_argument("--scheme", choices=("douglas", "euler"), default="douglas")
    p.add_argument("--dump", default=None, help="write the final field as CSV")

    p = sub.add_parser("converge-space", help="mesh refinement study")
    _add_common(p)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--meshes", type=_int_list, default=list(DEFAULT_MESHES))
    p.add_argument("--tfinal", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("converge-time", help="time-step refinement study")
    _add_common(p)
    p.add_argument("--n", type=int, default=321)
    p.add_argument("--dts", type=_float_list, default=list(DEFAULT_DT_SWEEP))
    p.add_argument("--tfinal", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("boundedness", help="long-run error boundedness check")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dts", type=_float_list, required=True)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stability", help="leading amplification eigenvalues")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--alpha-plus", type=float, default=None, help="override the case diffusivity")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True)
    return parser


def _cmd_run(args) -> int:
    case = get_case(args.example)
    state, record = run_case(
        case, args.n, args.dt, args.tfinal, scheme=args.scheme, threads=args.threads
    )
    print(
        f"example {case.ident}: N={record.n} dt={record.dt:g} T={record.t_final:g} "
        f"Linf={record.linf:.6e} L2={record.l2:.6e} wall={record.wall_time:.2f}s"
    )
    if args.dump:
        grid = case.grid(args.n)
        X, Y = grid.node_mesh()
        exact = case.exact_on_grid(grid, state.t)
        plus = classify_grid(grid, case.interface) > 0
        rows = [
            [X[i, j], Y[i, j], state.u[i, j], exact[i, j], abs(state.u[i, j] - exact[i, j])]
            for i in range(grid.n)
            for j in range(grid.n)
        ]
        write_csv(
            args.dump,
            ["x", "y", "u_num", "u_exact", "error"],
            rows,
            {
                "example": case.ident, "n": args.n, "dt": args.dt,
                "t_final": record.t_final, "scheme": args.scheme,
                "plus_nodes": int(np.sum(plus)),
            },
        )
        print(f"field written to {args.dump}")
    return 0


def _cmd_converge_space(args) -> int:
    case = get_case(args.example)
    table = spatial_convergence(
        case, args.meshes, dt=args.dt, t_final=args.tfinal, threads=args.threads
    )
    table.write_csv(args.out)
    for rec, order in zip(table.records, table.orders_linf):
        tag = f" order {order:.2f}" if order is not None else ""
        print(f"N={rec.n:4d}  Linf={rec.linf:.6e}  L2={rec.l2:.6e}{tag}")
    if table.ls_rate_linf is not None:
        print(f"least-squares spatial order: Linf {table.ls_rate_linf:.2f}, L2 {table.ls_rate_l2:.2f}")
    print(f"table written to {args.out}")
    return 0


def _cmd_converge_time(args) -> int:
    case = get_case(args.example)
    table = temporal_convergence(
        case, args.dts, n=args.n, t_final=args.tfinal, threads=args.threads
    )
    table.write_csv(args.out)
    for rec in table.records:
        print(f"dt={rec.dt:<10g}Linf={rec.linf:.6e}  L2={rec.l2:.6e}")
    print(
        f"fitted temporal rate: Linf {table.fit_linf.rate:.2f} "
        f"(descending {table.fit_linf.descending_rate:.2f}), "
        f"L2 {table.fit_l2.rate:.2f} (descending {table.fit_l2.descending_rate:.2f})"
    )
    print(f"table written to {args.out}")
    return 0


def _cmd_boundedness(args) -> int:
    case = get_case(args.example)
    results = boundedness_run(case, args.n, args.dts, steps=args.steps, threads=args.threads)
    write_boundedness_csv(args.out, case.ident, args.n, results)
    for r in results:
        verdict = "bounded" if r.bounded else "UNBOUNDED"
        print(
            f"dt={r.dt:<8g}max={r.max_error:.6e}  step10={r.error_step10:.6e}  "
            f"final={r.final_error:.6e}  {verdict}"
        )
    print(f"report written to {args.out}")
    return 0


def _cmd_stability(args) -> int:
    case = get_case(args.example)
    prob = case.problem(args.n)
    if args.alpha_plus is not None:
        prob.alpha_plus = args.alpha_plus
        prob.__post_init__()
    sm = assemble_stability_matrices(prob, None, args.dt)
    report = spectrum_report(sm, k=args.k)
    write_spectrum_csv(report, args.out)
    print(
        f"max modulus {report.max_modulus:.12f}; "
        f"{report.unit_modulus_count} of {args.k} on the unit circle; "
        f"{'stable' if report.stable else 'UNSTABLE'}"
    )
    print(f"spectrum written to {args.out}")
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "converge-space": _cmd_converge_space,
    "converge-time": _cmd_converge_time,
    "boundedness": _cmd_boundedness,
    "stability": _cmd_stability,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except MatchedAdiError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
