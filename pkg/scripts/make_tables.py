#!/usr/bin/env python3
"""Regenerate the spatial and temporal convergence tables for all cases.

Writes one CSV per study into --outdir.  The full-size spatial sweeps for
the time-dependent-jump cases take tens of minutes at N = 321; pass
--meshes 21,41,81 for a quick look.
"""

import argparse
import pathlib

from matched_adi.problems import case_idents, get_case
from matched_adi.studies import spatial_convergence, temporal_convergence

SPATIAL_DT = {"1": 1e-4, "2": 1e-4, "3": 1e-4, "4": 5e-6, "5a": 5e-6, "5b": 1e-5}

TEMPORAL_SWEEPS = {
    "1": [1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
    "2": [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
    "3": [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
    "4": [1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5],
    "5a": [1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 2e-3, 1e-3, 5e-4, 2.5e-4],
    "5b": [1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 2e-3, 1e-3, 5e-4, 2.5e-4],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="tables")
    ap.add_argument("--examples", default=",".join(case_idents()))
    ap.add_argument("--meshes", default="21,41,81,161,321")
    ap.add_argument("--skip-temporal", action="store_true")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    meshes = [int(tok) for tok in args.meshes.split(",")]

    for ident in args.examples.split(","):
        case = get_case(ident)
        tab = spatial_convergence(case, meshes, dt=SPATIAL_DT[ident], threads=args.threads)
        path = outdir / f"spatial_ex{ident}.csv"
        tab.write_csv(str(path))
        print(f"example {ident}: spatial table -> {path} "
              f"(ls orders {tab.ls_rate_linf:.2f}/{tab.ls_rate_l2:.2f})")
        if args.skip_temporal:
            continue
        ttab = temporal_convergence(case, TEMPORAL_SWEEPS[ident], n=max(meshes),
                                    threads=args.threads)
        tpath = outdir / f"temporal_ex{ident}.csv"
        ttab.write_csv(str(tpath))
        print(f"example {ident}: temporal table -> {tpath} "
              f"(rate {ttab.fit_linf.rate:.2f}, descending {ttab.fit_linf.descending_rate:.2f})")


if __name__ == "__main__":
    main()
