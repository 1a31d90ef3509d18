#!/usr/bin/env python3
"""Amplification-map spectrum studies for the four-leaf interface.

Reproduces the two parameter studies: leading eigenvalues at N = 41 over a
range of time steps for two diffusivity ratios, and a 20-mesh sweep at a
fixed large step.  One CSV per configuration plus a summary line each.
"""

import argparse
import pathlib

from matched_adi.problems import get_case
from matched_adi.stability import assemble_stability_matrices, spectrum_report, write_spectrum_csv

DT_SWEEP = (1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5, 1e-6)
MESH_SWEEP = tuple(n for n in range(31, 52) if n != 43)  # N = 43 is unresolvable


def report_one(case, n, dt, alpha_plus, k, outdir):
    prob = case.problem(n)
    prob.alpha_plus = alpha_plus
    prob.__post_init__()
    sm = assemble_stability_matrices(prob, None, dt)
    rep = spectrum_report(sm, k)
    path = outdir / f"eig_n{n}_dt{dt:g}_ap{alpha_plus:g}.csv"
    write_spectrum_csv(rep, str(path))
    print(f"N={n:3d} dt={dt:<8g} a+={alpha_plus:<6g} max|l|={rep.max_modulus:.12f} "
          f"unit={rep.unit_modulus_count:2d} {'stable' if rep.stable else 'UNSTABLE'}")
    return rep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="spectra")
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--skip-mesh-sweep", action="store_true")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    case = get_case("5b")

    for alpha_plus in (10.0, 1000.0):
        for dt in DT_SWEEP:
            report_one(case, 41, dt, alpha_plus, args.k, outdir)

    if not args.skip_mesh_sweep:
        worst = 0.0
        for n in MESH_SWEEP:
            rep = report_one(case, n, 1.0, 10.0, args.k, outdir)
            worst = max(worst, rep.max_modulus)
        print(f"mesh sweep max modulus: {worst:.12f}")


if __name__ == "__main__":
    main()
