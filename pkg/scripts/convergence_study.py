#!/usr/bin/env python3
"""Eigenvalue convergence table under uniform refinement.

Solves the second Neumann eigenvalue on the unit square and the 2x1
rectangle, refining the mesh a few times, and prints errors against the
analytic values together with consecutive error ratios (4.0 expected for
second-order convergence).
"""

import argparse
import math
import time

from hotspots import fem, geometry, meshing

CASES = {
    "unit square": ([(0, 0), (1, 0), (1, 1), (0, 1)], math.pi**2),
    "2x1 rectangle": ([(0, 0), (2, 0), (2, 1), (0, 1)], math.pi**2 / 4),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--h", type=float, default=0.08, help="base mesh size")
    parser.add_argument("--levels", type=int, default=3, help="refinement levels")
    args = parser.parse_args()

    for name, (verts, exact) in CASES.items():
        poly = geometry.validate(verts)
        mesh = meshing.generate(poly, args.h)
        print(f"\n{name}: exact mu2 = {exact:.9f}")
        print(f"{'n_vertices':>10} {'mu2':>14} {'error':>12} {'ratio':>7} {'secs':>6}")
        prev_err = None
        for _ in range(args.levels):
            t0 = time.perf_counter()
            k_mat = fem.assemble_stiffness(mesh)
            m_mat = fem.assemble_mass(mesh)
            mu2 = fem.solve_neumann(k_mat, m_mat, k=3).eigenvalues[1]
            dt = time.perf_counter() - t0
            err = mu2 - exact
            ratio = f"{prev_err / err:7.3f}" if prev_err is not None else "      -"
            print(f"{mesh.vertex_count:>10} {mu2:>14.9f} {err:>12.3e} {ratio} {dt:>6.2f}")
            prev_err = err
            mesh = meshing.refine(mesh)


if __name__ == "__main__":
    main()
