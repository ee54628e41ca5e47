#!/usr/bin/env python3
"""Iteration counts for the large cavity at k=100, ten and twenty points per
wavelength, with trace CSVs for later plotting."""

import os
import sys
import numpy as np

from helmtrap.bem import PlaneWave, assemble_mass, assemble_system, plane_wave_rhs
from helmtrap.geometry import build_mesh, make_large_cavity
from helmtrap.gmres import SolveConfig, export_trace, gmres_solve

OUT = sys.argv[1] if len(sys.argv) > 1 else "out-iterations"


def main():
    os.makedirs(OUT, exist_ok=True)
    k = 100.0
    theta = 4 * np.pi / 10
    for ppw in (10.0, 20.0):
        mesh = build_mesh(make_large_cavity(), k, ppw)
        A = assemble_system(mesh, "dirichlet-aprime", k)
        M = assemble_mass(mesh).entries
        rhs = plane_wave_rhs(mesh, "dirichlet-aprime", PlaneWave(k, theta))
        _, trace = gmres_solve(A, rhs, SolveConfig(tol=1e-6), mass=M)
        export_trace(trace, os.path.join(OUT, f"trace-ppw{int(ppw)}.csv"))
        print(f"ppw={ppw:>4}: n={mesh.n_nodes}  iterations={trace.iterations}  "
              f"converged={trace.converged}")


if __name__ == "__main__":
    main()
