#!/usr/bin/env python3
"""Near-zero eigenvalue counts vs the phase-space prediction.

For each requested wavenumber: assemble the Dirichlet system on the chosen
cavity, count eigenvalues of M^-1 A' in the standard window, and compare with
the leading Weyl term.  Emits a CSV ready for the counting-vs-prediction
figure kind.

usage: counting_experiment.py [small|large] [k1 k2 ...]
"""

import os
import sys

import scipy.linalg as la

from helmtrap.bem import assemble_mass, assemble_system
from helmtrap.csvio import write_csv
from helmtrap.geometry import build_mesh, make_large_cavity, make_small_cavity
from helmtrap.spectral import DEFAULT_RECTANGLE, count_in_rectangle, eigenvalues_only
from helmtrap.weyl import cavity_weyl_config, predicted_window_count


def main():
    which = sys.argv[1] if len(sys.argv) > 1 else "small"
    ks = [float(a) for a in sys.argv[2:]] or [50.0, 70.0, 90.0, 110.0]
    curve = make_small_cavity() if which == "small" else make_large_cavity()
    cfg = cavity_weyl_config(which)
    out = f"out-counting-{which}"
    os.makedirs(out, exist_ok=True)
    rows = []
    for k in ks:
        mesh = build_mesh(curve, k, 10.0)
        A = assemble_system(mesh, "dirichlet-aprime", k)
        M = assemble_mass(mesh).entries
        eigs = eigenvalues_only(la.solve(M, A.entries, assume_a="pos"))
        measured, _ = count_in_rectangle(eigs, DEFAULT_RECTANGLE)
        predicted = predicted_window_count(k, cfg)
        rows.append((f"{which}-cavity", k, predicted, measured))
        print(f"k={k:7.2f}  n={mesh.n_nodes:5d}  measured={measured}  "
              f"predicted={predicted:.2f}")
    write_csv(os.path.join(out, "weyl.csv"), "weyl", rows)


if __name__ == "__main__":
    main()
