#!/usr/bin/env python3
"""Tabulate Dirichlet ellipse eigenfrequencies used by the frequency sweeps.

Prints k^e_{m,0} for m = 0..12 and the odd mode k^o_{17,7} that sits within
5 significant figures of the integer frequency 120.
"""

import os
import sys

from helmtrap.quasimodes import (EllipseSpec, export_modes, find_mode,
                                 list_quasimode_frequencies)

OUT = sys.argv[1] if len(sys.argv) > 1 else "out-quasimodes"


def main():
    os.makedirs(OUT, exist_ok=True)
    ellipse = EllipseSpec(1.0, 0.5)
    modes = list_quasimode_frequencies(0, range(0, 13), "even", "dirichlet",
                                       ellipse, k_max=90.0)
    for m in modes:
        print(f"k^e_{m.m},0 = {m.k!r}")
    deep = find_mode(17, 7, "odd", "dirichlet", ellipse, k_max=130.0)
    print(f"k^o_17,7 = {deep.k!r}   (close to the integer frequency 120)")
    export_modes(modes + [deep], os.path.join(OUT, "quasimodes.csv"))


if __name__ == "__main__":
    main()
