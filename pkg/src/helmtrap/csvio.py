"""Schema-versioned CSV output shared by the CLI and the plotting frontend.

Every file starts with ``# schema=<name> v<version>`` followed by a header
row.  Floats are written with repr (shortest round-trip), so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError

SCHEMAS = {
    "iterations": ("k", "n", "iterations", "converged"),
    "iterations-timed": ("k", "n", "iterations", "converged", "wall_time_s"),
    "iterations-fit": ("exponent", "prefactor", "n_points"),
    "spectrum": ("k", "index", "re_lambda", "im_lambda", "kappa_lambda", "sigma"),
    "summary": ("k", "n", "norm2", "min_sv", "min_abs_eig", "ell", "L_quantity"),
    "flow": ("path", "k", "re_lambda", "im_lambda"),
    "bound": ("k", "ell", "delta", "gamma_beta", "m_star", "m_actual",
              "residual_bound_at_actual", "flag"),
    "quasimodes": ("parity", "bc", "m", "n", "alpha", "q", "k"),
    "weyl": ("geometry", "k", "predicted_count", "measured_count"),
    "field": ("x", "y", "abs_u"),
    "galerkin-error": ("k", "level_factor", "n", "rel_l2_error"),
    "gmres-error": ("k", "n", "iterations", "rel_l2_error"),
    "gmres-trace": ("iteration", "residual_norm", "relative_residual"),
}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def format_row(schema: str, row: Sequence) -> str:
    cols = SCHEMAS[schema]
    if len(row) != len(cols):
        raise ParameterError(f"schema {schema!r} expects {len(cols)} columns, got {len(row)}")
    return ",".join(_fmt(v) for v in row)


def write_csv(path, schema: str, rows: Iterable[Sequence]) -> None:
    if schema not in SCHEMAS:
        raise ParameterError(f"unknown CSV schema {schema!r}")
    with open(path, "w") as fh:
        fh.write(f"# schema={schema} v1\n")
        fh.write(",".join(SCHEMAS[schema]) + "\n")
        for row in rows:
            fh.write(format_row(schema, row) + "\n")


def read_csv(path):
    """Read a schema'd CSV back as (schema_name, header, list of string rows)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise ParameterError(f"{path}: missing schema header")
        schema = first[len("# schema="):].split()[0]
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return schema, header, rows


class Checkpoint:
    """Row-level resume support for long sweeps.

    Completed rows are appended to ``<path>.partial`` as they finish; a rerun
    skips keys already present.  ``finalize`` writes the deterministic final
    CSV (rows sorted by key) and removes the partial file.
    """

    def __init__(self, path, schema: str):
        self.path = str(path)
        self.partial = self.path + ".partial"
        self.schema = schema
        self.rows = {}
        if os.path.exists(self.partial):
            with open(self.partial) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    key, row = line.split(";", 1)
                    self.rows[float(key)] = row

    def done(self, key: float) -> bool:
        return float(key) in self.rows

    def record(self, key: float, row: Sequence) -> None:
        text = format_row(self.schema, row)
        self.rows[float(key)] = text
        with open(self.partial, "a") as fh:
            fh.write(f"{float(key)!r};{text}\n")

    def finalize(self) -> None:
        with open(self.path, "w") as fh:
            fh.write(f"# schema={self.schema} v1\n")
            fh.write(",".join(SCHEMAS[self.schema]) + "\n")
            for key in sorted(self.rows):
                fh.write(self.rows[key] + "\n")
        if os.path.exists(self.partial):
            os.remove(self.partial)
