"""Experiment configuration: a flat key = value text format with validation.

Example::

    # iteration sweep, large cavity
    geometry = large-cavity
    formulation = dirichlet-aprime
    k_start = 50
    k_stop = 150
    k_step = 1
    theta = 1.2566370614359172
    ppw = 10
    gmres_tol = 1e-6
    output_dir = out

Exactly one wavenumber source must be given: a grid (k_start/k_stop/k_step),
an explicit list (k_list, comma separated), or a quasimode CSV (k_file).
Unknown keys and malformed values are reported with their line number.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields
from typing import Optional, Tuple

from .errors import ParameterError

GEOMETRIES = ("small-cavity", "large-cavity", "ellipse", "circle")
FORMULATIONS = ("dirichlet-aprime", "neumann-b", "neumann-breg")


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: str = "small-cavity"
    formulation: str = "dirichlet-aprime"
    k_start: Optional[float] = None
    k_stop: Optional[float] = None
    k_step: Optional[float] = None
    k_list: Tuple[float, ...] = ()
    k_list_given: bool = field(default=False, compare=False, repr=False)
    k_file: str = ""
    theta: float = 4.0 * math.pi / 10.0
    ppw: float = 10.0
    mesh_margin: float = 1.1
    quad_order: int = 8
    gmres_tol: float = 1e-6
    epsilon: Optional[float] = None          # bound target; defaults to gmres_tol
    rect_re_min: float = -0.1
    rect_re_max: float = 0.1
    rect_im_min: float = -0.6
    rect_im_max: float = 0.6
    rect_orientation: str = "re-im"          # which printed interval is real
    l0: float = 0.2
    l1: float = 0.4
    half_plane: float = 0.4                  # S
    a1: float = 1.0                          # ellipse geometry parameters
    a2: float = 0.5
    radius: float = 1.0                      # circle geometry
    mode_n: int = 0                          # quasimode subcommand
    mode_parity: str = "even"
    mode_bc: str = "dirichlet"
    m_min: int = 0
    m_max: int = 10
    grid_xmin: float = -2.0                  # field subcommand
    grid_xmax: float = 2.0
    grid_ymin: float = -2.0
    grid_ymax: float = 2.0
    grid_nx: int = 100
    grid_ny: int = 100
    workers: int = 1
    timings: bool = False
    output_dir: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.geometry not in GEOMETRIES:
            raise ParameterError(f"unknown geometry {self.geometry!r}")
        if self.formulation not in FORMULATIONS:
            raise ParameterError(f"unknown formulation {self.formulation!r}")
        sources = sum([self.k_start is not None,
                       self.k_list_given or len(self.k_list) > 0,
                       bool(self.k_file)])
        if sources > 1:
            raise ParameterError("give only one of k grid, k_list, k_file")
        if self.k_start is not None:
            if self.k_stop is None or self.k_step is None:
                raise ParameterError("k grid needs k_start, k_stop and k_step")
            if self.k_step <= 0 or self.k_stop < self.k_start:
                raise ParameterError("need k_step > 0 and k_stop >= k_start")
        if self.ppw < 2:
            raise ParameterError("ppw must be >= 2")
        if not (0 < self.gmres_tol <= 1):
            raise ParameterError("gmres_tol must be in (0, 1]")
        if self.rect_orientation not in ("re-im", "im-re"):
            raise ParameterError("rect_orientation must be re-im or im-re")
        if not (0 < self.l0 < self.l1 <= self.half_plane):
            raise ParameterError("need 0 < l0 < l1 <= half_plane")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        return self

    def wavenumbers(self) -> Tuple[float, ...]:
        if self.k_list or self.k_list_given:
            return tuple(self.k_list)
        if self.k_file:
            from .csvio import read_csv
            schema, header, rows = read_csv(self.k_file)
            kcol = header.index("k")
            return tuple(sorted(float(r[kcol]) for r in rows))
        if self.k_start is None:
            raise ParameterError("no wavenumber source configured")
        ks = []
        k = self.k_start
        while k <= self.k_stop + 1e-12 * max(1.0, abs(self.k_stop)):
            ks.append(round(k, 12))
            k += self.k_step
        return tuple(ks)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or f.name == "k_list_given":
                continue
            if isinstance(v, tuple):
                if not v:
                    continue
                v = ",".join(repr(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str, lineno: int):
    typ = _FIELD_TYPES[key]
    try:
        if key == "k_list":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if typ in ("float", "Optional[float]"):
            return float(raw)
        if typ == "int":
            return int(raw)
        if typ == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ParameterError(f"line {lineno}: cannot parse {key} = {raw!r}") from None


def parse_config_text(text: str, overrides=()) -> ExperimentConfig:
    """Parse the flat key=value format; report errors with line numbers."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParameterError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES or key == "k_list_given":
            raise ParameterError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw, lineno)
        if key == "k_list":
            values["k_list_given"] = True
    for item in overrides:
        if "=" not in item:
            raise ParameterError(f"override {item!r} must be key=value")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES or key == "k_list_given":
            raise ParameterError(f"override: unknown key {key!r}")
        values[key] = _parse_value(key, raw.strip(), 0)
        if key == "k_list":
            values["k_list_given"] = True
    return ExperimentConfig(**values).validate()


def load_config(path, overrides=()) -> ExperimentConfig:
    if not os.path.exists(path):
        raise ParameterError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config_text(fh.read(), overrides)
