"""Experiment orchestration CLI.

Subcommands (each takes --config FILE plus repeated --set key=value
overrides and writes schema-versioned CSVs into the configured output
directory):

    sweep-iterations   per-k GMRES iteration counts + exponent fit
    spectrum           eigenvalues/kappas/singular values + summary rows
    flow               eigenvalue paths over a fine k grid
    bound              cluster-plus-outliers bound vs actual iterations
    quasimodes         ellipse eigenfrequencies (Mathieu solver)
    weyl               predicted vs measured near-zero eigenvalue counts
    field              total-field magnitude on a Cartesian grid
    galerkin-error     nested-refinement relative L2 errors (factors 2,3,6)
    gmres-error        GMRES-vs-LU relative L2 error per k

Exit code 0 on success, 2 if any per-item failure was recorded (see
``failures.txt`` in the output directory).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import scipy.linalg as la

from . import bem, geometry, quasimodes as qm, weyl
from .config import ExperimentConfig, load_config, parse_config_text
from .csvio import Checkpoint, write_csv
from .errors import BoundAssumptionError, HelmtrapError
from .gmres import SolveConfig, direct_solve, gmres_solve
from .bound import ClusterBoundInput, compute_bound
from .spectral import (Rectangle, eigenvalues_only, fit_exponent,
                       full_spectrum, track_eigenpaths)

__all__ = ["main"]


def _curve(cfg: ExperimentConfig):
    if cfg.geometry == "small-cavity":
        return geometry.make_small_cavity()
    if cfg.geometry == "large-cavity":
        return geometry.make_large_cavity()
    if cfg.geometry == "ellipse":
        return geometry.make_ellipse(cfg.a1, cfg.a2)
    return geometry.make_circle(cfg.radius)


def _rectangle(cfg: ExperimentConfig) -> Rectangle:
    rect = Rectangle(cfg.rect_re_min, cfg.rect_re_max,
                     cfg.rect_im_min, cfg.rect_im_max)
    return rect if cfg.rect_orientation == "re-im" else rect.swapped()


def _assembled(cfg: ExperimentConfig, k: float):
    mesh = geometry.build_mesh(_curve(cfg), k, cfg.ppw, cfg.mesh_margin)
    A = bem.assemble_system(mesh, cfg.formulation, k, cfg.quad_order)
    M = bem.assemble_mass(mesh).entries
    return mesh, A, M


def _precond_matrix(A, M) -> np.ndarray:
    return la.solve(M, A.entries, assume_a="pos")


class _Failures:
    def __init__(self, outdir):
        self.path = os.path.join(outdir, "failures.txt")
        self.warn_path = os.path.join(outdir, "warnings.txt")
        self.items = []
        self.warnings = []

    def record(self, label, exc):
        self.items.append((label, f"{type(exc).__name__}: {exc}"))

    def warn(self, label, message):
        self.warnings.append((label, message))

    def flush(self) -> int:
        for path, items in ((self.path, self.items),
                            (self.warn_path, self.warnings)):
            if items:
                with open(path, "w") as fh:
                    for label, msg in items:
                        fh.write(f"{label}\t{msg}\n")
            elif os.path.exists(path):
                os.remove(path)
        return 2 if self.items else 0


def _run_per_k(cfg, ks, work, checkpoint, failures):
    """Run `work(cfg, k) -> row` over ks with checkpoint/resume and workers."""
    todo = [k for k in ks if not checkpoint.done(k)]
    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for k, result in zip(todo, pool.map(work, [cfg] * len(todo), todo)):
                if isinstance(result, Exception):
                    failures.record(f"k={k!r}", result)
                else:
                    checkpoint.record(k, result)
    else:
        for k in todo:
            result = work(cfg, k)
            if isinstance(result, Exception):
                failures.record(f"k={k!r}", result)
            else:
                checkpoint.record(k, result)
    checkpoint.finalize()


# --- sweep-iterations --------------------------------------------------------
def _iterations_work(cfg: ExperimentConfig, k: float):
    try:
        t0 = time.perf_counter()
        mesh, A, M = _assembled(cfg, k)
        rhs = bem.plane_wave_rhs(mesh, cfg.formulation, bem.PlaneWave(k, cfg.theta),
                                 cfg.quad_order)
        _, trace = gmres_solve(A, rhs, SolveConfig(tol=cfg.gmres_tol), mass=M)
        wall = time.perf_counter() - t0
        if cfg.timings:
            return (k, mesh.n_nodes, trace.iterations, trace.converged, wall)
        return (k, mesh.n_nodes, trace.iterations, trace.converged)
    except HelmtrapError as exc:
        return exc


def run_sweep_iterations(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    schema = "iterations-timed" if cfg.timings else "iterations"
    ck = Checkpoint(os.path.join(cfg.output_dir, "iterations.csv"), schema)
    _run_per_k(cfg, cfg.wavenumbers(), _iterations_work, ck, failures)
    rows = [r.split(",") for r in ck.rows.values()]
    ks = np.array([float(r[0]) for r in rows])
    its = np.array([float(r[2]) for r in rows])
    good = its > 0
    if np.count_nonzero(good) >= 3:
        a, C = fit_exponent(ks[good], its[good])
        write_csv(os.path.join(cfg.output_dir, "iterations-fit.csv"),
                  "iterations-fit", [(a, C, int(np.count_nonzero(good)))])
    return failures.flush()


# --- spectrum ----------------------------------------------------------------
def _spectrum_work(cfg: ExperimentConfig, k: float, debug_identity=False):
    try:
        if debug_identity:
            n = 8
            B = np.eye(n, dtype=complex)
            mesh = None
        else:
            mesh, A, M = _assembled(cfg, k)
            B = _precond_matrix(A, M)
        summary = full_spectrum(B, _rectangle(cfg))
        return summary, (mesh.n_nodes if mesh is not None else B.shape[0])
    except HelmtrapError as exc:
        return exc, 0


def run_spectrum(cfg: ExperimentConfig, debug_identity=False) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    spec_rows, rot_rows, summary_rows = [], [], []
    for k in cfg.wavenumbers():
        summary, n = _spectrum_work(cfg, k, debug_identity)
        if isinstance(summary, Exception):
            failures.record(f"k={k!r}", summary)
            continue
        order = np.lexsort((summary.eigenvalues.imag, summary.eigenvalues.real))
        lam = summary.eigenvalues[order]
        kap = summary.kappas[order]
        sv = summary.singular_values
        for i in range(len(lam)):
            spec_rows.append((k, i, float(lam[i].real), float(lam[i].imag),
                              float(kap[i]), float(sv[i])))
            if cfg.formulation == "neumann-b":
                rot = (2.0 / 1j) * lam[i]
                rot_rows.append((k, i, float(rot.real), float(rot.imag),
                                 float(kap[i]), float(sv[i])))
        summary_rows.append((k, n, summary.norm2, summary.min_sv,
                             summary.min_abs_eig, summary.count_in_rectangle,
                             summary.l_quantity))
    write_csv(os.path.join(cfg.output_dir, "spectrum.csv"), "spectrum", spec_rows)
    write_csv(os.path.join(cfg.output_dir, "summary.csv"), "summary", summary_rows)
    if cfg.formulation == "neumann-b":
        write_csv(os.path.join(cfg.output_dir, "spectrum-rotated.csv"),
                  "spectrum", rot_rows)
    return failures.flush()


# --- flow --------------------------------------------------------------------
def run_flow(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    ks = cfg.wavenumbers()
    # one mesh, resolved for the top of the grid, so the matrix family is
    # consistent and eigenvalues can be matched step to step
    mesh = geometry.build_mesh(_curve(cfg), max(ks), cfg.ppw, cfg.mesh_margin)
    M = bem.assemble_mass(mesh).entries
    spectra = []
    for k in ks:
        try:
            A = bem.assemble_system(mesh, cfg.formulation, k, cfg.quad_order)
            spectra.append(eigenvalues_only(_precond_matrix(A, M)))
        except HelmtrapError as exc:
            failures.record(f"k={k!r}", exc)
            spectra.append(None)
    pairs = [(k, s) for k, s in zip(ks, spectra) if s is not None]
    if len(pairs) >= 2:
        paths, warn = track_eigenpaths([k for k, _ in pairs],
                                       [s for _, s in pairs])
        rows = []
        for pid, path in enumerate(paths):
            for k, lam in zip(path.ks, path.values):
                rows.append((pid, float(k), float(lam.real), float(lam.imag)))
        rows.sort(key=lambda r: (r[0], r[1]))
        write_csv(os.path.join(cfg.output_dir, "flow.csv"), "flow", rows)
        if warn:
            failures.warn("flow", "grid step too coarse for reliable path matching")
    return failures.flush()


# --- bound -------------------------------------------------------------------
def _bound_work(cfg: ExperimentConfig, k: float):
    try:
        mesh, A, M = _assembled(cfg, k)
        B = _precond_matrix(A, M)
        summary = full_spectrum(B, _rectangle(cfg))
        rhs = bem.plane_wave_rhs(mesh, cfg.formulation, bem.PlaneWave(k, cfg.theta),
                                 cfg.quad_order)
        _, trace = gmres_solve(A, rhs, SolveConfig(tol=cfg.gmres_tol), mass=M)
        inp = ClusterBoundInput(
            eigenvalues=summary.eigenvalues, norm2=summary.norm2,
            kappa_star=summary.max_kappa, n=mesh.n_nodes,
            half_plane=cfg.half_plane, l0=cfg.l0, l1=cfg.l1,
            region=_rectangle(cfg), target=cfg.epsilon or cfg.gmres_tol)
        try:
            res = compute_bound(inp)
        except BoundAssumptionError:
            return (k, summary.count_in_rectangle, float("nan"), float("nan"),
                    -1, trace.iterations, float("nan"), 1)
        at_actual = float(res.residual_bound(max(trace.iterations, res.ell)))
        # with verified assumptions the sufficient count must dominate
        flag = 0 if res.m_star >= trace.iterations else 2
        return (k, res.ell, res.delta, res.gamma_beta, res.m_star,
                trace.iterations, at_actual, flag)
    except HelmtrapError as exc:
        return exc


def run_bound(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    ck = Checkpoint(os.path.join(cfg.output_dir, "bound.csv"), "bound")
    _run_per_k(cfg, cfg.wavenumbers(), _bound_work, ck, failures)
    return failures.flush()


# --- quasimodes --------------------------------------------------------------
def run_quasimodes(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    try:
        ellipse = qm.EllipseSpec(cfg.a1, cfg.a2)
        modes = qm.list_quasimode_frequencies(
            cfg.mode_n, range(cfg.m_min, cfg.m_max + 1),
            cfg.mode_parity, cfg.mode_bc, ellipse)
        rows = [(m.parity, m.bc, m.m, m.n, m.alpha, m.q, m.k) for m in modes]
        write_csv(os.path.join(cfg.output_dir, "quasimodes.csv"), "quasimodes", rows)
    except HelmtrapError as exc:
        failures.record("quasimodes", exc)
    return failures.flush()


# --- weyl --------------------------------------------------------------------
def run_weyl(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    if cfg.geometry not in ("small-cavity", "large-cavity"):
        failures.record("weyl", HelmtrapError("weyl counting needs a cavity geometry"))
        return failures.flush()
    wcfg = weyl.cavity_weyl_config(cfg.geometry.split("-")[0])
    rect = _rectangle(cfg)
    rows = []
    for k in cfg.wavenumbers():
        try:
            mesh, A, M = _assembled(cfg, k)
            eigs = eigenvalues_only(_precond_matrix(A, M))
            measured = int(np.count_nonzero(rect.contains(eigs)))
            rows.append((cfg.geometry, k, weyl.predicted_window_count(k, wcfg),
                         measured))
        except HelmtrapError as exc:
            failures.record(f"k={k!r}", exc)
    write_csv(os.path.join(cfg.output_dir, "weyl.csv"), "weyl", rows)
    return failures.flush()


# --- field -------------------------------------------------------------------
def run_field(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    try:
        k = cfg.wavenumbers()[0]
        if cfg.formulation != "dirichlet-aprime":
            raise HelmtrapError("field evaluation implemented for the Dirichlet system")
        mesh, A, M = _assembled(cfg, k)
        wave = bem.PlaneWave(k, cfg.theta)
        rhs = bem.plane_wave_rhs(mesh, cfg.formulation, wave, cfg.quad_order)
        neumann = direct_solve(A, rhs)
        xs = np.linspace(cfg.grid_xmin, cfg.grid_xmax, cfg.grid_nx)
        ys = np.linspace(cfg.grid_ymin, cfg.grid_ymax, cfg.grid_ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        vals, _near = bem.evaluate_field(mesh, np.zeros(mesh.n_nodes), neumann,
                                         wave, pts, cfg.quad_order)
        rows = [(float(p[0]), float(p[1]), float(abs(v)))
                for p, v in zip(pts, vals)]
        write_csv(os.path.join(cfg.output_dir, "field.csv"), "field", rows)
    except HelmtrapError as exc:
        failures.record("field", exc)
    return failures.flush()


# --- galerkin-error ----------------------------------------------------------
def run_galerkin_error(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    wave_theta = cfg.theta
    rows = []
    for k in cfg.wavenumbers():
        try:
            base = geometry.build_mesh(_curve(cfg), k, cfg.ppw, cfg.mesh_margin)
            meshes = {1: base, 2: geometry.refine_mesh(base, 2),
                      3: geometry.refine_mesh(base, 3),
                      6: geometry.refine_mesh(base, 6)}
            sols = {}
            for fac, mesh in meshes.items():
                A = bem.assemble_system(mesh, cfg.formulation, k, cfg.quad_order)
                rhs = bem.plane_wave_rhs(mesh, cfg.formulation,
                                         bem.PlaneWave(k, wave_theta), cfg.quad_order)
                sols[fac] = direct_solve(A, rhs)
            ref_mesh = meshes[6]
            Mref = bem.assemble_mass(ref_mesh).entries
            uref = sols[6]
            ref_norm = np.sqrt(np.real(np.conj(uref) @ (Mref @ uref)))
            for fac in (1, 2, 3):
                interp = geometry.interpolate_p1(meshes[fac], ref_mesh, sols[fac])
                err = interp - uref
                rel = float(np.sqrt(np.real(np.conj(err) @ (Mref @ err))) / ref_norm)
                rows.append((k, fac, meshes[fac].n_nodes, rel))
        except HelmtrapError as exc:
            failures.record(f"k={k!r}", exc)
    write_csv(os.path.join(cfg.output_dir, "galerkin-error.csv"),
              "galerkin-error", rows)
    return failures.flush()


# --- gmres-error -------------------------------------------------------------
def _gmres_error_work(cfg: ExperimentConfig, k: float):
    try:
        mesh, A, M = _assembled(cfg, k)
        rhs = bem.plane_wave_rhs(mesh, cfg.formulation, bem.PlaneWave(k, cfg.theta),
                                 cfg.quad_order)
        x_it, trace = gmres_solve(A, rhs, SolveConfig(tol=cfg.gmres_tol), mass=M)
        x_lu = direct_solve(A, rhs)
        err = x_it - x_lu
        rel = float(np.sqrt(np.real(np.conj(err) @ (M @ err))
                            / np.real(np.conj(x_lu) @ (M @ x_lu))))
        return (k, mesh.n_nodes, trace.iterations, rel)
    except HelmtrapError as exc:
        return exc


def run_gmres_error(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    failures = _Failures(cfg.output_dir)
    ck = Checkpoint(os.path.join(cfg.output_dir, "gmres-error.csv"), "gmres-error")
    _run_per_k(cfg, cfg.wavenumbers(), _gmres_error_work, ck, failures)
    return failures.flush()


# --- entry point -------------------------------------------------------------
_COMMANDS = {
    "sweep-iterations": run_sweep_iterations,
    "spectrum": run_spectrum,
    "flow": run_flow,
    "bound": run_bound,
    "quasimodes": run_quasimodes,
    "weyl": run_weyl,
    "field": run_field,
    "galerkin-error": run_galerkin_error,
    "gmres-error": run_gmres_error,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="helmtrap",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
        if name == "spectrum":
            p.add_argument("--debug-identity", action="store_true",
                           help="replace the assembled matrix by the identity")
    args = parser.parse_args(argv)
    if args.config:
        cfg = load_config(args.config, args.set)
    else:
        cfg = parse_config_text("", args.set)
    if args.command == "spectrum":
        return run_spectrum(cfg, debug_identity=args.debug_identity)
    return _COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
