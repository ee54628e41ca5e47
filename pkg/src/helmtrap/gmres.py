"""Dense reference GMRES (no restart) with mass preconditioning, plus LU baseline.

The solver runs on the left-preconditioned system M^-1 A x = M^-1 b with
x0 = 0 and minimises the preconditioned residual 2-norm over the Krylov space;
the trace records every Arnoldi-recurred residual norm r_0 .. r_m.  Modified
Gram-Schmidt is used, optionally with a second orthogonalisation pass for
ill-conditioned studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg as la

from .bem import OperatorMatrix, assemble_mass
from .errors import ParameterError, SolveError

__all__ = ["SolveConfig", "GmresTrace", "gmres_solve", "direct_solve", "export_trace"]


@dataclass(frozen=True)
class SolveConfig:
    """GMRES controls: relative tolerance, iteration cap, preconditioner."""

    tol: float = 1e-6
    max_iterations: Optional[int] = None      # defaults to n
    preconditioner: str = "mass"              # "mass" | "none"
    reorthogonalize: bool = False

    def __post_init__(self):
        if not (0.0 < self.tol <= 1.0):
            raise ParameterError(f"tolerance must be in (0,1], got {self.tol}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.preconditioner not in ("mass", "none"):
            raise ParameterError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass(frozen=True)
class GmresTrace:
    """Preconditioned residual norms r_0..r_m and convergence metadata."""

    residual_norms: np.ndarray
    converged: bool
    iterations: int

    @property
    def relative_residuals(self) -> np.ndarray:
        r0 = self.residual_norms[0]
        return self.residual_norms / (r0 if r0 != 0 else 1.0)


def _as_matrix(A: Union[OperatorMatrix, np.ndarray]) -> np.ndarray:
    return A.entries if isinstance(A, OperatorMatrix) else np.asarray(A)


def _mass_apply(A, mass):
    """Return a callable v -> M^-1 v (Cholesky-backed) or identity."""
    if mass is None and isinstance(A, OperatorMatrix):
        mass = assemble_mass(A.mesh)
    if mass is None:
        raise ParameterError("mass preconditioning requested but no mass matrix")
    M = _as_matrix(mass)
    cho = la.cho_factor(M.real)

    def apply(v):
        if np.iscomplexobj(v):
            return la.cho_solve(cho, v.real) + 1j * la.cho_solve(cho, v.imag)
        return la.cho_solve(cho, v)

    return apply


def gmres_solve(A: Union[OperatorMatrix, np.ndarray], b: np.ndarray,
                config: SolveConfig = SolveConfig(), mass=None):
    """Full-memory GMRES on M^-1 A x = M^-1 b from x0 = 0.

    Returns (x, GmresTrace).  Happy breakdown counts as convergence; hitting
    the iteration cap returns converged=False with the full trace.
    """
    Amat = _as_matrix(A)
    n = Amat.shape[0]
    b = np.asarray(b, dtype=complex)
    if Amat.shape != (n, n) or b.shape != (n,):
        raise ParameterError("shape mismatch between matrix and right-hand side")
    if config.preconditioner == "mass":
        precond = _mass_apply(A, mass)
    else:
        precond = lambda v: v
    maxit = min(n, config.max_iterations or n)

    r0 = precond(b)
    beta = np.linalg.norm(r0)
    if beta == 0.0:
        return np.zeros(n, dtype=complex), GmresTrace(np.array([0.0]), True, 0)
    if config.tol >= 1.0:                 # x0 = 0 already meets the target
        return np.zeros(n, dtype=complex), GmresTrace(np.array([beta]), True, 0)

    cap = min(maxit, 128)
    V = np.empty((cap + 1, n), dtype=complex)
    Hh = np.zeros((cap + 1, cap), dtype=complex)
    cs = np.zeros(maxit, dtype=complex)
    sn = np.zeros(maxit, dtype=complex)
    g = np.zeros(maxit + 1, dtype=complex)
    g[0] = beta
    V[0] = r0 / beta
    residuals = [beta]
    converged = False
    m = 0
    for j in range(maxit):
        if j >= cap:                      # grow the Krylov storage on demand
            new_cap = min(maxit, 2 * cap)
            V2 = np.empty((new_cap + 1, n), dtype=complex)
            V2[:cap + 1] = V
            H2 = np.zeros((new_cap + 1, new_cap), dtype=complex)
            H2[:cap + 1, :cap] = Hh
            V, Hh, cap = V2, H2, new_cap
        w = precond(Amat @ V[j])
        for i in range(j + 1):
            Hh[i, j] = np.vdot(V[i], w)
            w -= Hh[i, j] * V[i]
        if config.reorthogonalize:
            for i in range(j + 1):
                c = np.vdot(V[i], w)
                Hh[i, j] += c
                w -= c * V[i]
        hnext = np.linalg.norm(w)
        Hh[j + 1, j] = hnext
        # apply accumulated Givens rotations to the new column
        for i in range(j):
            t = cs[i] * Hh[i, j] + sn[i] * Hh[i + 1, j]
            Hh[i + 1, j] = -np.conj(sn[i]) * Hh[i, j] + cs[i] * Hh[i + 1, j]
            Hh[i, j] = t
        denom = np.hypot(abs(Hh[j, j]), hnext)
        if denom == 0.0:
            residuals.append(abs(g[j + 1]))
            m = j + 1
            converged = True          # exact breakdown: solution reached
            break
        cs[j] = abs(Hh[j, j]) / denom
        ph = Hh[j, j] / abs(Hh[j, j]) if Hh[j, j] != 0 else 1.0
        sn[j] = ph * hnext / denom
        Hh[j, j] = ph * denom
        Hh[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        residuals.append(abs(g[j + 1]))
        m = j + 1
        if hnext != 0.0:
            V[j + 1] = w / hnext
        if residuals[-1] <= config.tol * beta:
            converged = True
            break
        if hnext == 0.0:              # happy breakdown without tolerance hit
            converged = True
            break
    y = la.solve_triangular(Hh[:m, :m], g[:m], lower=False)
    x = V[:m].T @ y
    return x, GmresTrace(np.asarray(residuals), converged, m)


def direct_solve(A: Union[OperatorMatrix, np.ndarray], b: np.ndarray) -> np.ndarray:
    """LU baseline solve; raises SolveError on a numerically singular factor."""
    Amat = _as_matrix(A)
    b = np.asarray(b, dtype=complex)
    lu, piv = la.lu_factor(Amat)
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(diag)) or diag.min() <= np.finfo(float).eps * diag.max() * len(b):
        raise SolveError("matrix is singular to machine precision")
    return la.lu_solve((lu, piv), b)


def export_trace(trace: GmresTrace, path) -> None:
    """CSV with columns (iteration, residual_norm, relative_residual)."""
    rel = trace.relative_residuals
    with open(path, "w") as fh:
        fh.write("# schema=gmres-trace v1\n")
        fh.write("iteration,residual_norm,relative_residual\n")
        for i, (rn, rr) in enumerate(zip(trace.residual_norms, rel)):
            fh.write(f"{i},{float(rn)!r},{float(rr)!r}\n")
