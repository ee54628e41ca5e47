"""Dense spectral diagnostics for the preconditioned Galerkin matrices.

Eigenvalues with left/right eigenvector condition numbers, singular values,
counts of near-zero eigenvalues in a rectangle, the outlier log-sum, matched
eigenvalue paths over a wavenumber grid, and power-law exponent fits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la
from scipy.optimize import least_squares, linear_sum_assignment

from .errors import DomainError, ParameterError, SpectralError

__all__ = [
    "Rectangle", "DEFAULT_RECTANGLE", "SpectralSummary", "EigenPath",
    "full_spectrum", "eigenvalues_only", "singular_values_only",
    "count_in_rectangle", "l_quantity", "track_eigenpaths", "fit_exponent",
]


@dataclass(frozen=True)
class Rectangle:
    """Closed axis-aligned rectangle in the complex plane.

    The first interval is the real part by default; use ``swapped`` for the
    other orientation of a printed product of intervals.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ParameterError("rectangle intervals must be non-degenerate")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z)
        return ((z.real >= self.re_min) & (z.real <= self.re_max)
                & (z.imag >= self.im_min) & (z.imag <= self.im_max))

    def swapped(self) -> "Rectangle":
        return Rectangle(self.im_min, self.im_max, self.re_min, self.re_max)


#: near-zero window used throughout the experiments
DEFAULT_RECTANGLE = Rectangle(-0.1, 0.1, -0.6, 0.6)


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    kappas: np.ndarray               # eigenvalue condition numbers, >= 1
    singular_values: np.ndarray      # descending
    rectangle: Rectangle
    count_in_rectangle: int
    l_quantity: float

    @property
    def norm2(self) -> float:
        return float(self.singular_values[0])

    @property
    def min_sv(self) -> float:
        return float(self.singular_values[-1])

    @property
    def min_abs_eig(self) -> float:
        return float(np.min(np.abs(self.eigenvalues)))

    @property
    def max_kappa(self) -> float:
        return float(np.max(self.kappas))


def _fingerprint(B: np.ndarray) -> str:
    return (f"shape={B.shape} fro={la.norm(B):.6e} "
            f"trace={np.trace(B):.6e}")


def full_spectrum(B: np.ndarray, rectangle: Rectangle = DEFAULT_RECTANGLE) -> SpectralSummary:
    """Eigen/singular decomposition with per-eigenvalue condition numbers.

    kappa(lambda_j) = ||u_j|| ||v_j|| / |v_j^H u_j| from matched right/left
    eigenvectors (LAPACK returns them in a common eigenvalue order).
    """
    B = np.ascontiguousarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ParameterError("full_spectrum needs a square matrix")
    if not np.all(np.isfinite(B)):
        raise ParameterError("matrix has non-finite entries")
    try:
        w, vl, vr = la.eig(B, left=True, right=True)
        sv = la.svdvals(B)
    except la.LinAlgError as exc:
        raise SpectralError(f"dense decomposition failed: {exc}",
                            fingerprint=_fingerprint(B)) from exc
    overlap = np.abs(np.einsum("ij,ij->j", np.conj(vl), vr))
    norms = np.linalg.norm(vr, axis=0) * np.linalg.norm(vl, axis=0)
    kappas = np.where(overlap > 0, norms / np.maximum(overlap, 1e-300), np.inf)
    kappas = np.maximum(kappas, 1.0)          # clip rounding below the floor
    count, members = count_in_rectangle(w, rectangle)
    lq = l_quantity(w, rectangle) if count else 0.0
    return SpectralSummary(
        eigenvalues=w, kappas=kappas, singular_values=np.sort(sv)[::-1],
        rectangle=rectangle, count_in_rectangle=count, l_quantity=lq,
    )


def eigenvalues_only(B: np.ndarray) -> np.ndarray:
    """Eigenvalues without eigenvectors (cheaper path for sweeps)."""
    try:
        return la.eigvals(B)
    except la.LinAlgError as exc:
        raise SpectralError(f"eigvals failed: {exc}", fingerprint=_fingerprint(B)) from exc


def singular_values_only(B: np.ndarray) -> np.ndarray:
    """Singular values, descending."""
    try:
        return np.sort(la.svdvals(B))[::-1]
    except la.LinAlgError as exc:
        raise SpectralError(f"svdvals failed: {exc}", fingerprint=_fingerprint(B)) from exc


def count_in_rectangle(eigs: Sequence[complex], rect: Rectangle):
    """Count of eigenvalues in the closed rectangle plus the member list."""
    eigs = np.asarray(eigs)
    if eigs.size == 0:
        return 0, np.array([], dtype=complex)
    inside = rect.contains(eigs)
    return int(np.count_nonzero(inside)), eigs[inside]


def l_quantity(eigs: Sequence[complex], rect: Rectangle) -> float:
    """Sum of log(1/|lambda|) over the eigenvalues inside the rectangle."""
    _, members = count_in_rectangle(eigs, rect)
    a = np.abs(members)
    if np.any(a == 0.0):
        raise DomainError("zero eigenvalue inside the rectangle: L is infinite")
    return float(np.sum(np.log(1.0 / a)))


@dataclass(frozen=True)
class EigenPath:
    """One matched eigenvalue trajectory over a uniform wavenumber grid."""

    ks: np.ndarray
    values: np.ndarray

    @property
    def speeds(self) -> np.ndarray:
        dk = np.diff(self.ks)
        return np.abs(np.diff(self.values)) / dk


def track_eigenpaths(ks: Sequence[float], spectra: Sequence[np.ndarray]):
    """Match spectra step-to-step by minimum-total-distance assignment.

    Returns (paths, coarse_grid_warning).  All spectra must have equal length;
    the grid must be uniform.  The warning flags grids where the median
    per-step displacement exceeds 10x the median eigenvalue spacing.
    """
    ks = np.asarray(ks, dtype=float)
    if len(ks) != len(spectra) or len(ks) < 2:
        raise ParameterError("need matching k grid and at least two spectra")
    dks = np.diff(ks)
    if not np.allclose(dks, dks[0], rtol=1e-8, atol=1e-12):
        raise ParameterError("k grid must be uniform")
    n = len(spectra[0])
    if any(len(s) != n for s in spectra):
        raise ParameterError("all spectra must have the same size")
    order = [np.asarray(spectra[0])]
    for s in spectra[1:]:
        prev = order[-1]
        s = np.asarray(s)
        cost = np.abs(prev[:, None] - s[None, :])
        _, cols = linear_sum_assignment(cost)
        order.append(s[cols])
    values = np.stack(order, axis=0)           # (n_steps, n)
    disp = np.abs(np.diff(values, axis=0))
    spacing = []
    for s in order:
        d = np.abs(s[:, None] - s[None, :])
        np.fill_diagonal(d, np.inf)
        spacing.append(np.median(d.min(axis=1)))
    warning = bool(np.median(disp) > 10.0 * np.median(spacing))
    paths = [EigenPath(ks, values[:, j]) for j in range(n)]
    return paths, warning


def fit_exponent(ks: Sequence[float], values: Sequence[float]):
    """Levenberg-Marquardt fit of values ~ C * k^a; returns (a, C).

    Initial guess from the log-log linear fit, then LM on the residuals in
    value space (the gnuplot-style nonlinear refinement).
    """
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    if ks.size < 3:
        raise DomainError("need at least 3 samples for an exponent fit")
    if np.any(ks <= 0) or np.any(values <= 0):
        raise DomainError("exponent fit needs positive data")
    a0, logc0 = np.polyfit(np.log(ks), np.log(values), 1)

    def resid(p):
        a, logc = p
        return np.exp(logc) * ks ** a - values

    sol = least_squares(resid, x0=[a0, logc0], method="lm", xtol=1e-14, ftol=1e-14)
    a, logc = sol.x
    return float(a), float(np.exp(logc))
