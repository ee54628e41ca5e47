"""Cluster-plus-outliers GMRES convergence bounds and their diagnostics.

Given a matrix whose spectrum splits into a half-plane cluster {Re z >= S}
and a few near-zero outliers in a bounded region N, the main bound states

    ||r_m|| / ||r_0||  <=  (prod_j 1/|lambda_j|) (||B||_2 + delta)^(l+1)
                           3^(l+1) delta^-1 gamma_beta^(m - l),

with delta = (L1 - L0) / (4 n kappa* N_eig),  cos beta = L0 / (||B||_2 + delta),
gamma_beta = 2 sin(beta / (4 - 2 beta / pi)) < 1, and l the number of
outliers.  The sufficient iteration count m* makes the right-hand side <= eps.

The module also provides the supporting pieces as standalone diagnostics: the
lens min-max quantity E_m(K_beta) (closed-form bound and an LP brute force),
the Bauer-Fike vertical-line search that certifies the pseudospectrum gap, a
sampled version of the resolvent contour bound the theory starts from, and
the eigenvector-weighted least-squares residual bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg as la
from scipy.optimize import linprog

from .errors import BoundAssumptionError, DomainError, ParameterError, SolveError
from .spectral import Rectangle

__all__ = [
    "ClusterBoundInput", "ClusterBoundResult", "compute_bound",
    "gamma_asymptotic", "gamma_from_beta", "em_lens_bound", "em_bruteforce",
    "lens_boundary", "bauer_fike_line", "campbell_contour_bound",
    "weighted_rhs_bound", "minmax_polynomial",
]


def gamma_from_beta(beta: float) -> float:
    """gamma_beta = 2 sin(beta / (4 - 2 beta / pi)) for beta in (0, pi/2)."""
    if not (0.0 < beta < 0.5 * np.pi):
        raise ParameterError(f"beta must lie in (0, pi/2), got {beta}")
    return 2.0 * math.sin(beta / (4.0 - 2.0 * beta / math.pi))


@dataclass(frozen=True)
class ClusterBoundInput:
    eigenvalues: np.ndarray
    norm2: float
    kappa_star: float
    n: int
    half_plane: float              # S: cluster lies in {Re z >= S}
    l0: float
    l1: float
    region: Rectangle              # N: the near-zero outlier region
    target: float = 1e-6           # eps

    def __post_init__(self):
        if not (0.0 < self.l0 < self.l1 <= self.half_plane):
            raise ParameterError("need 0 < L0 < L1 <= S")
        if self.kappa_star < 1.0:
            raise ParameterError("kappa_star must be >= 1")
        if not (0.0 < self.target <= 1.0):
            raise ParameterError("target eps must be in (0, 1]")


@dataclass(frozen=True)
class ClusterBoundResult:
    delta: float
    n_eig: int
    beta: float
    gamma_beta: float
    ell: int
    outliers: np.ndarray
    outlier_log_sum: float         # sum of log(1/|lambda_j|)
    norm2: float
    m_star: int
    target: float

    def log_residual_bound(self, m) -> np.ndarray:
        """Natural log of the bound at iteration(s) m >= ell."""
        m = np.asarray(m, dtype=float)
        R = self.norm2 + self.delta
        return (self.outlier_log_sum
                + (self.ell + 1) * (np.log(R) + np.log(3.0))
                - np.log(self.delta)
                + (m - self.ell) * np.log(self.gamma_beta))

    def residual_bound(self, m):
        """Bound on ||r_m||/||r_0|| (may overflow to inf for huge ell)."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_residual_bound(m))


def compute_bound(inp: ClusterBoundInput) -> ClusterBoundResult:
    """Evaluate the cluster-plus-outliers bound from measured spectral data."""
    eigs = np.asarray(inp.eigenvalues)
    in_region = inp.region.contains(eigs)
    in_half = eigs.real >= inp.half_plane
    stray = eigs[~(in_region | in_half)]
    if stray.size:
        raise BoundAssumptionError(
            f"{stray.size} eigenvalue(s) outside N and the half-plane",
            report={"stray_eigenvalues": stray},
        )
    if not np.any(in_half):
        raise BoundAssumptionError(
            "no eigenvalue in the half-plane: S > max Re(lambda)",
            report={"half_plane": inp.half_plane},
        )
    if inp.half_plane > inp.norm2 + 1e-12 * max(1.0, inp.norm2):
        raise BoundAssumptionError(
            "S exceeds ||B||_2, impossible for a spectrum meeting the half-plane",
            report={"half_plane": inp.half_plane, "norm2": inp.norm2},
        )
    outliers = eigs[in_region]
    if np.any(np.abs(outliers) == 0.0):
        raise DomainError("outlier eigenvalue exactly zero: bound degenerates")
    if outliers.size > 1:
        d = np.abs(outliers[:, None] - outliers[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() == 0.0:
            raise BoundAssumptionError(
                "repeated outlier eigenvalues violate the simple-eigenvalue assumption",
                report={"outliers": outliers},
            )
    ell = int(outliers.size)
    strip = (outliers.real > inp.l0) & (outliers.real < inp.l1)
    n_eig = int(np.count_nonzero(strip)) + 1
    delta = (inp.l1 - inp.l0) / (4.0 * inp.n * inp.kappa_star * n_eig)
    beta = math.acos(inp.l0 / (inp.norm2 + delta))
    gamma = gamma_from_beta(beta)
    log_sum = float(np.sum(np.log(1.0 / np.abs(outliers)))) if ell else 0.0
    R = inp.norm2 + delta
    rhs = ell + (log_sum + math.log(1.0 / inp.target) + math.log(1.0 / delta)
                 + (ell + 1) * (math.log(R) + math.log(3.0))) / math.log(1.0 / gamma)
    m_star = max(ell, int(math.ceil(rhs)))
    return ClusterBoundResult(
        delta=delta, n_eig=n_eig, beta=beta, gamma_beta=gamma, ell=ell,
        outliers=outliers, outlier_log_sum=log_sum, norm2=inp.norm2,
        m_star=m_star, target=inp.target,
    )


def gamma_asymptotic(norm2: float, l0: float, delta: float) -> float:
    """Large-norm asymptote (3 sqrt(3) / 4) ||B||_2 / L0 of 1/log(1/gamma_beta).

    Requires ||B||_2 >> delta and ||B||_2 >> L0 (ratios >= 10); callers compare
    the returned value with the exact (log gamma_beta^-1)^-1.
    """
    if norm2 < 10.0 * delta or norm2 < 10.0 * l0:
        raise DomainError(
            "asymptotic regime not reached: need norm2 >= 10*delta and >= 10*L0"
        )
    return 0.75 * math.sqrt(3.0) * norm2 / l0


def em_lens_bound(m: int, beta: float) -> float:
    """Closed-form bound on E_m of the lens K_beta = {|z|<=1, Re z >= cos beta}."""
    if m < 0:
        raise ParameterError("m must be >= 0")
    g = gamma_from_beta(beta)
    return min(2.0 + g, 2.0 / (1.0 - g ** (m + 1))) * g ** m


def lens_boundary(beta: float, n_samples: int = 256) -> np.ndarray:
    """Boundary samples of K_beta: circular arc |phi| <= beta plus the chord."""
    if n_samples < 8:
        raise ParameterError("need at least 8 boundary samples")
    arc_len = 2.0 * beta
    chord_len = 2.0 * math.sin(beta)
    n_arc = max(4, int(round(n_samples * arc_len / (arc_len + chord_len))))
    n_chord = max(4, n_samples - n_arc)
    phi = np.linspace(-beta, beta, n_arc)
    arc = np.exp(1j * phi)
    y = np.linspace(-math.sin(beta), math.sin(beta), n_chord)
    chord = math.cos(beta) + 1j * y
    return np.concatenate([arc, chord[::-1]])


def _scaled_basis(samples: np.ndarray, degree: int):
    """Monomials in (z - c)/rho on the bounding disk of samples + {0}.

    On a complex disk these stay bounded by one (Chebyshev polynomials only
    enjoy that on a real interval and explode off-axis), which keeps the LP
    constraint entries O(max weight) up to degree ~40.  Returns values at the
    samples (n_s, degree+1) and at z = 0 (degree+1,).
    """
    pts = np.concatenate([samples, [0.0 + 0.0j]])
    center = 0.5 * (pts.real.min() + pts.real.max()) + 0.5j * (pts.imag.min() + pts.imag.max())
    rho = max(np.abs(pts - center).max(), 1e-30)
    zh = (samples - center) / rho
    z0 = (0.0 - center) / rho
    vals = np.empty((len(samples), degree + 1), dtype=complex)
    at0 = np.empty(degree + 1, dtype=complex)
    vals[:, 0], at0[0] = 1.0, 1.0
    for j in range(1, degree + 1):
        vals[:, j] = zh * vals[:, j - 1]
        at0[j] = z0 * at0[j - 1]
    return vals, at0


def _minmax_lp(samples: np.ndarray, m: int, weights, n_angles: int):
    """Solve the min-max LP; returns (value, per-sample polynomial values).

    The modulus constraints are linearised over ``n_angles`` rotations (an
    inscribed polygon of the disk, so the LP slightly under-estimates the
    true max-modulus); the polynomial is expressed in monomials scaled to the
    samples' bounding disk to keep the LP well conditioned up to degree ~40.
    The returned per-sample values come from re-evaluating the solver's
    coefficient vector, normalised so that p(0) = 1 holds exactly.
    """
    vals, at0 = _scaled_basis(samples, m)
    nc = m + 1
    w = np.ones(len(samples)) if weights is None else np.asarray(weights, dtype=float)
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    rot = np.exp(1j * thetas)
    P = vals * w[:, None]                                  # (n_s, nc)
    A_rows = np.einsum("l,ic->lic", rot, P).reshape(-1, nc)
    A_ub = np.concatenate([A_rows.real, -A_rows.imag,
                           -np.ones((A_rows.shape[0], 1))], axis=1)
    b_ub = np.zeros(A_rows.shape[0])
    A_eq = np.zeros((2, 2 * nc + 1))
    A_eq[0, :nc], A_eq[0, nc:2 * nc] = at0.real, -at0.imag
    A_eq[1, :nc], A_eq[1, nc:2 * nc] = at0.imag, at0.real
    b_eq = np.array([1.0, 0.0])
    c = np.zeros(2 * nc + 1)
    c[-1] = 1.0
    bounds = [(None, None)] * (2 * nc) + [(0.0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if not res.success:
        raise SolveError(f"min-max LP failed: {res.message}")
    coeff = res.x[:nc] + 1j * res.x[nc:2 * nc]
    pvals = vals @ coeff
    p0 = at0 @ coeff
    if p0 != 0:
        pvals = pvals / p0                                  # enforce p(0) = 1
    return float(res.fun), pvals


def minmax_polynomial(samples: np.ndarray, m: int,
                      weights: Optional[np.ndarray] = None,
                      n_angles: int = 32) -> float:
    """min over p in P_m with p(0)=1 of max_i w_i |p(z_i)|, as a linear program."""
    samples = np.asarray(samples, dtype=complex)
    if m < 0:
        raise ParameterError("m must be >= 0")
    if weights is not None and np.any(np.asarray(weights) < 0):
        raise ParameterError("weights must be nonnegative")
    value, _ = _minmax_lp(samples, m, weights, n_angles)
    return value


_LP_RESOLVABLE = 1e-6    # LP optima below this are dominated by solver tolerance


def _lawson_refine(samples: np.ndarray, deg: int, iters: int = 200) -> np.ndarray:
    """Near-minimax polynomial values by Lawson-weighted least squares.

    Writes p = 1 + sum_j c_j (psi_j(z) - psi_j(0)) so p(0) = 1 holds by
    construction, then iterates weighted least squares with Lawson's weight
    update w <- w |p|; backward-stable at any value scale, unlike the LP
    whose absolute tolerance floors around 1e-8.  Returns the per-sample
    values of the best iterate.
    """
    vals, at0 = _scaled_basis(samples, deg)
    psi = vals[:, 1:] - at0[None, 1:]
    w = np.ones(len(samples))
    best = np.ones(len(samples), dtype=complex)
    best_max = 1.0
    for _ in range(iters):
        sw = np.sqrt(w / w.sum())
        coef, *_ = la.lstsq(sw[:, None] * psi, -sw, lapack_driver="gelsd",
                            check_finite=False)
        pv = 1.0 + psi @ coef
        cur = np.abs(pv)
        cur_max = float(cur.max())
        if cur_max < best_max:
            best, best_max = pv, cur_max
        w = w * np.maximum(cur, 1e-280)
        w /= w.max()
    return best


def em_bruteforce(m: int, samples: np.ndarray, n_angles: int = 32) -> float:
    """Brute-force min-max |p| with p(0)=1 on boundary samples of a set.

    Solved as a linear program while the optimum stays above the solver's
    floating-point resolution; below that (the lens optimum decays
    geometrically and leaves the LP's absolute tolerance around 1e-8) the
    minimiser refines candidates by Lawson-weighted least squares and also
    considers products of two half-degree solutions, both explicit feasible
    polynomials whose per-sample values are evaluated directly.  The result
    is always the exactly evaluated maximum of a feasible candidate, so it
    upper-bounds the true minimum at every degree.
    """
    samples = np.asarray(samples, dtype=complex)
    if len(samples) < 200 and m > 0:
        raise ParameterError("use at least 200 boundary samples")
    if m < 0:
        raise ParameterError("m must be >= 0")

    memo = {}

    def candidate(deg: int) -> np.ndarray:
        if deg in memo:
            return memo[deg]
        value, pvals = _minmax_lp(samples, deg, None, n_angles)
        if value < _LP_RESOLVABLE and deg >= 1:
            refined = _lawson_refine(samples, deg)
            if np.max(np.abs(refined)) < np.max(np.abs(pvals)):
                pvals = refined
            if deg >= 2:
                a = deg // 2
                split = candidate(a) * candidate(deg - a)
                if np.max(np.abs(split)) < np.max(np.abs(pvals)):
                    pvals = split
        memo[deg] = pvals
        return pvals

    return float(np.max(np.abs(candidate(m))))


def bauer_fike_line(eigs: Sequence[complex], kappas: Sequence[float],
                    delta: float, n: int, l0: float, l1: float):
    """Search (L0, L1) for a vertical line missing all Bauer-Fike disks.

    Disks are lambda_j + B(0, delta * n * kappa_j).  Returns (L, certified);
    certified=False when every abscissa in (L0, L1) is covered.  Success is
    guaranteed when 2 delta n kappa* N_eig < L1 - L0.
    """
    eigs = np.asarray(eigs)
    kappas = np.asarray(kappas, dtype=float)
    if delta < 0:
        raise ParameterError("delta must be >= 0")
    radii = delta * n * kappas
    lo = eigs.real - radii
    hi = eigs.real + radii
    keep = (hi > l0) & (lo < l1)
    intervals = sorted(zip(lo[keep], hi[keep]))
    gaps = []
    cursor = l0
    for a, b in intervals:
        if a > cursor:
            gaps.append((cursor, min(a, l1)))
        cursor = max(cursor, b)
        if cursor >= l1:
            break
    if cursor < l1:
        gaps.append((cursor, l1))
    gaps = [(a, b) for a, b in gaps if b > a]
    if not gaps:
        return 0.5 * (l0 + l1), False
    a, b = max(gaps, key=lambda g: g[1] - g[0])
    return 0.5 * (a + b), True


def campbell_contour_bound(B: np.ndarray, outliers: Sequence[complex],
                           contour: Sequence[complex], m: int,
                           n_angles: int = 32) -> float:
    """Sampled resolvent contour bound (a diagnostic, not certified).

        |contour|/(2 pi) * min_p max_i [ prod_j |lambda_j - z_i|/|lambda_j|
                                         * ||(z_i I - B)^-1||_2 * |p(z_i)| ]

    with p of degree m - r, p(0) = 1, r the number of outliers.  The contour
    samples are an ordered closed polyline; its length approximates |Gamma~|.
    """
    B = np.asarray(B)
    outliers = np.asarray(outliers, dtype=complex)
    contour = np.asarray(contour, dtype=complex)
    r = len(outliers)
    if m < r:
        raise ParameterError(f"need m >= number of outliers ({r})")
    n = B.shape[0]
    length = float(np.sum(np.abs(np.diff(np.concatenate([contour, contour[:1]])))))
    weights = np.empty(len(contour))
    for i, z in enumerate(contour):
        sv = la.svdvals(z * np.eye(n) - B)
        smin = sv[-1]
        if smin == 0.0:
            raise DomainError(f"contour sample {z} hits an eigenvalue (resolvent blow-up)")
        w = 1.0 / smin
        if r:
            w *= float(np.prod(np.abs(outliers - z) / np.abs(outliers)))
        weights[i] = w
    val = minmax_polynomial(contour, m - r, weights=weights, n_angles=n_angles)
    return length / (2.0 * np.pi) * val


def weighted_rhs_bound(V: np.ndarray, eigs: Sequence[complex],
                       b: np.ndarray, m: int) -> float:
    """||V||_2 * min_{p(0)=1} ( sum_j |beta'_j|^2 |p(lambda_j)|^2 )^(1/2).

    beta' = V^-1 b / ||b||_2; the constrained minimisation is an affine
    least-squares problem in the polynomial coefficients (solved exactly).
    """
    V = np.asarray(V)
    eigs = np.asarray(eigs, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if m < 0:
        raise ParameterError("m must be >= 0")
    try:
        beta = la.solve(V, b)
    except la.LinAlgError as exc:
        raise SolveError("eigenvector matrix is singular") from exc
    if not np.all(np.isfinite(beta)):
        raise SolveError("eigenvector matrix is singular")
    beta = beta / np.linalg.norm(b)
    normV = la.norm(V, 2)
    if m == 0:
        return float(normV * np.linalg.norm(beta))
    vals, at0 = _scaled_basis(eigs, m)
    # p = 1 + sum_q c_q (psi_q(z) - psi_q(0)): automatically p(0) = 1
    psi = vals[:, 1:] - at0[None, 1:]
    W = beta[:, None]
    sol, *_ = la.lstsq(W * psi, -beta)
    resid = beta + (W * psi) @ sol
    return float(normV * np.linalg.norm(resid))
