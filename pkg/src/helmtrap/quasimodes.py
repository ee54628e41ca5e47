"""Ellipse eigenfrequencies via the two-parameter Mathieu eigenproblem.

Separating the Laplace eigenproblem on the ellipse with semi-axes a1 > a2 in
elliptic coordinates (x1, x2) = a (cosh mu cos nu, sinh mu sin nu),
a = sqrt(a1^2 - a2^2), gives

    N'' + (alpha - 2 q cos 2 nu) N = 0        (angular, periodic)
    M'' - (alpha - 2 q cosh 2 mu) M = 0       (radial)

with q = (k a / 2)^2.  A mode is fixed by the angular zero count n in
[0, pi), the radial zero count m in (0, mu0), the parity of N, and the
Dirichlet (M(mu0) = 0) or Neumann (M'(mu0) = 0) condition.  The angular
problem is solved by the Fourier-coefficient tridiagonal eigenproblem (no
shooting: the index n is exact); the radial problem by high-order adaptive
integration with zero counting, scanned and bracketed in q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from .errors import ParameterError, SearchError, SolveError

__all__ = [
    "EllipseSpec", "MathieuMode", "angular_characteristic", "radial_shoot",
    "find_mode", "list_quasimode_frequencies", "export_modes",
]


@dataclass(frozen=True)
class EllipseSpec:
    a1: float
    a2: float

    def __post_init__(self):
        if not (self.a1 > self.a2 > 0):
            raise ParameterError("ellipse needs a1 > a2 > 0")

    @property
    def linear_eccentricity(self) -> float:
        return math.sqrt(self.a1 ** 2 - self.a2 ** 2)

    @property
    def mu0(self) -> float:
        return math.acosh(self.a1 / self.linear_eccentricity)

    @property
    def eccentricity(self) -> float:
        return math.sqrt(1.0 - (self.a2 / self.a1) ** 2)

    def k_of_q(self, q: float) -> float:
        return 2.0 * math.sqrt(q) / self.linear_eccentricity

    def q_of_k(self, k: float) -> float:
        return (k * self.linear_eccentricity / 2.0) ** 2


@dataclass(frozen=True)
class MathieuMode:
    parity: str          # "even" | "odd"
    m: int               # radial zeros in (0, mu0)
    n: int               # angular zeros in [0, pi)
    bc: str              # "dirichlet" | "neumann"
    alpha: float
    q: float
    k: float


def _check_parity_n(parity: str, n: int) -> None:
    if parity not in ("even", "odd"):
        raise ParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    if parity == "even" and n < 0:
        raise ParameterError("even modes need n >= 0")
    if parity == "odd" and n < 1:
        raise ParameterError("odd modes need n >= 1")


def angular_characteristic(n: int, parity: str, q: float,
                           tol: float = 1e-12) -> float:
    """Mathieu characteristic value a_n(q) (even) / b_n(q) (odd).

    Computed from the symmetrised tridiagonal Fourier recurrence, growing the
    truncation until the target eigenvalue moves by less than ``tol``.
    """
    _check_parity_n(parity, n)
    if q <= 0:
        raise ParameterError("q must be positive")

    def value(N: int) -> float:
        if parity == "even":
            if n % 2 == 0:
                d = np.concatenate([[0.0], (2.0 * np.arange(1, N)) ** 2])
                e = np.concatenate([[math.sqrt(2.0) * q], np.full(N - 2, q)])
                idx = n // 2
            else:
                d = np.concatenate([[1.0 + q], (2.0 * np.arange(1, N) + 1.0) ** 2])
                e = np.full(N - 1, q)
                idx = (n - 1) // 2
        else:
            if n % 2 == 0:
                d = (2.0 * np.arange(1, N + 1)) ** 2
                e = np.full(N - 1, q)
                idx = n // 2 - 1
            else:
                d = np.concatenate([[1.0 - q], (2.0 * np.arange(1, N) + 1.0) ** 2])
                e = np.full(N - 1, q)
                idx = (n - 1) // 2
        return float(eigh_tridiagonal(d, e, select="i",
                                      select_range=(idx, idx))[0][0])

    # truncation error decays superexponentially once N clears n/2 + O(sqrt(q));
    # the comparison floor accounts for the eigensolver's eps*||T|| noise
    N = max(48, n + 24 + int(1.5 * math.sqrt(q)))
    prev = value(N)
    cur = prev
    for _ in range(8):
        N += max(16, N // 2)
        cur = value(N)
        floor = 32.0 * np.finfo(float).eps * (4.0 * N * N + 2.0 * q)
        if abs(cur - prev) <= max(tol * max(1.0, abs(cur)), floor):
            return cur
        prev = cur
    raise SolveError(
        f"angular characteristic did not converge: last two iterates {prev}, {cur}"
    )


def radial_shoot(alpha: float, q: float, parity: str, bc: str, mu0: float,
                 rtol: float = 1e-12):
    """Integrate the radial equation on [0, mu0]; boundary residual and zeros.

    Even modes start from M(0)=1, M'(0)=0, odd modes from M(0)=0, M'(0)=1.
    Returns (residual, zero_count) with residual = M(mu0) for Dirichlet or
    M'(mu0) for Neumann, and zero_count the number of sign changes in
    (0, mu0).
    """
    if mu0 <= 0:
        raise ParameterError("mu0 must be positive")
    if bc not in ("dirichlet", "neumann"):
        raise ParameterError(f"bc must be 'dirichlet' or 'neumann', got {bc!r}")
    y0 = [0.0, 1.0] if parity == "odd" else [1.0, 0.0]

    def rhs(mu, y):
        return [y[1], (alpha - 2.0 * q * math.cosh(2.0 * mu)) * y[0]]

    def crossing(mu, y):
        return y[0]
    crossing.direction = 0

    sol = solve_ivp(rhs, (0.0, mu0), y0, method="DOP853",
                    rtol=rtol, atol=1e-14, events=crossing)
    if not sol.success:
        raise SolveError(f"radial integration failed: {sol.message}")
    zeros = [z for z in sol.t_events[0] if 1e-13 < z < mu0 * (1.0 - 1e-13)]
    residual = sol.y[0, -1] if bc == "dirichlet" else sol.y[1, -1]
    return float(residual), len(zeros)


def _radial_rk4(alpha: float, q: float, parity: str, mu0: float):
    """Independent fixed-step RK4 integration used as the mode certificate."""
    kappa = math.sqrt(max(abs(alpha - 2.0 * q), abs(alpha - 2.0 * q * math.cosh(2.0 * mu0)), 1.0))
    steps = int(200.0 * kappa * mu0) + 2000
    h = mu0 / steps
    y = np.array([0.0, 1.0]) if parity == "odd" else np.array([1.0, 0.0])

    def f(mu, y):
        return np.array([y[1], (alpha - 2.0 * q * math.cosh(2.0 * mu)) * y[0]])

    mu = 0.0
    for _ in range(steps):
        k1 = f(mu, y)
        k2 = f(mu + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(mu + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(mu + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        mu += h
    return y[0], y[1]


def _scan_modes(n: int, parity: str, bc: str, ellipse: EllipseSpec,
                k_max: float, dk: float = 0.25) -> Iterator[MathieuMode]:
    """Walk k upward, yielding modes in increasing m as residual roots.

    Dirichlet roots coincide with the radial zero count jumping m -> m+1
    (zeros enter through mu0 as q grows and the count is monotone), so every
    bracket is certified by a count change; Neumann roots are residual sign
    changes, labelled by the count evaluated just below the root.
    """
    mu0 = ellipse.mu0

    def eval_at(k: float):
        q = ellipse.q_of_k(k)
        alpha = angular_characteristic(n, parity, q)
        res, count = radial_shoot(alpha, q, parity, bc, mu0)
        return q, alpha, res, count

    def polish(a, b, fa, fb):
        # bracketed secant with bisection fallback
        for _ in range(200):
            s = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
            if not (min(a, b) < s < max(a, b)):
                s = 0.5 * (a + b)
            q, alpha, fs, count = eval_at(s)
            if abs(fs) < 1e-11 or abs(b - a) < 1e-14 * max(1.0, abs(b)):
                return s, q, alpha, fs
            if (fs < 0) == (fa < 0):
                a, fa = s, fs
            else:
                b, fb = s, fs
        return s, q, alpha, fs

    def resolve(k1, s1, k2, s2, depth=0):
        """Yield all roots in (k1, k2); s = (q, alpha, res, count) at ends."""
        jump = s2[3] - s1[3]
        crossed = (s1[2] < 0) != (s2[2] < 0)
        if jump == 0 and not crossed:
            return
        if (jump > 1 or (jump == 1 and bc == "neumann" and crossed)
                or (jump >= 1 and bc == "dirichlet" and not crossed)) and depth < 48:
            km = 0.5 * (k1 + k2)
            sm = eval_at(km)
            yield from resolve(k1, s1, km, sm, depth + 1)
            yield from resolve(km, sm, k2, s2, depth + 1)
            return
        if crossed:
            ks, qs, alphas, _ = polish(k1, k2, s1[2], s2[2])
            # the zero count flips exactly at a Dirichlet root, so label the
            # mode from just below the root where the count is stable
            _, _, _, m_label = eval_at(ks * (1.0 - 1e-7) - 1e-9)
            yield MathieuMode(parity=parity, m=m_label, n=n, bc=bc,
                              alpha=alphas, q=qs, k=ellipse.k_of_q(qs))

    k = max(dk, 1e-3)
    state = eval_at(k)
    while k < k_max:
        k_next = min(k + dk, k_max)
        state_next = eval_at(k_next)
        yield from resolve(k, state, k_next, state_next)
        k, state = k_next, state_next


def find_mode(m: int, n: int, parity: str, bc: str, ellipse: EllipseSpec,
              k_max: float = 400.0) -> MathieuMode:
    """Locate the unique mode with the given zero counts, parity and bc."""
    _check_parity_n(parity, n)
    if m < 0:
        raise ParameterError("m must be >= 0")
    seen = []
    for mode in _scan_modes(n, parity, bc, ellipse, k_max):
        seen.append((mode.m, mode.k))
        if mode.m == m:
            _certify(mode, ellipse)
            return mode
        if mode.m > m:
            break
    raise SearchError(
        f"no ({m},{n}) {parity}/{bc} mode below k={k_max}", trace=seen
    )


def _certify(mode: MathieuMode, ellipse: EllipseSpec) -> None:
    """Cross-check the root with the independent RK4 integrator."""
    M, Mp = _radial_rk4(mode.alpha, mode.q, mode.parity, ellipse.mu0)
    scale = math.hypot(M, Mp)
    resid = (M if mode.bc == "dirichlet" else Mp) / max(scale, 1e-300)
    if abs(resid) > 1e-9 * max(1.0, mode.k):
        raise SolveError(
            f"mode certificate failed: independent residual {resid:.3e} "
            f"for (m={mode.m}, n={mode.n}, {mode.parity}, {mode.bc})"
        )


def list_quasimode_frequencies(n: int, m_range, parity: str, bc: str,
                               ellipse: EllipseSpec,
                               k_max: float = 400.0):
    """Modes for m in ``m_range`` at fixed n, sorted by (strictly increasing) k."""
    _check_parity_n(parity, n)
    wanted = set(int(m) for m in m_range)
    if not wanted:
        return []
    out = {}
    top = max(wanted)
    for mode in _scan_modes(n, parity, bc, ellipse, k_max):
        if mode.m in wanted and mode.m not in out:
            _certify(mode, ellipse)
            out[mode.m] = mode
        if mode.m >= top and len(out) == len(wanted):
            break
    missing = wanted - set(out)
    if missing:
        raise SearchError(f"modes {sorted(missing)} not found below k={k_max}")
    return [out[m] for m in sorted(out)]


def export_modes(modes, path) -> None:
    """CSV with columns (parity, bc, m, n, alpha, q, k)."""
    with open(path, "w") as fh:
        fh.write("# schema=quasimodes v1\n")
        fh.write("parity,bc,m,n,alpha,q,k\n")
        for md in modes:
            fh.write(f"{md.parity},{md.bc},{md.m},{md.n},"
                     f"{md.alpha!r},{md.q!r},{md.k!r}\n")
