"""P1 Galerkin assembly of the Helmholtz boundary-integral operators.

Operators (2-d, fundamental solution Phi_k(x,y) = (i/4) H0^(1)(k|x-y|)):

    S        single layer                kernel Phi_k
    D        double layer                d Phi_k / dn(y)
    Dprime   adjoint double layer        d Phi_k / dn(x)
    H        hypersingular, assembled in the integrated-by-parts weak form
             <H phi, psi> = II Phi_k(x,y) [phi'(y) psi'(x)
                                           - k^2 (n(x).n(y)) phi(y) psi(x)]
    S_ik, D_ik, H_ik   the same families at wavenumber i*k, where
             Phi_{ik}(x,y) = K0(k|x-y|) / (2 pi)

and the combined systems

    Aprime = 1/2 M + Dprime - i k S            (Dirichlet, coupling eta = k)
    B      = i k (1/2 M - D) + H               (Neumann, eta = k)
    Breg   = (i/2)(1/2 M - D) + S_ik M^-1 H    (regularised Neumann, eta = 1/2)

Singular quadrature: every kernel is split as g(x,y) log|x-y| + smooth.  On
the self pair the log factor reduces to log|s-t| in the reference coordinates
and is integrated with dedicated log-weighted Gauss rules; on adjacent pairs a
Duffy substitution at the shared node both cancels the Cauchy-type 1/r part of
the double-layer kernels and turns the log term into log(sigma), again handled
by the log rules.  Far pairs use plain tensor Gauss-Legendre of order
``quad_order`` (doubled on the singular pairs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg as la

from .errors import AssemblyError, ParameterError
from .geometry import BoundaryMesh
from .quadrature import gauss01, log_gauss01
from . import specfun

__all__ = [
    "OperatorKind", "OperatorMatrix", "PlaneWave",
    "assemble", "assemble_system", "assemble_mass",
    "plane_wave_rhs", "evaluate_field", "export_matrix",
]

_EULER_GAMMA = float(np.euler_gamma)

ELEMENTARY_KINDS = ("mass", "S", "D", "Dprime", "H", "S_ik", "D_ik", "H_ik")
COMBINED_KINDS = ("Aprime", "B", "Breg")
_COUPLING = {"Aprime": lambda k: k, "B": lambda k: k, "Breg": lambda k: 0.5}

FORMULATIONS = {
    "dirichlet-aprime": "Aprime",
    "neumann-b": "B",
    "neumann-breg": "Breg",
}


@dataclass(frozen=True)
class OperatorKind:
    """Tag identifying a Galerkin operator: family name plus wavenumber."""

    name: str
    k: float

    def __post_init__(self):
        if self.name not in ELEMENTARY_KINDS + COMBINED_KINDS:
            raise AssemblyError(f"unknown operator kind {self.name!r}")
        if self.name != "mass" and self.k <= 0:
            raise AssemblyError(f"wavenumber must be positive, got {self.k}")

    @property
    def coupling(self) -> Optional[float]:
        """Combined-field coupling parameter eta (None for elementary kinds)."""
        fn = _COUPLING.get(self.name)
        return None if fn is None else fn(self.k)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    kind: OperatorKind
    mesh: BoundaryMesh
    quad_order: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class PlaneWave:
    """Incident wave exp(i k x . a) with direction a = (cos theta, sin theta)."""

    k: float
    theta: float

    @property
    def direction(self) -> np.ndarray:
        return np.array([np.cos(self.theta), np.sin(self.theta)])

    def field(self, points: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.k * points @ self.direction)

    def normal_derivative(self, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
        return 1j * self.k * (normals @ self.direction) * self.field(points)


# ----------------------------------------------------------------------------
# kernels: full(r, dxy, nx, ny) and log factor g(...); kernel = g*log r + smooth
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class _Kernel:
    full: Callable
    logfac: Callable
    diag_limit: Callable            # limit of full - logfac*log|s-t| on the diagonal
    swap_sign_free: bool = False    # kernel independent of normals and dxy sign


def _phi_kernel(k: float, imaginary: bool) -> _Kernel:
    if not imaginary:
        def full(r, dxy, nx, ny):
            return 0.25j * specfun.hankel1(0, k * r)

        def logfac(r, dxy, nx, ny):
            return (-0.5 / np.pi) * specfun.bessel_j0(k * r)

        def diag(L):
            return 0.25j + (-0.5 / np.pi) * (_EULER_GAMMA + np.log(0.5 * k * L))
    else:
        def full(r, dxy, nx, ny):
            return (0.5 / np.pi) * specfun.bessel_k0(k * r)

        def logfac(r, dxy, nx, ny):
            return (-0.5 / np.pi) * specfun.bessel_i0(k * r)

        def diag(L):
            return (-0.5 / np.pi) * (_EULER_GAMMA + np.log(0.5 * k * L)) + 0j
    return _Kernel(full, logfac, diag, swap_sign_free=True)


def _dlp_kernel(k: float, adjoint: bool, imaginary: bool) -> _Kernel:
    def _u(dxy, nx, ny):
        if adjoint:
            return -np.einsum("...i,...i->...", dxy, nx)   # (y-x).n(x)
        return np.einsum("...i,...i->...", dxy, ny)        # (x-y).n(y)

    if not imaginary:
        def full(r, dxy, nx, ny):
            return 0.25j * k * specfun.hankel1(1, k * r) * _u(dxy, nx, ny) / r

        def logfac(r, dxy, nx, ny):
            return (-0.5 * k / np.pi) * specfun.bessel_j1(k * r) * _u(dxy, nx, ny) / r
    else:
        def full(r, dxy, nx, ny):
            return (0.5 * k / np.pi) * specfun.bessel_k1(k * r) * _u(dxy, nx, ny) / r

        def logfac(r, dxy, nx, ny):
            return (0.5 * k / np.pi) * specfun.bessel_i1(k * r) * _u(dxy, nx, ny) / r

    return _Kernel(full, logfac, lambda L: 0.0 + 0j)


# ----------------------------------------------------------------------------
# pair-quadrature engine
# ----------------------------------------------------------------------------
class _Task:
    """One matrix to accumulate: a kernel plus a scatter rule.

    mode 'p1'   : A[i_a, j_b] += M[a, b]
    mode 'maue' : A[i_a, j_b] += c_deriv * sg_a sg_b / (L_e L_f) * sum_ab(M)
                                 + c2 * (n_e . n_f) * M[a, b]
    where M are the P1 pair moments of the kernel and sg = (-1, +1); the
    derivative term realises II Phi phi'(y) psi'(x) since P1 hat derivatives
    are the constants sg_a / L_e.
    """

    def __init__(self, kernel: _Kernel, mode: str, n: int,
                 c2: float = 0.0, c_deriv: float = 1.0):
        self.kernel = kernel
        self.mode = mode
        self.c2 = c2
        self.c_deriv = c_deriv
        self.out = np.zeros((n, n), dtype=complex)

    def scatter(self, rows, cols, moments, Le, Lf, nenf):
        # moments: (..., 2, 2); rows/cols: (...,) element indices
        n = self.out.shape[0]
        if self.mode == "p1":
            for a in (0, 1):
                for b in (0, 1):
                    np.add.at(self.out, ((rows + a) % n, (cols + b) % n),
                              moments[..., a, b])
        else:
            total = self.c_deriv * moments.sum(axis=(-2, -1)) / (Le * Lf)
            sg = (-1.0, 1.0)
            for a in (0, 1):
                for b in (0, 1):
                    np.add.at(self.out, ((rows + a) % n, (cols + b) % n),
                              sg[a] * sg[b] * total + self.c2 * nenf * moments[..., a, b])


def _run_tasks(mesh: BoundaryMesh, tasks: list, q: int) -> None:
    n = mesh.n_nodes
    if n < 4:
        raise AssemblyError("mesh too small for singular-pair classification")
    P0 = mesh.nodes[mesh.elements[:, 0]]
    P1 = mesh.nodes[mesh.elements[:, 1]]
    L = mesh.lengths
    nrm = mesh.normals
    tang = (P1 - P0) / L[:, None]

    sq, wq = gauss01(q)
    s2, w2 = gauss01(2 * q)
    sl, wl = log_gauss01(2 * q)

    shapes_q = np.stack([1.0 - sq, sq])          # (2, q)
    Xg = P0[:, None, :] + sq[None, :, None] * (P1 - P0)[:, None, :]   # (n, q, 2)

    # --- far pairs, blocked over rows; singular triples masked then corrected
    Wab = np.einsum("ap,bq->abpq", shapes_q * wq, shapes_q * wq)      # (2,2,q,q)
    block = max(1, int(3.0e6 / (n * q * q)))
    idx = np.arange(n)
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        b = i1 - i0
        # (b, n, q_x, q_y, 2)
        dxy = Xg[i0:i1, None, :, None, :] - Xg[None, :, None, :, :]
        r = np.linalg.norm(dxy, axis=-1)
        # mask self/adjacent pairs so kernels never see r ~ 0
        rows_local = idx[i0:i1]
        mask = np.zeros((b, n), dtype=bool)
        for off in (-1, 0, 1):
            mask[idx[:b], (rows_local + off) % n] = True
        r[mask] = 1.0
        nx = np.broadcast_to(nrm[i0:i1, None, None, None, :], dxy.shape)
        ny = np.broadcast_to(nrm[None, :, None, None, :], dxy.shape)
        LL = L[i0:i1, None] * L[None, :]
        nenf = nrm[i0:i1] @ nrm.T
        for task in tasks:
            Kv = task.kernel.full(r, dxy, nx, ny)
            Kv = np.where(mask[:, :, None, None], 0.0, Kv)
            moments = np.einsum("abpq,inpq->inab", Wab, Kv) * LL[:, :, None, None]
            task.scatter(rows_local[:, None] + 0 * idx[None, :],
                         idx[None, :] + 0 * rows_local[:, None],
                         moments, L[i0:i1, None], L[None, :], nenf)

    # --- self pairs, vectorised over all elements -----------------------------
    # smooth part: (full - g*log|s-t|) on the 2q x 2q tensor grid
    ds = s2[:, None] - s2[None, :]                    # (2q, 2q)
    r_ref = np.abs(ds)
    r_self = L[:, None, None] * r_ref[None, :, :]
    r_safe = np.where(r_self == 0.0, 1.0, r_self)
    dxy_self = ds[None, :, :, None] * (L[:, None] * tang)[:, None, None, :].reshape(n, 1, 1, 2)
    nx_self = np.broadcast_to(nrm[:, None, None, :], dxy_self.shape)
    logref = np.where(r_ref == 0.0, 0.0, np.log(np.where(r_ref == 0.0, 1.0, r_ref)))
    shapes_2q = np.stack([1.0 - s2, s2])
    W2ab = np.einsum("ap,bq->abpq", shapes_2q * w2, shapes_2q * w2)
    diag_mask = (r_ref == 0.0)
    # log part layout: u-quadrature (log rule), s-quadrature on [u, 1]
    #   H(u) = int_u^1 [G(s, s-u) + G(s-u, s)] ds,  I_log = -sum_i wl_i H(u_i)
    su = sl[:, None] + (1.0 - sl)[:, None] * s2[None, :]      # (2q, 2q): s in [u,1]
    wu = (1.0 - sl)[:, None] * w2[None, :]
    tu = su - sl[:, None]
    for task in tasks:
        diag_val = np.array([task.kernel.diag_limit(Le) for Le in L])
        Ks = task.kernel.full(r_safe, dxy_self, nx_self, nx_self)
        Kg = task.kernel.logfac(r_safe, dxy_self, nx_self, nx_self)
        Ksm = Ks - Kg * logref[None, :, :]
        Ksm = np.where(diag_mask[None, :, :], diag_val[:, None, None], Ksm)
        moments = np.einsum("abpq,ipq->iab", W2ab, Ksm) * (L * L)[:, None, None]
        # log part: both orientations (s, s-u) and (s-u, s) share r = L*u scaled
        for (sa, ta) in ((su, tu), (tu, su)):
            dref = sa - ta                                     # = +-u
            r_log = L[:, None, None] * np.abs(dref)[None, :, :]
            dxy_log = dref[None, :, :, None] * (L[:, None] * tang)[:, None, None, :].reshape(n, 1, 1, 2)
            nxl = np.broadcast_to(nrm[:, None, None, :], dxy_log.shape)
            g = task.kernel.logfac(r_log, dxy_log, nxl, nxl)
            Na = np.stack([1.0 - sa, sa])                      # (2, 2q, 2q)
            Nb = np.stack([1.0 - ta, ta])
            for a in (0, 1):
                for bb in (0, 1):
                    hval = np.einsum("iuq,uq->iu", g * (Na[a] * Nb[bb])[None], wu)
                    moments[:, a, bb] += -(hval @ wl) * L * L
        task.scatter(idx, idx, moments, L, L, np.ones(n))

    # --- adjacent pairs (e, e+1) and the reverse, vectorised ------------------
    nxt = (idx + 1) % n
    ve = -(L[:, None] * tang)                 # from shared node back along e
    vf = (L[nxt])[:, None] * tang[nxt]        # from shared node forward along f
    nenf_adj = np.einsum("ij,ij->i", nrm, nrm[nxt])

    def adj_moments(task):
        mom_fw = np.zeros((n, 2, 2), dtype=complex)   # pair (e, e+1)
        mom_bw = np.zeros((n, 2, 2), dtype=complex)   # pair (e+1, e)
        for tri in (0, 1):
            # triangle 0: sigma = S, tau = S*R; triangle 1: sigma = S*R, tau = S
            for grid, rule_w, is_log in (((s2, w2), w2, False), ((sl, wl), wl, True)):
                Sv, Wv = grid
                SG, RG = np.meshgrid(Sv, s2, indexing="ij")   # (nS, 2q)
                if tri == 0:
                    sig, tau = SG, SG * RG
                else:
                    sig, tau = SG * RG, SG
                dxy = sig[None, :, :, None] * ve[:, None, None, :] \
                    - tau[None, :, :, None] * vf[:, None, None, :]
                r = np.linalg.norm(dxy, axis=-1)
                nx = np.broadcast_to(nrm[:, None, None, :], dxy.shape)
                ny = np.broadcast_to(nrm[nxt][:, None, None, :], dxy.shape)
                # reference coords on the elements: x on e at s = 1-sigma, y on f at t = tau
                Na = np.stack([sig, 1.0 - sig])               # (2, nS, 2q): N0=1-s=sigma
                Nb = np.stack([1.0 - tau, tau])
                jac = SG                                       # Duffy jacobian
                scale = (L * L[nxt])[:, None, None]
                if not is_log:
                    Kf = task.kernel.full(r, dxy, nx, ny)
                    Kg = task.kernel.logfac(r, dxy, nx, ny)
                    val = (Kf - Kg * np.log(SG)[None]) * jac[None]
                    Kf_sw = task.kernel.full(r, -dxy, ny, nx)
                    Kg_sw = task.kernel.logfac(r, -dxy, ny, nx)
                    val_sw = (Kf_sw - Kg_sw * np.log(SG)[None]) * jac[None]
                    wgt = np.einsum("u,q->uq", Wv, w2)
                else:
                    Kg = task.kernel.logfac(r, dxy, nx, ny)
                    val = -Kg * jac[None]
                    val_sw = -task.kernel.logfac(r, -dxy, ny, nx) * jac[None]
                    wgt = np.einsum("u,q->uq", Wv, w2)
                for a in (0, 1):
                    for bb in (0, 1):
                        mom_fw[:, a, bb] += np.einsum(
                            "iuq,uq->i", val * (Na[a] * Nb[bb])[None], wgt) * (L * L[nxt])
                        mom_bw[:, bb, a] += np.einsum(
                            "iuq,uq->i", val_sw * (Na[a] * Nb[bb])[None], wgt) * (L * L[nxt])
        return mom_fw, mom_bw

    for task in tasks:
        mom_fw, mom_bw = adj_moments(task)
        task.scatter(idx, nxt, mom_fw, L, L[nxt], nenf_adj)
        task.scatter(nxt, idx, mom_bw, L[nxt], L, nenf_adj)


# ----------------------------------------------------------------------------
# public assembly API
# ----------------------------------------------------------------------------
def assemble_mass(mesh: BoundaryMesh) -> OperatorMatrix:
    """Exact P1 mass matrix on a closed polygon: cyclic tridiagonal SPD."""
    n = mesh.n_nodes
    M = np.zeros((n, n))
    e0 = mesh.elements[:, 0]
    e1 = mesh.elements[:, 1]
    np.add.at(M, (e0, e0), mesh.lengths / 3.0)
    np.add.at(M, (e1, e1), mesh.lengths / 3.0)
    np.add.at(M, (e0, e1), mesh.lengths / 6.0)
    np.add.at(M, (e1, e0), mesh.lengths / 6.0)
    return OperatorMatrix(M, OperatorKind("mass", 0.0), mesh, 0)


def _elementary_tasks(name: str, k: float, n: int):
    if name == "S":
        return [_Task(_phi_kernel(k, False), "p1", n)]
    if name == "S_ik":
        return [_Task(_phi_kernel(k, True), "p1", n)]
    if name == "D":
        return [_Task(_dlp_kernel(k, False, False), "p1", n)]
    if name == "Dprime":
        return [_Task(_dlp_kernel(k, True, False), "p1", n)]
    if name == "D_ik":
        return [_Task(_dlp_kernel(k, False, True), "p1", n)]
    if name == "H":
        # H = dn(x) of the double-layer potential; its integrated-by-parts
        # (Maue) bilinear form is <H phi, psi> = II Phi [k^2 (n.n) phi psi
        # - phi' psi'], the sign fixed by the Calderon relation S H = -I/4 + D^2.
        return [_Task(_phi_kernel(k, False), "maue", n, c2=k * k, c_deriv=-1.0)]
    if name == "H_ik":
        # wavenumber i*k: the k^2 factor becomes (ik)^2 = -k^2
        return [_Task(_phi_kernel(k, True), "maue", n, c2=-(k * k), c_deriv=-1.0)]
    raise AssemblyError(f"no elementary assembly for kind {name!r}")


def assemble(mesh: BoundaryMesh, kind: OperatorKind,
             quad_order: int = 8) -> OperatorMatrix:
    """Assemble the Galerkin matrix of a single operator kind."""
    if kind.name == "mass":
        return assemble_mass(mesh)
    if kind.name in COMBINED_KINDS:
        formulation = {v: f for f, v in FORMULATIONS.items()}[kind.name]
        return assemble_system(mesh, formulation, kind.k, quad_order)
    tasks = _elementary_tasks(kind.name, kind.k, mesh.n_nodes)
    _run_tasks(mesh, tasks, quad_order)
    return OperatorMatrix(tasks[0].out, kind, mesh, quad_order)


def assemble_system(mesh: BoundaryMesh, formulation: str, k: float,
                    quad_order: int = 8) -> OperatorMatrix:
    """Assemble a combined-field system matrix in one pass over element pairs."""
    if formulation not in FORMULATIONS:
        raise AssemblyError(f"unknown formulation {formulation!r}")
    n = mesh.n_nodes
    M = assemble_mass(mesh).entries
    if formulation == "dirichlet-aprime":
        t_s = _Task(_phi_kernel(k, False), "p1", n)
        t_dp = _Task(_dlp_kernel(k, True, False), "p1", n)
        _run_tasks(mesh, [t_s, t_dp], quad_order)
        A = 0.5 * M + t_dp.out - 1j * k * t_s.out
        return OperatorMatrix(A, OperatorKind("Aprime", k), mesh, quad_order)
    if formulation == "neumann-b":
        t_d = _Task(_dlp_kernel(k, False, False), "p1", n)
        t_h = _Task(_phi_kernel(k, False), "maue", n, c2=k * k, c_deriv=-1.0)
        _run_tasks(mesh, [t_d, t_h], quad_order)
        A = 1j * k * (0.5 * M - t_d.out) + t_h.out
        return OperatorMatrix(A, OperatorKind("B", k), mesh, quad_order)
    # regularised Neumann: i/2 (M/2 - D) + S_ik M^-1 H_k
    t_d = _Task(_dlp_kernel(k, False, False), "p1", n)
    t_h = _Task(_phi_kernel(k, False), "maue", n, c2=k * k, c_deriv=-1.0)
    t_sik = _Task(_phi_kernel(k, True), "p1", n)
    _run_tasks(mesh, [t_d, t_h, t_sik], quad_order)
    A = 0.5j * (0.5 * M - t_d.out) + t_sik.out @ la.solve(M, t_h.out, assume_a="pos")
    return OperatorMatrix(A, OperatorKind("Breg", k), mesh, quad_order)


def _load_vector(mesh: BoundaryMesh, fvals_at, quad_order: int = 8) -> np.ndarray:
    """Galerkin load (f, phi_i) with f sampled at element Gauss points."""
    sq, wq = gauss01(quad_order)
    P0 = mesh.nodes[mesh.elements[:, 0]]
    P1 = mesh.nodes[mesh.elements[:, 1]]
    X = P0[:, None, :] + sq[None, :, None] * (P1 - P0)[:, None, :]
    F = fvals_at(X.reshape(-1, 2)).reshape(mesh.n_nodes, quad_order)
    out = np.zeros(mesh.n_nodes, dtype=complex)
    w0 = wq * (1.0 - sq)
    w1 = wq * sq
    np.add.at(out, mesh.elements[:, 0], (F @ w0) * mesh.lengths)
    np.add.at(out, mesh.elements[:, 1], (F @ w1) * mesh.lengths)
    return out


def plane_wave_rhs(mesh: BoundaryMesh, formulation: str, wave: PlaneWave,
                   quad_order: int = 8) -> np.ndarray:
    """Right-hand side load vector for the given formulation."""
    if formulation not in FORMULATIONS:
        raise AssemblyError(f"unknown formulation {formulation!r}")
    k = wave.k
    a = wave.direction
    elem_norm = {tuple(mesh.elements[e]): e for e in range(mesh.n_nodes)}

    def per_element(X, fn):
        # X flattened Gauss points in element order (n, q, 2) -> reuse normals
        q = X.shape[0] // mesh.n_nodes
        nrm = np.repeat(mesh.normals, q, axis=0)
        return fn(X, nrm)

    if formulation == "dirichlet-aprime":
        def f(X, nrm):
            u = np.exp(1j * k * X @ a)
            return 1j * k * u * (nrm @ a - 1.0)
        return _load_vector(mesh, lambda X: per_element(X, f), quad_order)
    if formulation == "neumann-b":
        def f(X, nrm):
            u = np.exp(1j * k * X @ a)
            return 1j * k * u * (1.0 - nrm @ a)
        return _load_vector(mesh, lambda X: per_element(X, f), quad_order)
    # neumann-breg: (i/2) u^I - S_ik dn u^I, with S_ik applied discretely
    def f_u(X, nrm):
        return np.exp(1j * k * X @ a)

    def f_dn(X, nrm):
        return 1j * k * (nrm @ a) * np.exp(1j * k * X @ a)

    load_u = _load_vector(mesh, lambda X: per_element(X, f_u), quad_order)
    load_dn = _load_vector(mesh, lambda X: per_element(X, f_dn), quad_order)
    M = assemble_mass(mesh).entries
    S_ik = assemble(mesh, OperatorKind("S_ik", k), quad_order).entries
    return 0.5j * load_u - S_ik @ la.solve(M, load_dn, assume_a="pos")


def evaluate_field(mesh: BoundaryMesh, dirichlet_trace: np.ndarray,
                   neumann_trace: np.ndarray, wave: PlaneWave,
                   points: np.ndarray, quad_order: int = 8):
    """Total field u = u^I + D[dirichlet] - S[neumann] at exterior points.

    Returns (values, near_flags); near_flags marks points closer to the
    boundary than one local element length, where the plain quadrature of the
    layer potentials is unreliable.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = wave.k
    sq, wq = gauss01(quad_order)
    P0 = mesh.nodes[mesh.elements[:, 0]]
    P1 = mesh.nodes[mesh.elements[:, 1]]
    X = P0[:, None, :] + sq[None, :, None] * (P1 - P0)[:, None, :]   # (n,q,2)
    dir_vals = np.asarray(dirichlet_trace)[mesh.elements]            # (n,2)
    neu_vals = np.asarray(neumann_trace)[mesh.elements]
    shp = np.stack([1.0 - sq, sq], axis=1)                           # (q,2)
    dens_d = np.einsum("qa,na->nq", shp, dir_vals)
    dens_n = np.einsum("qa,na->nq", shp, neu_vals)
    out = wave.field(points).astype(complex)
    near = np.zeros(len(points), dtype=bool)
    block = max(1, int(2.0e6 / (mesh.n_nodes * quad_order)))
    for i0 in range(0, len(points), block):
        i1 = min(i0 + block, len(points))
        dxy = points[i0:i1, None, None, :] - X[None, :, :, :]
        r = np.linalg.norm(dxy, axis=-1)
        near[i0:i1] = (r.min(axis=(1, 2)) < mesh.lengths.max())
        H0 = specfun.hankel1(0, k * r)
        H1 = specfun.hankel1(1, k * r)
        u_dot = np.einsum("pnqi,ni->pnq", dxy, mesh.normals)
        kern_D = 0.25j * k * H1 * u_dot / r
        kern_S = 0.25j * H0
        w_len = wq[None, :] * mesh.lengths[:, None]
        out[i0:i1] += np.einsum("pnq,nq,nq->p", kern_D, dens_d, w_len)
        out[i0:i1] -= np.einsum("pnq,nq,nq->p", kern_S, dens_n, w_len)
    return out, near


def export_matrix(op: OperatorMatrix, path, binary: bool = False) -> None:
    """Dump to disk.

    Text format: line 1 ``helmtrap-matrix n <n> kind <name> k <k>``, then n*n
    lines ``re im`` in row-major order.  Binary format: the same header line
    (utf-8, newline-terminated) followed by the raw complex128 row-major block.
    """
    header = f"helmtrap-matrix n {op.n} kind {op.kind.name} k {op.kind.k!r}\n"
    if binary:
        with open(path, "wb") as fh:
            fh.write(header.encode())
            fh.write(np.ascontiguousarray(op.entries, dtype=complex).tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(header)
            for v in op.entries.ravel():
                fh.write(f"{float(v.real)!r} {float(v.imag)!r}\n")
