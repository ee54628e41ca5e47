"""Cluster-plus-outliers bound machinery tests."""

import numpy as np
import pytest
import scipy.linalg as la

from cluster_instances import OUTLIER_REGION, random_instance
from helmtrap.bound import (ClusterBoundInput, bauer_fike_line,
                            campbell_contour_bound, compute_bound,
                            em_bruteforce, em_lens_bound, gamma_asymptotic,
                            gamma_from_beta, lens_boundary, minmax_polynomial,
                            weighted_rhs_bound)
from helmtrap.errors import BoundAssumptionError, DomainError, ParameterError
from helmtrap.gmres import SolveConfig, gmres_solve
from helmtrap.spectral import Rectangle, full_spectrum


def test_delta_formula_substitution():
    # L0=0.5, L1=1, n=100, kappa*=10, N_eig=5 -> delta = 0.5/(4*100*10*5)
    region = Rectangle(-0.1, 1.05, -0.7, 0.7)
    eigs = np.array([0.6, 0.7 + 0.1j, 0.8 - 0.1j, 0.9 + 0.2j, 2.0 + 0j])
    res = compute_bound(ClusterBoundInput(
        eigenvalues=eigs, norm2=2.5, kappa_star=10.0, n=100,
        half_plane=1.2, l0=0.5, l1=1.0, region=region))
    assert res.n_eig == 5
    assert res.delta == pytest.approx(2.5e-5, rel=1e-12)


def test_empty_outlier_bound_formula():
    eigs = np.array([1.5 + 0.1j, 2.0 - 0.2j])
    res = compute_bound(ClusterBoundInput(
        eigenvalues=eigs, norm2=2.2, kappa_star=1.5, n=50,
        half_plane=1.2, l0=0.5, l1=1.0, region=OUTLIER_REGION))
    assert res.ell == 0
    R = 2.2 + res.delta
    manual = R * 3.0 / res.delta * res.gamma_beta ** 7
    assert res.residual_bound(7) == pytest.approx(manual, rel=1e-12)


def test_bound_monotone_decreasing_and_mstar_consistent():
    rng = np.random.default_rng(0)
    B, lam, region, S, L0, L1 = random_instance(rng, n_max=80)
    s = full_spectrum(B, region)
    res = compute_bound(ClusterBoundInput(
        eigenvalues=s.eigenvalues, norm2=s.norm2, kappa_star=s.max_kappa,
        n=B.shape[0], half_plane=S, l0=L0, l1=L1, region=region, target=1e-6))
    ms = np.arange(res.ell, res.ell + 50)
    vals = res.log_residual_bound(ms)
    assert np.all(np.diff(vals) < 0)
    assert 0.0 < res.gamma_beta < 1.0
    assert res.residual_bound(res.m_star) <= 1e-6
    if res.m_star > res.ell:
        assert res.residual_bound(res.m_star - 1) > 1e-6


def test_assumption_violations_reported():
    eigs = np.array([0.3 + 0.9j, 2.0 + 0j])      # first is neither in N nor H
    with pytest.raises(BoundAssumptionError):
        compute_bound(ClusterBoundInput(
            eigenvalues=eigs, norm2=2.5, kappa_star=1.0, n=10,
            half_plane=1.0, l0=0.4, l1=0.9, region=OUTLIER_REGION))
    with pytest.raises(DomainError):
        compute_bound(ClusterBoundInput(
            eigenvalues=np.array([0.0 + 0j, 2.0 + 0j]), norm2=2.5,
            kappa_star=1.0, n=10, half_plane=1.0, l0=0.4, l1=0.9,
            region=OUTLIER_REGION))
    with pytest.raises(BoundAssumptionError):
        compute_bound(ClusterBoundInput(
            eigenvalues=np.array([0.05j, 0.05j, 2.0 + 0j]), norm2=2.5,
            kappa_star=1.0, n=10, half_plane=1.0, l0=0.4, l1=0.9,
            region=OUTLIER_REGION))


def test_gmres_dominated_by_bound_small_batch():
    rng = np.random.default_rng(42)
    for _ in range(10):
        B, lam, region, S, L0, L1 = random_instance(rng, n_max=120)
        n = B.shape[0]
        s = full_spectrum(B, region)
        res = compute_bound(ClusterBoundInput(
            eigenvalues=s.eigenvalues, norm2=s.norm2, kappa_star=s.max_kappa,
            n=n, half_plane=S, l0=L0, l1=L1, region=region))
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        cap = min(n, 60)
        _, tr = gmres_solve(B, b, SolveConfig(tol=1e-30, preconditioner="none",
                                              max_iterations=cap))
        rel = tr.relative_residuals
        for m in range(res.ell, len(rel)):
            assert rel[m] <= res.residual_bound(m) * (1 + 1e-9)


def test_unit_target_drops_epsilon_term():
    # eps = 1 makes log(1/eps) vanish: m* reduces to the outlier-driven floor
    eigs = np.array([0.05 + 0.02j, 1.5 + 0.1j, 2.0 - 0.2j])
    kw = dict(eigenvalues=eigs, norm2=2.2, kappa_star=1.5, n=50,
              half_plane=1.2, l0=0.5, l1=1.0, region=OUTLIER_REGION)
    res1 = compute_bound(ClusterBoundInput(target=1.0, **kw))
    res2 = compute_bound(ClusterBoundInput(target=0.5, **kw))
    floor = res1.ell + (res1.outlier_log_sum + np.log(1.0 / res1.delta)
                        + (res1.ell + 1) * (np.log(res1.norm2 + res1.delta)
                                            + np.log(3.0))) / np.log(1.0 / res1.gamma_beta)
    assert res1.m_star == int(np.ceil(floor))
    assert res1.m_star <= res2.m_star


def test_gamma_asymptotic_limit():
    norm2, l0, delta = 100.0, 1.0, 1e-4
    asym = gamma_asymptotic(norm2, l0, delta)
    beta = np.arccos(l0 / (norm2 + delta))
    exact = 1.0 / np.log(1.0 / gamma_from_beta(beta))
    assert asym == pytest.approx(exact, rel=0.10)
    assert gamma_asymptotic(2 * norm2, l0, delta) == pytest.approx(2 * asym, rel=1e-12)
    with pytest.raises(DomainError):
        gamma_asymptotic(5.0, 1.0, 1.0)


def test_gamma_beta_endpoint():
    beta = np.pi / 2 - 1e-12
    assert gamma_from_beta(beta) == pytest.approx(2 * np.sin(np.pi / 6), rel=1e-9)
    with pytest.raises(ParameterError):
        gamma_from_beta(np.pi / 2)


def test_lens_m0_and_single_point():
    for beta in (np.pi / 8, np.pi / 3):
        samples = lens_boundary(beta, 256)
        assert em_bruteforce(0, samples) == pytest.approx(1.0, abs=1e-9)
        assert em_lens_bound(0, beta) >= 1.0
    assert minmax_polynomial(np.array([1.0 + 0j]), 1) == pytest.approx(0.0, abs=1e-10)


def test_bruteforce_below_lens_bound_spot_checks():
    beta = np.pi / 4
    samples = lens_boundary(beta, 256)
    prev = np.inf
    for m in (0, 1, 2, 5, 9):
        bf = em_bruteforce(m, samples)
        assert bf <= em_lens_bound(m, beta) + 1e-9
        assert bf <= prev + 1e-9            # nonincreasing in m
        prev = bf


def test_bruteforce_requires_samples():
    with pytest.raises(ParameterError):
        em_bruteforce(3, lens_boundary(np.pi / 4, 16)[:50])


def test_bauer_fike_simple_geometry():
    L, cert = bauer_fike_line([0.5 + 0j, 0.9 + 0j], [1.0, 1.0], 0.05, 1, 0.5, 0.9)
    assert cert and 0.55 < L < 0.85
    # delta = 0: disks degenerate to points, some line always exists
    L, cert = bauer_fike_line([0.6 + 0j, 0.7 + 0j], [1.0, 1.0], 0.0, 5, 0.5, 0.9)
    assert cert and 0.5 < L < 0.9
    # full coverage: no line certified
    L, cert = bauer_fike_line([0.7 + 0j], [1.0], 10.0, 3, 0.5, 0.9)
    assert not cert


def test_bauer_fike_certificate_against_resolvent():
    rng = np.random.default_rng(7)
    B, lam, region, S, L0, L1 = random_instance(rng, n_max=60)
    n = B.shape[0]
    s = full_spectrum(B, region)
    res = compute_bound(ClusterBoundInput(
        eigenvalues=s.eigenvalues, norm2=s.norm2, kappa_star=s.max_kappa,
        n=n, half_plane=S, l0=L0, l1=L1, region=region))
    L, cert = bauer_fike_line(s.eigenvalues, s.kappas, res.delta, n, L0, L1)
    assert cert
    ts = np.linspace(s.eigenvalues.imag.min() - 1, s.eigenvalues.imag.max() + 1, 200)
    for t in ts:
        sv = la.svdvals((L + 1j * t) * np.eye(n) - B)
        assert sv[-1] > res.delta


def test_campbell_matches_disk_minmax_for_normal_cluster():
    # normal matrix, spectrum in disk |z - c| <= rho, no outliers; classical
    # disk bound for the min-max polynomial is (rho/|c|)^m
    rng = np.random.default_rng(11)
    n = 60
    c, rho = 2.0, 0.5
    lam = c + rho * rng.uniform(0.2, 1.0, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    Q = la.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))[0]
    B = Q @ np.diag(lam) @ Q.conj().T
    m = 6
    phi = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    contour = c + (rho + 0.35) * np.exp(1j * phi)
    val = campbell_contour_bound(B, [], contour, m)
    # compare the polynomial factor against the disk min-max on the contour
    ref = minmax_polynomial(contour, m)
    disk = ((rho + 0.35) / c) ** m
    assert ref == pytest.approx(disk, rel=0.05)
    assert val > 0


def test_campbell_grows_with_contour_radius():
    # with an outlier present the |contour| and outlier-product factors win
    # against the 1/R resolvent decay, so the diagnostic blows up for huge
    # contours
    rng = np.random.default_rng(12)
    n = 30
    lam = np.concatenate([[0.05 + 0j],
                          2.0 + 0.3 * rng.normal(size=n - 1)
                          + 0.3j * rng.normal(size=n - 1)])
    B = np.diag(lam)
    m = 4
    vals = []
    for R in (2.0, 20.0, 200.0):
        phi = np.linspace(0, 2 * np.pi, 128, endpoint=False)
        vals.append(campbell_contour_bound(B, [lam[0]], 2.0 + R * np.exp(1j * phi), m))
    assert vals[0] < vals[1] < vals[2]


def test_campbell_dominates_gmres_small_synthetic():
    rng = np.random.default_rng(13)
    n = 80
    cluster = 2.0 + 0.3 * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
    lam = np.concatenate([[0.05 + 0.02j], cluster])
    V = np.eye(n) + 0.05 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    B = V @ np.diag(lam) @ la.inv(V)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    _, tr = gmres_solve(B, b, SolveConfig(tol=1e-30, preconditioner="none",
                                          max_iterations=40))
    phi = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    contour = 2.0 + 1.8 * np.exp(1j * phi)
    rel = tr.relative_residuals
    for m in (1, 5, 10, 20, min(39, len(rel) - 1)):
        bound = campbell_contour_bound(B, [lam[0]], contour, m)
        assert rel[m] <= bound * (1 + 1e-9)


def test_campbell_rejects_contour_through_eigenvalue():
    B = np.diag([1.0 + 0j, 2.0])
    with pytest.raises(DomainError):
        campbell_contour_bound(B, [], np.array([1.0 + 0j, 3.0 + 0j]), 2)


def test_weighted_rhs_bound_basics():
    rng = np.random.default_rng(14)
    n = 6
    V = np.eye(n) + 0.05 * rng.normal(size=(n, n))
    lam = np.array([0.1, 1.0, 1.2, 1.4, 1.6, 1.8], dtype=complex)
    b = V[:, 2].astype(complex)
    assert weighted_rhs_bound(V, lam, b, 1) == pytest.approx(0.0, abs=1e-10)
    m0 = weighted_rhs_bound(V, lam, b, 0)
    expect = la.norm(V, 2) * np.linalg.norm(la.solve(V, b)) / np.linalg.norm(b)
    assert m0 == pytest.approx(expect, rel=1e-12)


def test_weighted_rhs_bound_outlier_weight_monotonicity():
    # growing the component on the near-zero eigenvector weakly increases the
    # iteration count needed to push the bound below tolerance
    rng = np.random.default_rng(15)
    n = 40
    lam = np.concatenate([[0.01 + 0j], 2.0 + 0.2 * rng.normal(size=n - 1)
                          + 0.2j * rng.normal(size=n - 1)])
    V = np.eye(n) + 0.02 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    base = np.sum(V[:, 1:], axis=1)
    needed = []
    for w in (0.0, 0.5, 5.0):
        b = base + w * V[:, 0]
        m = 0
        while m < 60 and weighted_rhs_bound(V, lam, b, m) > 1e-6:
            m += 1
        needed.append(m)
    assert needed[0] <= needed[1] <= needed[2]


def test_weighted_rhs_bound_singular_v():
    V = np.zeros((3, 3))
    with pytest.raises(Exception):
        weighted_rhs_bound(V, np.ones(3, dtype=complex), np.ones(3), 2)
