"""Phase-space volume and eigenvalue-count prediction tests."""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import jn_zeros

from helmtrap.errors import DomainError, ParameterError
from helmtrap.quasimodes import EllipseSpec, _scan_modes
from helmtrap.weyl import (WeylConfig, cavity_weyl_config, phi_integrand,
                           predicted_window_count, v_loc, weyl_bulk_count)


def test_phi_inactive_branch():
    assert phi_integrand(-0.5, 0.3, 0.1) == 0.0


def test_phi_alpha_zero_omega_zero():
    assert phi_integrand(0.0, 0.0, 0.7) == pytest.approx(math.pi / 2, abs=1e-14)


def test_phi_against_extended_precision_substitution():
    alpha, omega, theta = -0.5, 0.3, math.pi / 2
    with mp.workdps(50):
        s2 = mp.sin(theta) ** 2
        sh2 = mp.sinh(omega) ** 2
        oracle = float(mp.asin(mp.sqrt((alpha + s2) / (sh2 + s2))))
    assert phi_integrand(alpha, omega, theta) == pytest.approx(oracle, abs=1e-14)


def test_phi_domain_validation():
    with pytest.raises(ParameterError):
        phi_integrand(0.5, 0.1, 0.1)
    with pytest.raises(ParameterError):
        phi_integrand(-0.5, -0.1, 0.1)


def test_v_loc_production_values():
    assert v_loc(cavity_weyl_config("small")) == pytest.approx(0.9895, abs=1e-3)
    assert v_loc(cavity_weyl_config("large")) == pytest.approx(3.0710, abs=1e-3)


def test_v_loc_empty_cut():
    cfg = WeylConfig(x_cut=1e-9)         # cut at the centre: alpha_cut -> -1
    assert v_loc(cfg) == pytest.approx(0.0, abs=1e-8)


def test_v_loc_monotone_in_opening_angle():
    phis = np.linspace(0.55 * math.pi, 0.95 * math.pi, 5)
    vals = [v_loc(WeylConfig(x_cut=math.cos(p))) for p in phis]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_v_loc_quadrature_invariance():
    from helmtrap.weyl import _v_loc_fixed_order
    cfg = cavity_weyl_config("small")
    v1 = _v_loc_fixed_order(cfg, 160)
    v2 = _v_loc_fixed_order(cfg, 320)
    assert abs(v2 - v1) / abs(v2) < 1e-5


def test_predicted_window_count_values():
    cfg = cavity_weyl_config("small")
    assert predicted_window_count(0.0, cfg) == 0.0
    val = predicted_window_count(100.0, cfg)
    manual = 2 * 0.45 * 2 * v_loc(cfg) / (4 * math.pi ** 2) * 100.0
    assert val == pytest.approx(manual, rel=1e-12)
    assert val == pytest.approx(4.51, abs=0.05)
    ratio = predicted_window_count(77.0, cavity_weyl_config("large")) / \
        predicted_window_count(77.0, cfg)
    assert ratio == pytest.approx(3.0710 / 0.9895, rel=1e-3)


def test_weyl_bulk_leading_term():
    lam, area = 50.0, 2.0
    assert weyl_bulk_count(lam, area, 0.0, "dirichlet") == pytest.approx(
        lam * area / (4 * math.pi))
    with pytest.raises(DomainError):
        weyl_bulk_count(-1.0, 1.0, 1.0, "dirichlet")


def test_weyl_bulk_unit_disk_against_bessel_zero_enumeration():
    lam = 100.0
    kmax = math.sqrt(lam)
    count = 0
    n = 0
    while True:
        zeros = [z for z in jn_zeros(n, 40) if z <= kmax]
        if not zeros and n > 0:
            break
        count += len(zeros) * (1 if n == 0 else 2)
        n += 1
    pred = weyl_bulk_count(lam, math.pi, 2 * math.pi, "dirichlet")
    assert abs(pred - count) / count <= 0.10


@pytest.mark.slow
def test_weyl_bulk_ellipse_against_mathieu_enumeration():
    # enumerate all Dirichlet ellipse eigenfrequencies k <= 12 via the Mathieu
    # solver, compare the count with the two-term Weyl prediction
    ellipse = EllipseSpec(1.0, 0.5)
    kmax = 12.0
    count = 0
    n = 0
    while True:
        found_even = [m for m in _scan_modes(n, "even", "dirichlet", ellipse, kmax)]
        found_odd = ([m for m in _scan_modes(n, "odd", "dirichlet", ellipse, kmax)]
                     if n >= 1 else [])
        new = len(found_even) + len(found_odd)
        # even and odd angular dependence each occur once per (m, n)
        count += new
        if new == 0 and n > 2:
            break
        n += 1
    per = 4.844224110273838
    area = math.pi * 0.5
    pred = weyl_bulk_count(kmax ** 2, area, per, "dirichlet")
    assert abs(pred - count) <= 3.0
