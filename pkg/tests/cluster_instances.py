"""Random diagonalisable matrices with a half-plane cluster plus near-zero
outliers, satisfying the hypotheses of the cluster-plus-outliers bound."""

import numpy as np

from helmtrap.spectral import Rectangle

OUTLIER_REGION = Rectangle(-0.1, 0.1, -0.6, 0.6)


def random_instance(rng, n_max=200):
    """Returns (B, eigenvalues, region, S, L0, L1)."""
    n = int(rng.integers(40, n_max + 1))
    ell = int(rng.integers(0, 5))
    S = float(rng.uniform(0.6, 1.4))
    cluster = (S + rng.uniform(0.0, 1.2, size=n - ell)
               + 1j * rng.uniform(-0.8, 0.8, size=n - ell))
    mag = rng.uniform(0.03, 0.55, size=ell)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=ell)
    out = mag * np.exp(1j * phase)
    out = np.where(np.abs(out.real) > 0.095, 1j * np.sign(out.imag + 1e-9) * mag, out)
    lam = np.concatenate([out, cluster])
    eps = rng.uniform(0.02, 0.25)
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    V = np.eye(n) + eps * G / np.sqrt(n)
    B = V @ np.diag(lam) @ np.linalg.inv(V)
    L0, L1 = 0.5 * S, S
    return B, lam, OUTLIER_REGION, S, L0, L1
