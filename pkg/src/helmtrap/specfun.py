"""Real-argument Bessel-family special functions used by the Helmholtz kernels.

Every kernel in this package reduces to cylinder functions of real positive
argument and order 0 or 1: the oscillatory family (J, Y) for real wavenumber,
and the modified family (I, K) for wavenumber on the imaginary axis.  The
evaluations are delegated to scipy.special (Cephes: power series for small
argument, rational/asymptotic expansions for large, with internal crossover);
this module adds the domain checks and the Hankel composition the rest of the
package relies on.  Accuracy is pinned by the test-suite oracle (independent
series / integral representations evaluated at extended precision) at 1e-12
absolute for x <= 1e3.

All functions accept scalars or numpy arrays.
"""

import numpy as np
import scipy.special as _sp

from .errors import DomainError

__all__ = [
    "bessel_j0", "bessel_j1", "bessel_y0", "bessel_y1",
    "bessel_k0", "bessel_k1", "bessel_i0", "bessel_i1",
    "hankel1",
]


def _check(x, positive: bool, name: str):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name}: non-finite argument")
    if positive:
        if np.any(x <= 0.0):
            raise DomainError(f"{name}: argument must be > 0")
    elif np.any(x < 0.0):
        raise DomainError(f"{name}: argument must be >= 0")
    return x if x.ndim else x[()]


def bessel_j0(x):
    """J_0(x) for x >= 0."""
    return _sp.j0(_check(x, False, "bessel_j0"))


def bessel_j1(x):
    """J_1(x) for x >= 0."""
    return _sp.j1(_check(x, False, "bessel_j1"))


def bessel_y0(x):
    """Y_0(x) for x > 0 (log-singular at 0)."""
    return _sp.y0(_check(x, True, "bessel_y0"))


def bessel_y1(x):
    """Y_1(x) for x > 0 (singular at 0)."""
    return _sp.y1(_check(x, True, "bessel_y1"))


def bessel_k0(x):
    """Modified K_0(x) for x > 0."""
    return _sp.k0(_check(x, True, "bessel_k0"))


def bessel_k1(x):
    """Modified K_1(x) for x > 0."""
    return _sp.k1(_check(x, True, "bessel_k1"))


def bessel_i0(x):
    """Modified I_0(x) for x >= 0."""
    return _sp.i0(_check(x, False, "bessel_i0"))


def bessel_i1(x):
    """Modified I_1(x) for x >= 0."""
    return _sp.i1(_check(x, False, "bessel_i1"))


def hankel1(order: int, x):
    """H^(1)_order(x) = J_order(x) + i Y_order(x), order in {0, 1}, x > 0.

    Composed exactly from the two real evaluations so that downstream code
    sees bit-identical real/imaginary parts to the J/Y functions.
    """
    if order == 0:
        x = _check(x, True, "hankel1")
        return _sp.j0(x) + 1j * _sp.y0(x)
    if order == 1:
        x = _check(x, True, "hankel1")
        return _sp.j1(x) + 1j * _sp.y1(x)
    raise DomainError(f"hankel1: unsupported order {order!r} (only 0 and 1)")
