"""Exponential integrators for small dense linear systems.

Shared by the realization validator and the spectral reference solver.
The phi matrices follow the usual convention

    phi_0(A) = expm(A),   phi_{k+1}(z) = (phi_k(z) - 1/k!) / z,

computed in one shot through the augmented-matrix trick, which stays
accurate for singular or nearly singular arguments.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

__all__ = ["phi_matrices", "exp_march_linear", "simpson_weights"]


def phi_matrices(a: np.ndarray, order: int) -> list[np.ndarray]:
    """Return [expm(a), phi_1(a), ..., phi_order(a)] for a square matrix."""
    d = a.shape[0]
    size = d * (order + 1)
    aug = np.zeros((size, size), dtype=np.promote_types(a.dtype, float))
    aug[:d, :d] = a
    for j in range(order):
        aug[j * d:(j + 1) * d, (j + 1) * d:(j + 2) * d] = np.eye(d)
    e = expm(aug)
    return [e[:d, j * d:(j + 1) * d] for j in range(order + 1)]


def exp_march_linear(a: np.ndarray, b: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
    """March x' = a x + b u(t) from x=0 with piecewise-linear forcing samples.

    ``u`` has shape (n, m); returns the state history with shape (n, d).
    Exact for the homogeneous part; local error O(h^3) from interpolating u.
    """
    d = a.shape[0]
    n = u.shape[0]
    out = np.zeros((n, d), dtype=np.promote_types(np.asarray(u).dtype, a.dtype))
    if d == 0 or n == 0:
        return out
    e, p1, p2 = phi_matrices(h * a, 2)
    w_prev = h * (p1 - p2) @ b
    w_next = h * p2 @ b
    x = out[0]
    for k in range(n - 1):
        x = e @ x + w_prev @ u[k] + w_next @ u[k + 1]
        out[k + 1] = x
    return out


def simpson_weights(a: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Propagator and forcing weights for one step of x' = a x + g(t).

    Returns (E, W0, Wm, W1) such that

        x(t+h) = E x(t) + W0 g(t) + Wm g(t+h/2) + W1 g(t+h)

    is exact when g is a quadratic polynomial on the step (degenerates to
    the Simpson rule for a = 0).
    """
    e, p1, p2, p3 = phi_matrices(h * a, 3)
    w0 = h * (p1 - 3.0 * p2 + 4.0 * p3)
    wm = h * (4.0 * p2 - 8.0 * p3)
    w1 = h * (4.0 * p3 - p2)
    return e, w0, wm, w1
