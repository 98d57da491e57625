"""Batched objective evaluations - the hot kernels of the estimator loops.

Every solver iteration evaluates the objective at a mini-batch of perturbed
points; at desk dimensions that work is dominated by Python/numpy dispatch
overhead, so the fixtures route their batch evaluations through the kernels
below.  Each kernel exists twice: ``*_nb`` (numba loop, compiled lazily) and
``*_np`` (vectorized numpy).  ``zominimax._backend`` decides which variant is
bound to the public name.

Conventions: ``P`` is an (n, d1) matrix of x-points, ``Q`` an (n, d2) matrix
of y-points, and the untouched block enters through precomputed quantities
(``by = B @ y``, ``btx = B.T @ x``, ``phi`` the x-only term) so the kernels
stay one-pass over the batch.
"""

import numpy as np

from ._backend import USING_NUMBA, njit_kernel


# -- numpy variants ---------------------------------------------------------

def quad_values_x_np(A, by, tail, P):
    # f(p, y) = 0.5 p'Ap + p.(By) - (tau/2)||y||^2 for each row p of P
    return 0.5 * np.einsum("ij,ij->i", P @ A, P) + P @ by - tail


def trig_values_x_np(a, by, tail, P):
    # f(p, y) = sum_j a_j cos(p_j) + p.(By) - (tau/2)||y||^2
    return np.cos(P) @ a + P @ by - tail


def sph_values_y_np(phi, btx, tau, Q):
    # f(x, q) = phi(x) + (B'x).q - (tau/2)||q||^2; shared by both fixtures
    return phi + Q @ btx - 0.5 * tau * np.einsum("ij,ij->i", Q, Q)


# -- numba variants (same arithmetic, explicit loops) ------------------------

def _quad_values_x_loop(A, by, tail, P):
    n, d = P.shape
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        lin = 0.0
        for j in range(d):
            row = 0.0
            for k in range(d):
                row += A[j, k] * P[i, k]
            acc += P[i, j] * row
            lin += P[i, j] * by[j]
        out[i] = 0.5 * acc + lin - tail
    return out


def _trig_values_x_loop(a, by, tail, P):
    n, d = P.shape
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += a[j] * np.cos(P[i, j]) + P[i, j] * by[j]
        out[i] = acc - tail
    return out


def _sph_values_y_loop(phi, btx, tau, Q):
    n, d = Q.shape
    out = np.empty(n)
    for i in range(n):
        lin = 0.0
        sq = 0.0
        for j in range(d):
            lin += btx[j] * Q[i, j]
            sq += Q[i, j] * Q[i, j]
        out[i] = phi + lin - 0.5 * tau * sq
    return out


quad_values_x_nb = njit_kernel(_quad_values_x_loop)
trig_values_x_nb = njit_kernel(_trig_values_x_loop)
sph_values_y_nb = njit_kernel(_sph_values_y_loop)

if USING_NUMBA:
    quad_values_x = quad_values_x_nb
    trig_values_x = trig_values_x_nb
    sph_values_y = sph_values_y_nb
else:
    quad_values_x = quad_values_x_np
    trig_values_x = trig_values_x_np
    sph_values_y = sph_values_y_np
