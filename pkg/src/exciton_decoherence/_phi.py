"""phi-functions of complex argument and their damped-pole-pair sums.

``phi_k(z) = sum_m z**m / (m + k)!`` so that ``phi_0 = exp``,
``phi_1(z) = (exp(z) - 1)/z`` and ``t**k * phi_k(a*t)`` is the k-fold
integral of ``exp(a*t)`` from 0.  Every closed-form coefficient of the model
is a weighted sum of these over the two poles ``-Gamma/2 +- i*Theta``.
"""
from __future__ import annotations

from math import comb, factorial

import numpy as np

_SERIES_RADIUS = 4.0
_SERIES_TERMS = 48
_PAIR_SERIES_LIMIT = 1e-4  # |Theta t| below which the pair sums use their Taylor form


def phi(k: int, z):
    z = np.asarray(z, dtype=complex)
    if k == 0:
        return np.exp(z)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    if np.any(small):
        zs = z[small]
        acc = np.full_like(zs, 1.0 / factorial(k + _SERIES_TERMS))
        for m in range(_SERIES_TERMS - 1, -1, -1):
            acc = acc * zs + 1.0 / factorial(k + m)
        out[small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        acc = np.exp(zb)
        for j in range(1, k + 1):
            acc = (acc - 1.0 / factorial(j - 1)) / zb
        out[big] = acc
    return out


def phi_deriv(k: int, m: int, z):
    """m-th derivative of phi_k."""
    if k == 0:
        return np.exp(np.asarray(z, dtype=complex))
    total = 0
    for i in range(m + 1):
        w = comb(m, i) * (-1) ** i * factorial(k + i - 1) / factorial(k - 1)
        total = total + w * phi(k + i, z)
    return total


def pair_sum(k: int, x, y, half_gt):
    """Sum over the two damped poles with the exciton residues.

    Returns ``r+ phi_k(x + i y) + r- phi_k(x - i y)`` with
    ``r+- = (1 -+ i*half_gt/y)/2``, written as the even combination
    ``E(y) + half_gt * O(y)`` where ``E`` is the mean and ``O`` the
    divided difference of ``phi_k`` across the pair.  Both are even in
    ``y`` so the sign of the square root is irrelevant, and the Taylor form
    takes over for ``|y|`` near zero (critical damping).
    """
    x, y, half_gt = np.broadcast_arrays(
        np.asarray(x, dtype=complex), np.asarray(y, dtype=complex), np.asarray(half_gt, dtype=complex)
    )
    even = np.empty(x.shape, dtype=complex)
    odd = np.empty(x.shape, dtype=complex)
    near = np.abs(y) < _PAIR_SERIES_LIMIT
    if np.any(near):
        xs, y2 = x[near], y[near] ** 2
        d = [phi_deriv(k, m, xs) for m in range(6)]
        even[near] = d[0] - y2 * d[2] / 2 + y2**2 * d[4] / 24
        odd[near] = d[1] - y2 * d[3] / 6 + y2**2 * d[5] / 120
    far = ~near
    if np.any(far):
        xf, yf = x[far], y[far]
        fp = phi(k, xf + 1j * yf)
        fm = phi(k, xf - 1j * yf)
        even[far] = 0.5 * (fp + fm)
        odd[far] = (fp - fm) / (2j * yf)
    return even + half_gt * odd
