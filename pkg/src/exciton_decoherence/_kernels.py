"""Fixed-step RK4 kernels for the oracle integrators.

Two implementations of each kernel: numba-compiled loops and a vectorized
numpy path.  Set ``EXCITON_DECOHERENCE_NO_NUMBA=1`` (or run without numba
installed) to select the numpy path.  Both take natural units (energies in
meV, times in 1/meV) and must agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_DISABLED = os.environ.get("EXCITON_DECOHERENCE_NO_NUMBA", "").strip() not in ("", "0")
HAVE_NUMBA = numba is not None and not NUMBA_DISABLED


# --------------------------------------------------------------------------
# driven exciton label coupled to a discrete bath
#   a'   = -i sum_j k_j b_j - i xi_drive exp(-i delta t)
#   b_j' = -i d_j b_j - i k_j a
#   c'   = -i xi_acc exp(i delta t) a
# --------------------------------------------------------------------------


def _bath_rk4_numpy(a0, b0, c0, kappa, detune, xi_drive, xi_acc, delta, dt, n_steps, stride, rec_idx):
    n_rec = n_steps // stride + 1
    a_rec = np.empty(n_rec, dtype=np.complex128)
    c_rec = np.empty(n_rec, dtype=np.complex128)
    b_rec = np.empty((n_rec, rec_idx.size), dtype=np.complex128)
    a, c = complex(a0), complex(c0)
    b = b0.astype(np.complex128).copy()
    mi_det = -1j * detune
    mi_kap = -1j * kappa

    def deriv(t, a, b):
        da = -1j * np.dot(kappa, b) - 1j * xi_drive * np.exp(-1j * delta * t)
        db = mi_det * b + mi_kap * a
        dc = -1j * xi_acc * np.exp(1j * delta * t) * a
        return da, db, dc

    a_rec[0], c_rec[0], b_rec[0] = a, c, b[rec_idx]
    r = 1
    h2 = 0.5 * dt
    for n in range(n_steps):
        t = n * dt
        ka1, kb1, kc1 = deriv(t, a, b)
        ka2, kb2, kc2 = deriv(t + h2, a + h2 * ka1, b + h2 * kb1)
        ka3, kb3, kc3 = deriv(t + h2, a + h2 * ka2, b + h2 * kb2)
        ka4, kb4, kc4 = deriv(t + dt, a + dt * ka3, b + dt * kb3)
        a = a + dt / 6.0 * (ka1 + 2 * ka2 + 2 * ka3 + ka4)
        b = b + dt / 6.0 * (kb1 + 2 * kb2 + 2 * kb3 + kb4)
        c = c + dt / 6.0 * (kc1 + 2 * kc2 + 2 * kc3 + kc4)
        if (n + 1) % stride == 0:
            a_rec[r], c_rec[r], b_rec[r] = a, c, b[rec_idx]
            r += 1
            if abs(a) > 1e6:
                raise FloatingPointError(f"bath integration diverged at step {n + 1} (|label|={abs(a):.3g})")
    return a_rec, b_rec, c_rec


def _bath_rk4_loops(a0, b0, c0, kappa, detune, xi_drive, xi_acc, delta, dt, n_steps, stride, rec_idx):
    nm = kappa.size
    n_rec = n_steps // stride + 1
    a_rec = np.empty(n_rec, dtype=np.complex128)
    c_rec = np.empty(n_rec, dtype=np.complex128)
    b_rec = np.empty((n_rec, rec_idx.size), dtype=np.complex128)
    b = np.empty(nm, dtype=np.complex128)
    for j in range(nm):
        b[j] = b0[j]
    kb1 = np.empty(nm, dtype=np.complex128)
    kb2 = np.empty(nm, dtype=np.complex128)
    kb3 = np.empty(nm, dtype=np.complex128)
    kb4 = np.empty(nm, dtype=np.complex128)
    a = a0 + 0j
    c = c0 + 0j
    a_rec[0] = a
    c_rec[0] = c
    for i in range(rec_idx.size):
        b_rec[0, i] = b[rec_idx[i]]
    mi = -1j
    h2 = 0.5 * dt
    r = 1
    for n in range(n_steps):
        t = n * dt
        # stage 1
        s = 0j
        for j in range(nm):
            s += kappa[j] * b[j]
            kb1[j] = mi * (detune[j] * b[j] + kappa[j] * a)
        ka1 = mi * s + mi * xi_drive * np.exp(mi * delta * t)
        kc1 = mi * xi_acc * np.exp(1j * delta * t) * a
        # stage 2
        a2 = a + h2 * ka1
        s = 0j
        for j in range(nm):
            bj = b[j] + h2 * kb1[j]
            s += kappa[j] * bj
            kb2[j] = mi * (detune[j] * bj + kappa[j] * a2)
        ka2 = mi * s + mi * xi_drive * np.exp(mi * delta * (t + h2))
        kc2 = mi * xi_acc * np.exp(1j * delta * (t + h2)) * a2
        # stage 3
        a3 = a + h2 * ka2
        s = 0j
        for j in range(nm):
            bj = b[j] + h2 * kb2[j]
            s += kappa[j] * bj
            kb3[j] = mi * (detune[j] * bj + kappa[j] * a3)
        ka3 = mi * s + mi * xi_drive * np.exp(mi * delta * (t + h2))
        kc3 = mi * xi_acc * np.exp(1j * delta * (t + h2)) * a3
        # stage 4
        a4 = a + dt * ka3
        s = 0j
        for j in range(nm):
            bj = b[j] + dt * kb3[j]
            s += kappa[j] * bj
            kb4[j] = mi * (detune[j] * bj + kappa[j] * a4)
        ka4 = mi * s + mi * xi_drive * np.exp(mi * delta * (t + dt))
        kc4 = mi * xi_acc * np.exp(1j * delta * (t + dt)) * a4

        a = a + dt / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        c = c + dt / 6.0 * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4)
        for j in range(nm):
            b[j] = b[j] + dt / 6.0 * (kb1[j] + 2.0 * kb2[j] + 2.0 * kb3[j] + kb4[j])
        if (n + 1) % stride == 0:
            a_rec[r] = a
            c_rec[r] = c
            for i in range(rec_idx.size):
                b_rec[r, i] = b[rec_idx[i]]
            r += 1
            if abs(a) > 1e6:
                return a_rec, b_rec, c_rec, n + 1
    return a_rec, b_rec, c_rec, -1


# --------------------------------------------------------------------------
# continuum exciton with exponential memory kernel m_g * exp(-g |t|)
# state: u, I_u, w, I_w, A, B with I_x = int_0^t K(t-s) x(s) ds
# --------------------------------------------------------------------------


def _volterra_deriv(t, y, mg, g, xi, delta):
    out = np.empty(6, dtype=np.complex128)
    ed = np.exp(1j * delta * t)
    out[0] = -y[1]
    out[1] = mg * y[0] - g * y[1]
    out[2] = -y[3] - 1j * xi / ed
    out[3] = mg * y[2] - g * y[3]
    out[4] = -1j * xi * ed * y[2]
    out[5] = -1j * xi * ed * y[0]
    return out


def _volterra_rk4_impl(y0, mg, g, xi, delta, dt, n_steps, stride):
    n_rec = n_steps // stride + 1
    rec = np.empty((n_rec, 6), dtype=np.complex128)
    y = y0.copy()
    rec[0] = y
    h2 = 0.5 * dt
    r = 1
    for n in range(n_steps):
        t = n * dt
        k1 = _volterra_deriv(t, y, mg, g, xi, delta)
        k2 = _volterra_deriv(t + h2, y + h2 * k1, mg, g, xi, delta)
        k3 = _volterra_deriv(t + h2, y + h2 * k2, mg, g, xi, delta)
        k4 = _volterra_deriv(t + dt, y + dt * k3, mg, g, xi, delta)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (n + 1) % stride == 0:
            rec[r] = y
            r += 1
    return rec


def _volterra_rk4_numpy(y0, mg, g, xi, delta, dt, n_steps, stride):
    # the same stepper as a 6x6 affine map: y' = L y + f(t)
    lin = np.zeros((6, 6), dtype=np.complex128)
    lin[0, 1] = -1
    lin[1, 0], lin[1, 1] = mg, -g
    lin[2, 3] = -1
    lin[3, 2], lin[3, 3] = mg, -g
    drive = np.array([0, 0, -1j * xi, 0, 0, 0], dtype=np.complex128)
    acc = np.zeros((6, 6), dtype=np.complex128)
    acc[4, 2] = acc[5, 0] = -1j * xi

    def deriv(t, y):
        ed = np.exp(1j * delta * t)
        return lin @ y + drive / ed + ed * (acc @ y)

    n_rec = n_steps // stride + 1
    rec = np.empty((n_rec, 6), dtype=np.complex128)
    y = y0.astype(np.complex128).copy()
    rec[0] = y
    h2 = 0.5 * dt
    r = 1
    for n in range(n_steps):
        t = n * dt
        k1 = deriv(t, y)
        k2 = deriv(t + h2, y + h2 * k1)
        k3 = deriv(t + h2, y + h2 * k2)
        k4 = deriv(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (n + 1) % stride == 0:
            rec[r] = y
            r += 1
    return rec


if HAVE_NUMBA:
    _bath_rk4_jit = numba.njit(cache=True)(_bath_rk4_loops)
    _volterra_deriv = numba.njit(cache=True)(_volterra_deriv)
    _volterra_rk4_jit = numba.njit(cache=True)(_volterra_rk4_impl)


def bath_rk4(a0, b0, c0, kappa, detune, xi_drive, xi_acc, delta, dt, n_steps, stride, rec_idx, *, backend=None):
    """Integrate the label/bath/accumulator system; returns recorded (a, b[:, rec_idx], c)."""
    backend = backend or ("numba" if HAVE_NUMBA else "numpy")
    kappa = np.ascontiguousarray(kappa, dtype=np.float64)
    detune = np.ascontiguousarray(detune, dtype=np.float64)
    b0 = np.ascontiguousarray(b0, dtype=np.complex128)
    rec_idx = np.ascontiguousarray(rec_idx, dtype=np.int64)
    args = (complex(a0), b0, complex(c0), kappa, detune, float(xi_drive), float(xi_acc),
            float(delta), float(dt), int(n_steps), int(stride), rec_idx)
    if backend == "numpy":
        return _bath_rk4_numpy(*args)
    if backend != "numba":
        raise ValueError(f"unknown backend {backend!r}")
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    a_rec, b_rec, c_rec, bad = _bath_rk4_jit(*args)
    if bad >= 0:
        raise FloatingPointError(f"bath integration diverged at step {bad}")
    return a_rec, b_rec, c_rec


def volterra_rk4(y0, mg, g, xi, delta, dt, n_steps, stride, *, backend=None):
    backend = backend or ("numba" if HAVE_NUMBA else "numpy")
    y0 = np.ascontiguousarray(y0, dtype=np.complex128)
    args = (y0, float(mg), float(g), float(xi), float(delta), float(dt), int(n_steps), int(stride))
    if backend == "numpy":
        return _volterra_rk4_numpy(*args)
    if backend != "numba":
        raise ValueError(f"unknown backend {backend!r}")
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    return _volterra_rk4_jit(*args)
