"""Closed-form time-dependent coefficients of the driven damped exciton.

All functions accept ``t`` in fs as a scalar or numpy array and return the
rotating-frame envelopes; the global ``exp(-i*omega0*t)`` factor is left out
(see :func:`lab_phase`).  Scalars in give Python complex out.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from ._phi import pair_sum
from .params import HBAR_MEV_FS, SystemParams, theta_squared

POLE_COLLISION_TOL = 1e-9  # meV
POLE_SHIFT = 1e-7  # in units of gamma


def _natural_time(t):
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ValueError("time must be >= 0")
    return tt / HBAR_MEV_FS


def _out(x, like):
    if np.ndim(like) == 0:
        return complex(np.asarray(x).reshape(()))
    return x


def _theta_root(params: SystemParams) -> complex:
    return cmath.sqrt(theta_squared(params))


def _damped_sum(params, k, q, tau):
    """sum_pm r_pm * tau**k * phi_k((s_pm + i q) tau) for detuning q (meV)."""
    g = params.gamma
    x = (-0.5 * g + 1j * np.asarray(q)) * tau
    y = _theta_root(params) * tau
    return tau**k * pair_sum(k, x, y, 0.5 * g * tau)


def coeff_u(params: SystemParams, t):
    """Exciton survival amplitude u(t) (dimensionless)."""
    tau = _natural_time(t)
    return _out(_damped_sum(params, 0, 0.0, tau), t)


def coeff_b(params: SystemParams, t):
    """B(t) = w(t) exp(i delta t)."""
    tau = _natural_time(t)
    return _out(-1j * params.xi * _damped_sum(params, 1, params.delta, tau), t)


def coeff_w(params: SystemParams, t):
    """Drive-induced exciton amplitude w(t)."""
    tau = _natural_time(t)
    b = -1j * params.xi * _damped_sum(params, 1, params.delta, tau)
    return _out(b * np.exp(-1j * params.delta * tau), t)


def coeff_a(params: SystemParams, t):
    """A(t) = -i xi int_0^t w(t') exp(i delta t') dt', integrated in closed form."""
    tau = _natural_time(t)
    return _out(-params.xi**2 * _damped_sum(params, 2, params.delta, tau), t)


def coeff_u_j(params: SystemParams, omega_j, g_j, t):
    """Amplitude transferred into bath mode ``omega_j`` (coupling ``g_j``) from a unit exciton.

    ``omega_j``/``g_j`` may be arrays; with array ``t`` as well the result is
    shaped ``(len(t), n_modes)``.
    """
    tau, det, g_j = _mode_axes(params, omega_j, g_j, t)
    val = -1j * g_j * np.exp(-1j * det * tau) * _damped_sum(params, 1, det, tau)
    return _mode_out(val, omega_j, g_j, t)


def coeff_v_j(params: SystemParams, omega_j, g_j, t, *, return_regularized=False):
    """Drive-induced amplitude in bath mode ``omega_j``.

    Inverse Laplace transform of ``-i g_j w~(s)/(s + i(omega_j - omega0))``,
    split into partial fractions over the drive and mode poles.  Modes whose
    detuning coincides with the drive detuning (within
    ``POLE_COLLISION_TOL``) are shifted by ``POLE_SHIFT * gamma``; with
    ``return_regularized=True`` the boolean mask of shifted modes is returned
    alongside the value.
    """
    tau, det, g_j = _mode_axes(params, omega_j, g_j, t)
    dd = det - params.delta
    hit = np.abs(dd) < POLE_COLLISION_TOL
    if np.any(hit):
        det = np.where(hit, det + POLE_SHIFT * params.gamma, det)
        dd = det - params.delta
    drive = np.exp(-1j * params.delta * tau) * _damped_sum(params, 1, params.delta, tau)
    mode = np.exp(-1j * det * tau) * _damped_sum(params, 1, det, tau)
    val = 1j * g_j * params.xi / dd * (drive - mode)
    val = _mode_out(val, omega_j, g_j, t)
    if return_regularized:
        return val, (hit if np.ndim(hit) else bool(hit))
    return val


def _mode_axes(params, omega_j, g_j, t):
    tau = _natural_time(t)
    det = np.asarray(omega_j, dtype=float) - params.omega0
    g_j = np.asarray(g_j, dtype=float)
    if np.any(g_j < 0):
        raise ValueError("g_j must be >= 0")
    if tau.ndim and det.ndim:
        tau = tau[:, None]
    return tau, det, g_j


def _mode_out(val, omega_j, g_j, t):
    if np.ndim(t) == 0 and np.ndim(omega_j) == 0 and np.ndim(g_j) == 0:
        return complex(np.asarray(val).reshape(()))
    return val


def lab_phase(params: SystemParams, t):
    """The ``exp(-i omega0 t)`` factor that turns envelopes into lab-frame labels."""
    return np.exp(-1j * params.omega0 * _natural_time(t))


def coupling_g(omega_j, eta, gamma, omega0, n_atoms=1):
    """Collective Lorentzian coupling sqrt(N) * eta * gamma / sqrt((omega_j - omega0)**2 + gamma**2)."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    om = np.asarray(omega_j, dtype=float)
    g = np.sqrt(n_atoms) * eta * gamma / np.sqrt((om - omega0) ** 2 + gamma**2)
    return float(g) if g.ndim == 0 else g


def kernel_k(params: SystemParams, tau):
    """Bath memory kernel M*Gamma*exp(-Gamma |tau|) in meV**2 (tau in fs)."""
    tt = np.abs(np.asarray(tau, dtype=float)) / HBAR_MEV_FS
    val = params.m_coupling * params.gamma * np.exp(-params.gamma * tt) + 0j
    return _out(val, tau)


def steady_state_w(params: SystemParams) -> complex:
    """Envelope ``w_inf`` with ``w(t) -> w_inf * exp(-i delta t)`` once the transients decay.

    Equal to ``-i xi u~(-i delta)``: the closed-form ``w`` with the damped exponentials
    dropped, written in a form free of ``1/Theta``.
    """
    g, m, d = params.gamma, params.m_coupling, params.delta
    den = complex(m * g - d * d, -g * d)
    if den == 0:
        raise ValueError("undamped resonant drive (m_coupling=0, delta=0) has no steady state")
    return -1j * params.xi * complex(g, -d) / den


@dataclass(frozen=True)
class EvolutionCoefficients:
    t: float
    u: complex
    w: complex
    a_coef: complex
    b_coef: complex
    u_j: np.ndarray = field(repr=False)
    v_j: np.ndarray = field(repr=False)
    regularized_modes: tuple = ()


def evolution_coefficients(params: SystemParams, t: float, grid=None) -> EvolutionCoefficients:
    """All coefficients at a single time; per-mode arrays follow ``grid`` (a BathGrid) if given."""
    if grid is None:
        uj = vj = np.zeros(0, dtype=complex)
        reg = ()
    else:
        uj = coeff_u_j(params, grid.mode_energies, grid.couplings, t)
        vj, hit = coeff_v_j(params, grid.mode_energies, grid.couplings, t, return_regularized=True)
        reg = tuple(int(i) for i in np.flatnonzero(hit))
    return EvolutionCoefficients(
        t=float(t),
        u=coeff_u(params, t),
        w=coeff_w(params, t),
        a_coef=coeff_a(params, t),
        b_coef=coeff_b(params, t),
        u_j=np.asarray(uj),
        v_j=np.asarray(vj),
        regularized_modes=reg,
    )
