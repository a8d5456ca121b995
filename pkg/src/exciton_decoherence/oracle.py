"""Brute-force reference solutions used to check the closed forms.

Two independent routes:

* a discretized Lorentzian bath (``BathGrid``) whose mode equations are
  integrated with fixed-step RK4 in the frame rotating at ``omega0``;
* the continuum memory equation ``u' = -int_0^t K(t-s) u(s) ds`` with the
  exponential kernel, whose memory integral is carried as an extra state.

Nothing here calls into :mod:`exciton_decoherence.coefficients`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .params import HBAR_MEV_FS, ParameterWarning, SystemParams, theta_squared

DEFAULT_J = 4001
DEFAULT_W_MULT = 50.0
DEFAULT_DT_RULE = 0.01
MAX_STEPS = 10**6


@dataclass(frozen=True)
class BathGrid:
    """Equally spaced bath modes symmetric about ``omega0``.

    ``couplings[j]**2 = (M Gamma**2/pi) d_omega / ((omega_j - omega0)**2 + Gamma**2)``,
    so that the sum over modes approximates the Lorentzian memory kernel.
    """

    j_count: int
    window: float
    omega0: float
    mode_energies: np.ndarray = field(repr=False)
    couplings: np.ndarray = field(repr=False)

    @property
    def d_omega(self) -> float:
        return 2.0 * self.window / (self.j_count - 1)

    @property
    def detunings(self) -> np.ndarray:
        return self.mode_energies - self.omega0

    @property
    def center(self) -> int:
        return (self.j_count - 1) // 2

    def kernel(self, tau_fs):
        """Discrete-bath estimate of the memory kernel at lag ``tau_fs``."""
        tau = np.asarray(tau_fs, dtype=float)[..., None] / HBAR_MEV_FS
        return np.sum(self.couplings**2 * np.exp(-1j * self.detunings * tau), axis=-1)


def build_bath_grid(params: SystemParams, j_count: int = DEFAULT_J, window: float | None = None) -> BathGrid:
    g = params.gamma
    if window is None:
        window = DEFAULT_W_MULT * g
    if j_count % 2 == 0 or j_count < 101:
        raise ValueError(f"j_count must be odd and >= 101, got {j_count} (try {max(101, j_count + 1 | 1)})")
    if window < 20 * g * (1 - 1e-12):
        raise ValueError(f"window must be >= 20*gamma = {20 * g} meV, got {window} (use --grid-w-mult >= 20)")
    d_omega = 2.0 * window / (j_count - 1)
    if d_omega >= g / 10:
        warnings.warn(
            f"grid spacing {d_omega:.4g} meV does not resolve the Lorentzian (need < gamma/10 = {g / 10:.4g}); "
            f"use j_count >= {(int(20 * window / g) + 2) | 1}",
            ParameterWarning,
            stacklevel=2,
        )
    det = (np.arange(j_count) - (j_count - 1) / 2) * d_omega
    kappa = np.sqrt(params.m_coupling * g**2 / math.pi * d_omega / (det**2 + g**2))
    return BathGrid(int(j_count), float(window), params.omega0, params.omega0 + det, kappa)


@dataclass
class OracleRun:
    times: np.ndarray
    step_size: float
    method: str
    u_path: np.ndarray | None = None
    w_path: np.ndarray | None = None
    a_path: np.ndarray | None = None
    b_path: np.ndarray | None = None
    uj_path: np.ndarray | None = None
    vj_path: np.ndarray | None = None
    label_path: np.ndarray | None = None
    field_path: np.ndarray | None = None
    acc_path: np.ndarray | None = None
    mode_indices: np.ndarray | None = None
    grid: BathGrid | None = None

    def path(self, name: str) -> np.ndarray:
        val = getattr(self, f"{name}_path", None)
        if val is None:
            raise KeyError(f"run {self.method!r} has no {name!r} path")
        return val


def max_step(params: SystemParams, grid: BathGrid | None = None, rule: float = DEFAULT_DT_RULE) -> float:
    """Largest admissible RK4 step in fs: ``rule * hbar / max(W, Gamma, |Theta|, |delta|)``."""
    rates = [params.gamma, math.sqrt(abs(theta_squared(params)))]
    if grid is not None:
        rates += [grid.window, abs(params.delta)]
    return rule * HBAR_MEV_FS / max(rates)


def volterra_step(params: SystemParams, rule: float = DEFAULT_DT_RULE) -> float:
    """Default Volterra step: also resolves the drive phase and the xi-scaled accumulators."""
    rates = [params.gamma, math.sqrt(abs(theta_squared(params))), abs(params.delta), params.xi]
    return rule * HBAR_MEV_FS / max(rates)


def _schedule(t_end, dt, dt_max, n_samples):
    if dt > dt_max * (1 + 1e-12):
        raise ValueError(f"step {dt:.6g} fs exceeds the stability bound {dt_max:.6g} fs")
    if t_end <= 0:
        raise ValueError("t_end must be > 0")
    if t_end > MAX_STEPS * dt:
        raise ValueError(f"t_end/dt = {t_end / dt:.3g} exceeds {MAX_STEPS} steps")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    intervals = n_samples - 1
    stride = max(1, math.ceil(t_end / dt / intervals - 1e-9))
    n_steps = stride * intervals
    return t_end / n_steps, n_steps, stride


def integrate_mode_equations(
    params: SystemParams,
    grid: BathGrid,
    mode: str,
    t_end: float,
    dt: float | None = None,
    *,
    alpha: complex = 1.0,
    n_samples: int = 101,
    record_modes=None,
    backend: str | None = None,
) -> OracleRun:
    """Integrate the coherent-label equations of the exciton plus discrete bath.

    ``mode`` selects the initial condition: ``"coefficient_u"`` starts from a
    unit exciton label with the drive switched off (recovering ``u``,
    ``u_j`` and ``B``); ``"coefficient_w"`` starts from vacuum with the drive
    on (``w``, ``v_j``, ``A``); ``"branch"`` starts from label ``alpha`` with
    the drive on, and its accumulator path holds ``A + B*alpha``.
    """
    if mode not in ("coefficient_u", "coefficient_w", "branch"):
        raise ValueError(f"unknown mode {mode!r}")
    dt_max = max_step(params, grid)
    dt = dt_max if dt is None else dt
    h, n_steps, stride = _schedule(t_end, dt, dt_max, n_samples)
    idx = np.arange(grid.j_count) if record_modes is None else np.atleast_1d(np.asarray(record_modes, dtype=np.int64))
    a0 = {"coefficient_u": 1.0, "coefficient_w": 0.0, "branch": alpha}[mode]
    xi_drive = 0.0 if mode == "coefficient_u" else params.xi
    lab, fld, acc = _kernels.bath_rk4(
        a0, np.zeros(grid.j_count, dtype=complex), 0.0, grid.couplings, grid.detunings,
        xi_drive, params.xi, params.delta, h / HBAR_MEV_FS, n_steps, stride, idx, backend=backend,
    )
    run = OracleRun(
        times=np.arange(n_samples) * (stride * h), step_size=h, method=f"rk4-modes/{mode}",
        label_path=lab, field_path=fld, acc_path=acc, mode_indices=idx, grid=grid,
    )
    if mode == "coefficient_u":
        run.u_path, run.uj_path, run.b_path = lab, fld, acc
    elif mode == "coefficient_w":
        run.w_path, run.vj_path, run.a_path = lab, fld, acc
    return run


def integrate_coefficient_odes(
    params: SystemParams,
    grid: BathGrid,
    t_end: float,
    dt: float | None = None,
    *,
    n_samples: int = 101,
    record_modes=None,
    backend: str | None = None,
) -> OracleRun:
    """Integrate the coupled equations for A, B, C, D, C_j, E_j on the grid.

    In the frame rotating at ``omega0`` the system separates into the
    undriven family ``(1 + D, C_j, B)`` and the driven family
    ``(C, E_j, A)``; the run stores them as the envelopes
    ``u, u_j, b`` and ``w, v_j, a``.  Use :func:`lab_frame` for the
    lab-frame coefficients themselves.
    """
    ru = integrate_mode_equations(params, grid, "coefficient_u", t_end, dt, n_samples=n_samples,
                                  record_modes=record_modes, backend=backend)
    rw = integrate_mode_equations(params, grid, "coefficient_w", t_end, dt, n_samples=n_samples,
                                  record_modes=record_modes, backend=backend)
    return OracleRun(
        times=ru.times, step_size=ru.step_size, method="rk4-coefficient-odes",
        u_path=ru.u_path, uj_path=ru.uj_path, b_path=ru.b_path,
        w_path=rw.w_path, vj_path=rw.vj_path, a_path=rw.a_path,
        mode_indices=ru.mode_indices, grid=grid,
    )


def lab_frame(run: OracleRun, params: SystemParams) -> dict:
    """Map stored envelopes to the normally ordered coefficients A, B, C, D, C_j, E_j."""
    rot = np.exp(-1j * params.omega0 * run.times / HBAR_MEV_FS)
    return {
        "A": run.a_path,
        "B": run.b_path,
        "C": run.w_path * rot,
        "D": run.u_path * rot - 1.0,
        "C_j": run.uj_path * rot[:, None],
        "E_j": run.vj_path * rot[:, None],
    }


def sum_rule_path(run: OracleRun, alpha: complex) -> np.ndarray:
    """``|alpha|^2`` minus the bath, exciton and prefactor norms along a coefficient-ODE run."""
    if run.mode_indices is None or run.mode_indices.size != run.grid.j_count:
        raise ValueError("sum rule needs every bath mode recorded")
    field = np.sum(np.abs(alpha * run.uj_path + run.vj_path) ** 2, axis=1)
    exciton = np.abs(alpha * run.u_path + run.w_path) ** 2
    pref = 2.0 * np.real(run.a_path + run.b_path * alpha)
    return abs(alpha) ** 2 - (field + exciton + pref)


def solve_volterra_u(
    params: SystemParams,
    t_end: float,
    dt: float | None = None,
    *,
    n_samples: int = 101,
    rule: float = DEFAULT_DT_RULE,
    backend: str | None = None,
) -> OracleRun:
    """Solve ``u' = -int_0^t K(t-s) u(s) ds``, ``u(0) = 1`` with ``K = M Gamma exp(-Gamma |t|)``.

    Because the kernel is a single exponential the memory integral
    ``I(t) = int_0^t K(t-s) u(s) ds`` obeys ``I' = M Gamma u - Gamma I``, so it is
    advanced with the same RK4 step as ``u`` at O(1) cost.  The driven
    amplitude ``w`` (same memory, plus the drive) and the accumulators ``A``
    and ``B`` ride along in the same state vector.  Without ``dt`` the step
    is :func:`volterra_step` at ``rule``; an explicit ``dt`` must satisfy
    ``dt <= 0.01 hbar / max(Gamma, |Theta|)``.
    """
    dt_max = max_step(params)
    dt = volterra_step(params, rule) if dt is None else dt
    h, n_steps, stride = _schedule(t_end, dt, dt_max, n_samples)
    y0 = np.array([1, 0, 0, 0, 0, 0], dtype=complex)
    rec = _kernels.volterra_rk4(
        y0, params.m_coupling * params.gamma, params.gamma, params.xi, params.delta,
        h / HBAR_MEV_FS, n_steps, stride, backend=backend,
    )
    return OracleRun(
        times=np.arange(n_samples) * (stride * h), step_size=h, method="rk4-volterra",
        u_path=rec[:, 0], w_path=rec[:, 2], a_path=rec[:, 4], b_path=rec[:, 5],
    )


def oracle_decoherence_path(params, grid, cat, t_end, dt=None, *, n_samples=101, backend=None):
    """Decoherence factor from evolving both cat branches on the grid.

    Returns ``(times, F)`` with ``F = P1* P2 <fields_1|fields_2>``, where
    ``P_k`` is the unit-modulus prefactor accumulated by branch k.
    """
    runs = [
        integrate_mode_equations(params, grid, "branch", t_end, dt, alpha=a, n_samples=n_samples, backend=backend)
        for a in (cat.alpha1, cat.alpha2)
    ]
    x, y = runs[0].field_path, runs[1].field_path
    expo = -0.5 * np.sum(np.abs(x - y) ** 2, axis=1) + 1j * np.imag(np.sum(np.conj(x) * y, axis=1))
    phase = np.imag(runs[1].acc_path) - np.imag(runs[0].acc_path)
    return runs[0].times, np.exp(expo + 1j * phase)


def oracle_decoherence_factor(params, grid, cat, t, dt=None, *, backend=None) -> complex:
    if t == 0:
        return 1.0 + 0j
    _, f = oracle_decoherence_path(params, grid, cat, t, dt, n_samples=2, backend=backend)
    return complex(f[-1])


@dataclass
class ComparisonReport:
    name: str
    errors: dict
    tolerances: dict
    t_range: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.errors[k]["max_abs_error"] <= tol for k, tol in self.tolerances.items())

    def failing(self) -> list:
        return [k for k, tol in self.tolerances.items() if not self.errors[k]["max_abs_error"] <= tol]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "t_range_fs": list(self.t_range),
            "tolerances": dict(self.tolerances),
            "errors": self.errors,
            "metadata": self.metadata,
        }


def compare_runs(
    analytic_sampler: Callable[[np.ndarray], Mapping] | Mapping,
    oracle_run: OracleRun | Mapping,
    tolerances: Mapping[str, float],
    *,
    name: str = "comparison",
    metadata: dict | None = None,
) -> ComparisonReport:
    """Max absolute / relative error of each named path against a reference.

    ``analytic_sampler`` is either a callable mapping the oracle's time grid
    to ``{name: values}`` or an already sampled mapping that includes its own
    ``"times"``; the latter must coincide with the oracle's grid.
    """
    if isinstance(oracle_run, OracleRun):
        times = oracle_run.times
        get = oracle_run.path
    else:
        times = np.asarray(oracle_run["times"])
        get = lambda k: np.asarray(oracle_run[k])  # noqa: E731
    if callable(analytic_sampler):
        ref = analytic_sampler(times)
    else:
        ref = analytic_sampler
        rt = np.asarray(ref["times"])
        if rt.shape != times.shape or not np.allclose(rt, times, rtol=1e-12, atol=1e-9):
            raise ValueError("analytic and oracle time grids are misaligned")
    errors = {}
    for key in tolerances:
        o = np.asarray(get(key))
        a = np.asarray(ref[key])
        if a.shape != o.shape:
            raise ValueError(f"{key}: analytic shape {a.shape} != oracle shape {o.shape}")
        diff = float(np.max(np.abs(a - o))) if a.size else 0.0
        scale = float(np.max(np.abs(a))) if a.size else 0.0
        errors[key] = {"max_abs_error": diff, "max_rel_error": diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)}
    t_range = (float(times[0]), float(times[-1])) if len(times) else (0.0, 0.0)
    return ComparisonReport(name, errors, dict(tolerances), t_range, dict(metadata or {}))
