"""Observables of the driven exciton: populations, branch states, decoherence."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import (
    coeff_a,
    coeff_b,
    coeff_u,
    coeff_u_j,
    coeff_v_j,
    coeff_w,
    lab_phase,
)
from .params import HBAR_MEV_FS, SystemParams

_EQUAL_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class CatSpec:
    """Two-branch superposition ``c1|alpha1> + c2|alpha2>`` of the exciton."""

    c1: complex
    c2: complex
    alpha1: complex
    alpha2: complex

    def __post_init__(self):
        if self.c1 == 0 and self.c2 == 0:
            raise ValueError("CatSpec weights (c1, c2) must not both vanish")

    @classmethod
    def phase_shifted(cls, alpha: complex, dphi: float, c1: complex = 2**-0.5, c2: complex = 2**-0.5) -> "CatSpec":
        return cls(c1, c2, complex(alpha), complex(alpha) * cmath.exp(1j * dphi))

    @property
    def dphi(self) -> float:
        if abs(abs(self.alpha1) - abs(self.alpha2)) > _EQUAL_MODULUS_TOL:
            raise ValueError("phase shift is only defined when |alpha1| == |alpha2|")
        if self.alpha1 == 0:
            return 0.0
        return cmath.phase(self.alpha2 / self.alpha1)

    @property
    def distance(self) -> float:
        return cat_distance(self.alpha1, self.alpha2)


@dataclass(frozen=True)
class BranchState:
    prefactor_phase: complex
    exciton_label: complex
    field_labels: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DecoherenceReport:
    t: float
    f_complex: complex
    f_norm: float
    phi: float
    d_distance: float
    tau_d: float


def mean_number(params: SystemParams, alpha: complex, t, *, n0: float | None = None):
    """Mean exciton number starting from the coherent state ``|alpha>`` and vacuum bath.

    ``n0`` defaults to ``|alpha|**2``; pass it when ``alpha`` was derived from
    a given population so that ``n(0)`` reproduces it exactly.
    """
    u, w = coeff_u(params, t), coeff_w(params, t)
    if n0 is None:
        n0 = abs(alpha) ** 2
    elif not math.isclose(n0, abs(alpha) ** 2, rel_tol=1e-12):
        raise ValueError("n0 must equal |alpha|^2")
    cross = alpha * u * np.conj(w)
    val = n0 * np.abs(u) ** 2 + np.abs(w) ** 2 + 2.0 * np.real(cross)
    return float(val) if np.ndim(val) == 0 else val


def _branch(params, alpha, grid, t, full_phase):
    u, w = coeff_u(params, t), coeff_w(params, t)
    a, b = coeff_a(params, t), coeff_b(params, t)
    uj = coeff_u_j(params, grid.mode_energies, grid.couplings, t)
    vj = coeff_v_j(params, grid.mode_energies, grid.couplings, t)
    rot = complex(lab_phase(params, t)) if full_phase else 1.0
    return BranchState(
        prefactor_phase=cmath.exp(1j * (a + b * alpha).imag),
        exciton_label=(alpha * u + w) * rot,
        field_labels=(alpha * uj + vj) * rot,
    )


def evolve_product_state(params: SystemParams, alpha: complex, grid, t: float, *, full_phase: bool = False) -> BranchState:
    """State reached from ``|alpha> (x) |vacuum>``: coherent exciton and bath labels.

    Labels are rotating-frame envelopes unless ``full_phase`` is set, in
    which case the ``exp(-i omega0 t)`` factor is applied.
    """
    return _branch(params, complex(alpha), grid, t, full_phase)


def evolve_cat_state(params: SystemParams, cat: CatSpec, grid, t: float, *, full_phase: bool = False):
    return (
        _branch(params, cat.alpha1, grid, t, full_phase),
        _branch(params, cat.alpha2, grid, t, full_phase),
    )


def _log_factor(params, alpha1, alpha2, t):
    """Real and imaginary exponents of the decoherence factor."""
    u, w = coeff_u(params, t), coeff_w(params, t)
    loss = 1.0 - np.abs(u) ** 2
    overlap = (-0.5 * abs(alpha1) ** 2 - 0.5 * abs(alpha2) ** 2 + np.conj(alpha1) * alpha2) * loss
    drive = 0.5 * (alpha1 - alpha2) * u * np.conj(w)
    drive = drive - np.conj(drive)
    return overlap, drive


def decoherence_factor(params: SystemParams, alpha1: complex, alpha2: complex, t):
    """Coefficient of the off-diagonal element of the reduced exciton density matrix.

    ``exp[(-|a1|^2/2 - |a2|^2/2 + a1* a2)(1 - |u|^2)] * exp[(a1 - a2) u w*/2 - c.c.]``,
    attached to ``|branch 2><branch 1|`` (see :func:`oracle_decoherence_factor`
    for the matching overlap ordering).
    """
    overlap, drive = _log_factor(params, complex(alpha1), complex(alpha2), t)
    val = np.exp(overlap) * np.exp(drive)
    return complex(val) if np.ndim(val) == 0 else val


def decoherence_norm(params: SystemParams, alpha: complex, dphi: float, t, *, approximation: bool = False):
    """``|F|`` for the phase-shifted cat ``alpha, alpha*exp(i dphi)``.

    Exact: ``exp[-D^2 (1 - |u|^2)/2]`` with ``D = 2|alpha| sin(dphi/2)``.
    ``approximation=True`` instead returns the linear short-time law
    ``exp[-2|alpha|^2 sin^2(dphi/2) Gamma t]``.
    """
    d = cat_distance(alpha, alpha * cmath.exp(1j * dphi))
    if approximation:
        gt = params.gamma * np.asarray(t, dtype=float) / HBAR_MEV_FS
        val = np.exp(-2.0 * abs(alpha) ** 2 * math.sin(dphi / 2) ** 2 * gt)
    else:
        u = coeff_u(params, t)
        val = np.exp(-0.5 * d**2 * (1.0 - np.abs(u) ** 2))
    return float(val) if np.ndim(val) == 0 else val


def cat_distance(alpha1: complex, alpha2: complex) -> float:
    return abs(complex(alpha1) - complex(alpha2))


def decoherence_time(alpha: complex, dphi: float, gamma: float) -> float:
    """Decoherence time in fs: ``hbar / (2 |alpha|^2 Gamma sin^2(dphi/2))`` = ``2 tau_p / D^2``."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    s = math.sin(dphi / 2)
    n0 = abs(alpha) ** 2
    if n0 == 0 or s == 0:
        raise ValueError("branches coincide; no decoherence timescale")
    return HBAR_MEV_FS / (2.0 * n0 * gamma * s * s)


def phase_phi(params: SystemParams, alpha: complex, t):
    """Phase of the decoherence factor of the odd/even cat ``|alpha> +- |-alpha>``."""
    val = 2.0 * np.imag(alpha * coeff_u(params, t) * np.conj(coeff_w(params, t)))
    return float(val) if np.ndim(val) == 0 else val


def decoherence_report(params: SystemParams, cat: CatSpec, t: float) -> DecoherenceReport:
    overlap, drive = _log_factor(params, cat.alpha1, cat.alpha2, t)
    d = cat.distance
    tau = 2.0 * params.tau_p / d**2 if d > 0 else math.inf
    return DecoherenceReport(
        t=float(t),
        f_complex=complex(np.exp(overlap) * np.exp(drive)),
        f_norm=float(np.exp(np.real(overlap))),
        phi=float(np.imag(overlap) + np.imag(drive)),
        d_distance=d,
        tau_d=tau,
    )


def sum_rule_residual(params: SystemParams, alpha: complex, grid, t) -> float:
    """Norm deficit ``|alpha|^2 - [sum_j |alpha u_j + v_j|^2 + |alpha u + w|^2 + 2 Re(A + B alpha)]``.

    Vanishes for a complete bath; on a finite grid it measures the population
    carried by the truncated tails.
    """
    u, w = coeff_u(params, t), coeff_w(params, t)
    a, b = coeff_a(params, t), coeff_b(params, t)
    uj = coeff_u_j(params, grid.mode_energies, grid.couplings, t)
    vj = coeff_v_j(params, grid.mode_energies, grid.couplings, t)
    bath = np.sum(np.abs(alpha * uj + vj) ** 2, axis=-1)
    val = abs(alpha) ** 2 - (bath + np.abs(alpha * u + w) ** 2 + 2.0 * np.real(a + b * alpha))
    return float(val) if np.ndim(val) == 0 else val
