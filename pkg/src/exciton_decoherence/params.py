"""Physical parameters of the driven exciton / quasimode model.

Energies are in meV and times in fs.  Wherever a frequency multiplies a
time, the product is taken as ``E * t / HBAR``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

HBAR_MEV_FS = 658.2119569  # meV * fs


@dataclass(frozen=True)
class UnitSystem:
    hbar_mev_fs: float = HBAR_MEV_FS

    def to_natural(self, t_fs):
        """Time in fs -> time in 1/meV."""
        return t_fs / self.hbar_mev_fs

    def to_fs(self, t_natural):
        return t_natural * self.hbar_mev_fs


UNITS = UnitSystem()


class ParameterWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SystemParams:
    """Constants of the bosonized model, all as energies in meV.

    Attributes
    ----------
    omega0 : transition energy of the exciton.
    gamma : decay rate of the cavity quasimode.
    m_coupling : collective coupling strength ``M``.
    xi : collective drive amplitude.
    delta : detuning of the drive from ``omega0``.
    """

    omega0: float = 1500.0
    gamma: float = 0.05
    m_coupling: float = 20.0
    xi: float = 10.0
    delta: float = 0.1

    def __post_init__(self):
        for name in ("omega0", "gamma", "m_coupling", "xi", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"SystemParams.{name} must be finite, got {v!r}")
        if self.gamma <= 0:
            raise ValueError(f"SystemParams.gamma must be > 0, got {self.gamma!r}")
        if self.m_coupling < 0:
            raise ValueError(f"SystemParams.m_coupling must be >= 0, got {self.m_coupling!r}")
        if self.xi < 0:
            raise ValueError(f"SystemParams.xi must be >= 0, got {self.xi!r}")
        if self.omega0 <= 0:
            raise ValueError(f"SystemParams.omega0 must be > 0, got {self.omega0!r}")
        if self.omega0 < 10 * self.gamma:
            warnings.warn(
                f"omega0={self.omega0} meV is not much larger than gamma={self.gamma} meV; "
                "the Lorentzian kernel assumes omega0 >> gamma",
                ParameterWarning,
                stacklevel=3,
            )

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def tau_p(self) -> float:
        """Quasimode lifetime hbar/gamma in fs."""
        return HBAR_MEV_FS / self.gamma

    def time_fs(self, gamma_t):
        """Convert a dimensionless time in units of 1/gamma to fs."""
        return gamma_t * self.tau_p


FIG1 = SystemParams(gamma=0.05, m_coupling=20.0, xi=10.0, delta=0.1)
FIG2 = SystemParams(gamma=20.0, m_coupling=20.0, xi=10.0, delta=0.0)
FIG2_VARIANTS = {
    "a": ((0.0, 5.0), (0.0, 10.0)),
    "b": ((0.5, 10.0),),
    "c": ((1.0, 10.0),),
}


@dataclass(frozen=True)
class ComplexRate:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("ComplexRate components must be finite")

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self):
        return abs(complex(self))


def theta_squared(params: SystemParams) -> float:
    """``M*Gamma - (Gamma/2)**2``; negative in the overdamped regime."""
    return params.m_coupling * params.gamma - 0.25 * params.gamma**2


def theta(params: SystemParams) -> ComplexRate:
    """Oscillation rate of the damped exciton amplitude (principal root)."""
    th = cmath.sqrt(theta_squared(params))
    return ComplexRate(th.real, th.imag)
