"""System parameters and mean-field equations of motion.

A single cavity mode is coupled to the uniform magnon mode of a magnetic
sphere with strength g_m.  The cavity is pumped by a two-photon (parametric)
drive of strength omega_drive and the magnon mode carries a Kerr nonlinearity
whose sign is set by the crystal orientation and whose magnitude only fixes
the scale of the condensed amplitude.

All rates and detunings are quoted in a common frequency unit; the reference
configurations set the cavity decay kappa_a to one so that every other number
reads directly in cavity linewidths.  In the frame rotating at half the drive
frequency the mean-field equations for the coherent amplitudes A (cavity) and
M (magnon) are

    dA/dt = -i (delta_a - i kappa_a) A - i g_m M - i omega_drive conj(A)
    dM/dt = -i (delta_m + kerr |M|^2 - i gamma_m) M - i g_m A

with kerr = kerr_sign * kerr_magnitude.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import DegenerateDenominator

EPS_DEN_DEFAULT = 1e-9


class KerrSign(enum.Enum):
    """Sign of the magnon Kerr coefficient."""

    POSITIVE = 1
    NEGATIVE = -1

    @classmethod
    def from_symbol(cls, symbol: str) -> "KerrSign":
        table = {
            "+": cls.POSITIVE,
            "pos": cls.POSITIVE,
            "positive": cls.POSITIVE,
            "-": cls.NEGATIVE,
            "neg": cls.NEGATIVE,
            "negative": cls.NEGATIVE,
        }
        try:
            return table[symbol.strip().lower()]
        except KeyError:
            raise ValueError(f"unrecognized Kerr sign {symbol!r}") from None

    @property
    def symbol(self) -> str:
        return "+" if self is KerrSign.POSITIVE else "-"


@dataclass(frozen=True)
class SystemParams:
    """Static parameters of the driven cavity-magnon pair.

    delta_a, delta_m    cavity and magnon detunings, both strictly positive
    kappa_a, gamma_m    cavity and magnon amplitude decay rates
    g_m                 beam-splitter coupling between the modes
    kerr_sign           orientation-controlled sign of the Kerr term
    kerr_magnitude      absolute Kerr coefficient, scales |M|^2 but not the
                        phase boundaries
    omega_drive         parametric drive strength
    nbar_a, nbar_m      thermal occupations of the input noise
    """

    delta_a: float
    delta_m: float
    gamma_m: float
    g_m: float
    kerr_sign: KerrSign
    kerr_magnitude: float = 1.0
    omega_drive: float = 0.0
    kappa_a: float = 1.0
    nbar_a: float = 0.0
    nbar_m: float = 0.0

    def __post_init__(self) -> None:
        if not self.delta_a > 0:
            raise ValueError("delta_a must be positive")
        if not self.delta_m > 0:
            raise ValueError("delta_m must be positive")
        if not self.kappa_a > 0:
            raise ValueError("kappa_a must be positive")
        if not self.gamma_m > 0:
            raise ValueError("gamma_m must be positive")
        if self.g_m < 0:
            raise ValueError("g_m must be non-negative")
        if not self.kerr_magnitude > 0:
            raise ValueError("kerr_magnitude must be positive")
        if self.omega_drive < 0:
            raise ValueError("omega_drive must be non-negative")
        if self.nbar_a < 0 or self.nbar_m < 0:
            raise ValueError("thermal occupations must be non-negative")
        if not isinstance(self.kerr_sign, KerrSign):
            raise TypeError("kerr_sign must be a KerrSign")

    @property
    def kerr(self) -> float:
        """Signed Kerr coefficient."""
        return self.kerr_sign.value * self.kerr_magnitude

    @property
    def detuning_ratio(self) -> float:
        return self.delta_m / self.delta_a

    def with_point(
        self,
        omega_drive: float | None = None,
        detuning_ratio: float | None = None,
        kerr_sign: KerrSign | None = None,
    ) -> "SystemParams":
        """Copy of the parameters at another point of the phase plane."""
        changes: dict = {}
        if omega_drive is not None:
            changes["omega_drive"] = omega_drive
        if detuning_ratio is not None:
            changes["delta_m"] = detuning_ratio * self.delta_a
        if kerr_sign is not None:
            changes["kerr_sign"] = kerr_sign
        return replace(self, **changes)


@dataclass(frozen=True)
class EffectiveMagnonMode:
    """Magnon mode dressed by the adiabatically eliminated cavity response.

    weight      dimensionless backaction weight g_m^2 / (delta_a^2 +
                kappa_a^2 - omega_drive^2)
    detuning    dressed magnon detuning
    damping     dressed magnon damping, positive whenever weight >= 0
    """

    weight: float
    detuning: float
    damping: float


def effective_magnon_mode(
    params: SystemParams, eps_den: float = EPS_DEN_DEFAULT
) -> EffectiveMagnonMode:
    """Eliminate the cavity from the steady-state equations.

    Raises DegenerateDenominator when the drive sits within eps_den of the
    parametric resonance delta_a^2 + kappa_a^2 = omega_drive^2.
    """
    denom = params.delta_a**2 + params.kappa_a**2 - params.omega_drive**2
    if abs(denom) <= eps_den:
        raise DegenerateDenominator(
            f"cavity response denominator {denom:.3e} within {eps_den:.1e} of zero"
        )
    weight = params.g_m**2 / denom
    return EffectiveMagnonMode(
        weight=weight,
        detuning=params.delta_m - weight * params.delta_a,
        damping=params.gamma_m + weight * params.kappa_a,
    )


def mean_field_rhs(
    params: SystemParams, cavity_amp: complex, magnon_amp: complex
) -> tuple[complex, complex]:
    """Time derivatives of the coherent amplitudes (cavity, magnon)."""
    a = complex(cavity_amp)
    m = complex(magnon_amp)
    a_rate = (
        -1j * (params.delta_a - 1j * params.kappa_a) * a
        - 1j * params.g_m * m
        - 1j * params.omega_drive * a.conjugate()
    )
    m_rate = (
        -1j * (params.delta_m + params.kerr * abs(m) ** 2 - 1j * params.gamma_m) * m
        - 1j * params.g_m * a
    )
    return a_rate, m_rate


def bose_occupancy(ratio: float) -> float:
    """Thermal occupation exp(ratio)-1 inverse for ratio = hbar*omega/(kB*T)."""
    if ratio <= 0:
        raise ValueError("frequency-to-temperature ratio must be positive")
    return 1.0 / math.expm1(ratio)
