"""Steady branches of the mean-field equations and their critical drives.

Setting the time derivatives to zero and eliminating the cavity yields a
quadratic for the condensed magnon occupation.  Together with the trivial
solution this gives three candidate branches: Zero, Plus and Minus, the two
nonzero ones labelled by the sign in front of the square root.  Only the
branch matching the sign of the Kerr coefficient (Plus for positive, Minus
for negative) competes with the Zero branch for stability; the opposite one
is kept for diagnostics.

A branch is admissible when its occupation is real and strictly positive.
Below the parametric resonance the admissibility conditions collapse to
threshold rules in the drive strength: the condensed branch exists above
either the fold drive (where the two nonzero roots merge) or the vacuum
instability drive (where the Zero branch destabilizes), depending on which
side of the critical detuning ratio the system sits.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .errors import (
    InadmissibleBranch,
    NoRealThreshold,
    PhaseInconsistent,
    ZeroCoupling,
)
from .model import (
    EPS_DEN_DEFAULT,
    KerrSign,
    SystemParams,
    effective_magnon_mode,
)

TOL_PHASE_DEFAULT = 1e-6


class BranchLabel(enum.Enum):
    ZERO = "zero"
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class BranchSolution:
    """One steady-state candidate.

    magnon_occ holds the raw root even when it is negative (inadmissible),
    so sweeps can diagnose how a branch disappears; it is NaN when the
    discriminant is negative.  Amplitudes are NaN unless the branch is
    admissible.  considered marks the branches competing for stability at
    this Kerr sign (Zero plus the sign-matched nonzero branch).
    """

    label: BranchLabel
    magnon_occ: float
    photon_occ: float
    m_amplitude: complex
    a_amplitude: complex
    admissible: bool
    considered: bool


@dataclass(frozen=True)
class AdmissibilityTable:
    """Admissibility of each branch; None marks the diagnostic-only branch."""

    zero: bool
    plus: bool | None
    minus: bool | None


def _phase_factor(params: SystemParams, occupation: float) -> complex:
    """Value of exp(-2 i theta) imposed by the stationarity conditions."""
    det_shift = params.delta_m + params.kerr * occupation
    numer = params.g_m**2 - (params.delta_a - 1j * params.kappa_a) * (
        det_shift - 1j * params.gamma_m
    )
    denom = params.omega_drive * (det_shift + 1j * params.gamma_m)
    if denom == 0:
        raise PhaseInconsistent("phase equation degenerates without a drive")
    return numer / denom


def _amplitudes(
    params: SystemParams, occupation: float, tol_phase: float
) -> tuple[complex, complex]:
    factor = _phase_factor(params, occupation)
    if abs(abs(factor) - 1.0) > tol_phase:
        raise PhaseInconsistent(
            f"|exp(-2 i theta)| = {abs(factor):.12g} deviates from unity"
        )
    # canonical magnon phase in [0, pi); the pi-shifted twin is equivalent
    theta = (-cmath.phase(factor) / 2.0) % math.pi
    m_amp = math.sqrt(occupation) * cmath.exp(1j * theta)
    det_shift = params.delta_m + params.kerr * occupation
    a_amp = -(det_shift - 1j * params.gamma_m) * m_amp / params.g_m
    return m_amp, a_amp


def _photon_from_occupation(params: SystemParams, occupation: float) -> float:
    if occupation == 0.0:
        return 0.0
    if params.g_m == 0 or not math.isfinite(occupation):
        return math.nan
    det_shift = params.delta_m + params.kerr * occupation
    return (det_shift**2 + params.gamma_m**2) * occupation / params.g_m**2


def steady_branches(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> tuple[BranchSolution, BranchSolution, BranchSolution]:
    """All three steady-state candidates, in the order Zero, Plus, Minus."""
    eff = effective_magnon_mode(params, eps_den)
    disc = (eff.weight * params.omega_drive) ** 2 - eff.damping**2
    positive_kerr = params.kerr_sign is KerrSign.POSITIVE

    zero = BranchSolution(
        label=BranchLabel.ZERO,
        magnon_occ=0.0,
        photon_occ=0.0,
        m_amplitude=0j,
        a_amplitude=0j,
        admissible=True,
        considered=True,
    )

    nonzero = []
    for label, sign in ((BranchLabel.PLUS, 1.0), (BranchLabel.MINUS, -1.0)):
        if disc < 0:
            raw = math.nan
            admissible = False
        else:
            raw = (-eff.detuning + sign * math.sqrt(disc)) / params.kerr
            admissible = raw > 0
        if admissible:
            m_amp, a_amp = _amplitudes(params, raw, tol_phase)
        else:
            m_amp = a_amp = complex(math.nan, math.nan)
        nonzero.append(
            BranchSolution(
                label=label,
                magnon_occ=raw,
                photon_occ=_photon_from_occupation(params, raw),
                m_amplitude=m_amp,
                a_amplitude=a_amp,
                admissible=admissible,
                considered=(label is BranchLabel.PLUS) == positive_kerr,
            )
        )
    return zero, nonzero[0], nonzero[1]


def branch_amplitudes(
    params: SystemParams,
    branch: BranchSolution,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> tuple[complex, complex]:
    """Coherent amplitudes (magnon, cavity) of an admissible branch."""
    if not branch.admissible:
        raise InadmissibleBranch(f"{branch.label.value} branch is not admissible")
    if branch.label is BranchLabel.ZERO:
        return 0j, 0j
    if params.g_m == 0:
        raise ZeroCoupling("condensed amplitudes require g_m > 0")
    return _amplitudes(params, branch.magnon_occ, tol_phase)


def photon_occupation(params: SystemParams, branch: BranchSolution) -> float:
    """Condensed photon number locked to an admissible magnon branch."""
    if not branch.admissible:
        raise InadmissibleBranch(f"{branch.label.value} branch is not admissible")
    return _photon_from_occupation(params, branch.magnon_occ)


def critical_ratio(params: SystemParams) -> float:
    """Detuning ratio where the two critical drives coincide.

    Below this ratio the fold drive comes first for positive Kerr; above it
    the roles of the two transitions swap between the Kerr signs.
    """
    shifted = 2.0 * params.kappa_a * params.gamma_m + params.g_m**2
    return (
        shifted + math.sqrt(shifted**2 + 4.0 * params.delta_a**2 * params.gamma_m**2)
    ) / (2.0 * params.delta_a**2)


def first_critical_drive(params: SystemParams) -> float:
    """Fold drive: the two nonzero roots become real and merge here."""
    half_rate = params.g_m**2 / (2.0 * params.gamma_m)
    return (
        math.sqrt(
            half_rate**2
            + params.delta_a**2
            + params.kappa_a**2
            + params.g_m**2 * params.kappa_a / params.gamma_m
        )
        - half_rate
    )


def second_critical_drive(params: SystemParams) -> float:
    """Vacuum instability drive: the Zero branch loses stability here."""
    mix = (
        2.0 * params.delta_a * params.delta_m
        - 2.0 * params.kappa_a * params.gamma_m
        - params.g_m**2
    )
    radicand = (
        params.delta_a**2
        + params.kappa_a**2
        - params.g_m**2 * mix / (params.delta_m**2 + params.gamma_m**2)
    )
    if radicand < 0:
        raise NoRealThreshold(f"radicand {radicand:.3e} is negative")
    return math.sqrt(radicand)


def admissibility(
    params: SystemParams, eps_den: float = EPS_DEN_DEFAULT
) -> AdmissibilityTable:
    """Threshold-rule admissibility of the considered branches.

    Valid for drives below the parametric resonance, where the threshold
    rules are equivalent to the sign of the occupation roots.
    """
    positive_kerr = params.kerr_sign is KerrSign.POSITIVE
    if params.g_m == 0:
        considered_ok = False
    else:
        ratio = params.detuning_ratio
        crossover = critical_ratio(params)
        fold_first = (positive_kerr and ratio < crossover) or (
            not positive_kerr and ratio > crossover
        )
        threshold = (
            first_critical_drive(params)
            if fold_first
            else second_critical_drive(params)
        )
        considered_ok = params.omega_drive > threshold
    return AdmissibilityTable(
        zero=True,
        plus=considered_ok if positive_kerr else None,
        minus=None if positive_kerr else considered_ok,
    )
