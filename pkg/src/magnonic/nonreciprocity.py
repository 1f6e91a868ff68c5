"""Order parameter and the contrast between the two Kerr orientations.

The order parameter rho = |kerr| |M|^2 / gamma_m is dimensionless and does
not depend on the Kerr magnitude, only on its sign, which makes it the
natural quantity to compare between the two crystal orientations.  The
contrast

    I = |rho(+) - rho(-)| / (rho(+) + rho(-))

is zero where both orientations respond identically, one where only one of
them condenses, and strictly between otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UnstableRegion
from .model import EPS_DEN_DEFAULT, KerrSign, SystemParams
from .stability import (
    TOL_STAB_DEFAULT,
    PhaseLabel,
    PointClassification,
    classify_point,
)
from .steadystate import TOL_PHASE_DEFAULT

EPS_CONTRAST_DEFAULT = 1e-9


@dataclass(frozen=True)
class OrderParameterResult:
    """Order parameter with its phase context.

    rho is NaN in the Unstable phase, where no steady value exists.  In the
    Bistable phase the condensed branch is reported; the Zero branch
    alternative there is identically zero.
    """

    rho: float
    phase: PhaseLabel
    marginal: bool


@dataclass(frozen=True)
class ContrastPoint:
    omega: float
    detuning_ratio: float
    rho_pos: float
    rho_neg: float
    contrast: float
    phase_pos: PhaseLabel
    phase_neg: PhaseLabel


def _rho_from_classification(
    params: SystemParams, point: PointClassification
) -> float:
    if point.label is PhaseLabel.UNSTABLE:
        return math.nan
    if point.label is PhaseLabel.NORMAL:
        return 0.0
    occ = point.condensed.solution.magnon_occ
    return params.kerr_magnitude * occ / params.gamma_m


def contrast_value(rho_pos: float, rho_neg: float, eps_contrast: float) -> float:
    """Contrast of two order parameters, snapped to zero within eps_contrast."""
    total = rho_pos + rho_neg
    gap = abs(rho_pos - rho_neg)
    if total == 0.0 or gap <= eps_contrast * total:
        return 0.0
    return gap / total


def order_parameter_detail(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> OrderParameterResult:
    point = classify_point(params, eps_den, tol_stab, tol_phase)
    return OrderParameterResult(
        rho=_rho_from_classification(params, point),
        phase=point.label,
        marginal=point.marginal,
    )


def order_parameter(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> float:
    return order_parameter_detail(params, eps_den, tol_stab, tol_phase).rho


def contrast_ratio(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
    eps_contrast: float = EPS_CONTRAST_DEFAULT,
) -> ContrastPoint:
    """Contrast between the two Kerr orientations at one drive point.

    Raises UnstableRegion when either orientation has no stable phase; grid
    sweeps catch this and store a NaN sentinel instead.
    """
    pos = order_parameter_detail(
        params.with_point(kerr_sign=KerrSign.POSITIVE), eps_den, tol_stab, tol_phase
    )
    neg = order_parameter_detail(
        params.with_point(kerr_sign=KerrSign.NEGATIVE), eps_den, tol_stab, tol_phase
    )
    if pos.phase is PhaseLabel.UNSTABLE or neg.phase is PhaseLabel.UNSTABLE:
        raise UnstableRegion(
            "contrast undefined where an orientation has no stable phase"
        )
    contrast = contrast_value(pos.rho, neg.rho, eps_contrast)
    return ContrastPoint(
        omega=params.omega_drive,
        detuning_ratio=params.detuning_ratio,
        rho_pos=pos.rho,
        rho_neg=neg.rho,
        contrast=contrast,
        phase_pos=pos.phase,
        phase_neg=neg.phase,
    )
