"""Linear stability of the steady branches and phase classification.

Linearizing the mean-field equations around a steady point and switching to
quadratures (x_a, y_a, x_m, y_m) gives a real 4x4 drift matrix.  A branch is
stable when every eigenvalue has a negative real part.  Comparing the Zero
branch with the sign-matched condensed branch yields the phase label:

    Zero stable,   condensed absent or unstable   ->  Normal
    Zero unstable, condensed stable               ->  Superradiant
    Zero stable,   condensed stable               ->  Bistable
    neither stable                                ->  Unstable

Eigenvalues within tol_stab of the imaginary axis are flagged Marginal and
counted on the stable side for classification, so phase boundaries stay
closed under grid refinement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure
from .model import EPS_DEN_DEFAULT, KerrSign, SystemParams
from .steadystate import (
    TOL_PHASE_DEFAULT,
    BranchLabel,
    BranchSolution,
    _phase_factor,
    steady_branches,
)

TOL_STAB_DEFAULT = 1e-9


class StabilityVerdict(enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


class PhaseLabel(enum.Enum):
    NORMAL = 0
    SUPERRADIANT = 1
    BISTABLE = 2
    UNSTABLE = 3

    @property
    def code(self) -> int:
        return self.value

    @classmethod
    def from_code(cls, code: int) -> "PhaseLabel":
        return cls(code)


@dataclass(frozen=True)
class DriftMatrix:
    """Real 4x4 drift matrix in the quadrature basis (x_a, y_a, x_m, y_m)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError("drift matrix must be 4x4")
        object.__setattr__(self, "entries", arr)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


def _assemble_drift(
    params: SystemParams, det_shift2: float, pair_re: float, pair_im: float
) -> DriftMatrix:
    """Drift matrix from the doubled Kerr shift and the pairing term K M^2."""
    da, ka = params.delta_a, params.kappa_a
    gm, w = params.g_m, params.omega_drive
    g = params.gamma_m
    entries = np.array(
        [
            [-ka, da - w, 0.0, gm],
            [-da - w, -ka, -gm, 0.0],
            [0.0, gm, -g + pair_im, det_shift2 - pair_re],
            [-gm, 0.0, -det_shift2 - pair_re, -g - pair_im],
        ]
    )
    return DriftMatrix(entries)


def build_drift_matrix(params: SystemParams, magnon_amp: complex) -> DriftMatrix:
    """Drift matrix at a steady point with condensed magnon amplitude M."""
    m = complex(magnon_amp)
    occ = abs(m) ** 2
    pair = params.kerr * m * m
    det_shift2 = params.delta_m + 2.0 * params.kerr * occ
    return _assemble_drift(params, det_shift2, pair.real, pair.imag)


def drift_matrix_for_occupation(
    params: SystemParams,
    occupation: float,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> DriftMatrix:
    """Drift matrix continued to a raw occupation root.

    For admissible occupations this matches build_drift_matrix at the
    reconstructed amplitude.  For negative roots it evaluates the same
    algebraic form, which is what makes the diagnostic branch testable
    even where it carries no physical amplitude.
    """
    factor = _phase_factor(params, occupation)
    # exp(+2 i theta); the stationarity conditions force |factor| = 1
    if abs(abs(factor) - 1.0) > tol_phase:
        raise ConvergenceFailure(
            f"phase factor modulus {abs(factor):.12g} deviates from unity"
        )
    pair = params.kerr * occupation * (1.0 / factor)
    det_shift2 = params.delta_m + 2.0 * params.kerr * occupation
    return _assemble_drift(params, det_shift2, pair.real, pair.imag)


def drift_eigenvalues(matrix: DriftMatrix) -> tuple[complex, complex, complex, complex]:
    """Eigenvalues sorted by (real part, imaginary part)."""
    try:
        vals = np.linalg.eigvals(matrix.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - QR rarely fails on 4x4
        raise ConvergenceFailure("eigenvalue iteration failed") from exc
    ordered = sorted((complex(v) for v in vals), key=lambda z: (z.real, z.imag))
    return tuple(ordered)


def spectral_abscissa(matrix: DriftMatrix) -> float:
    return max(v.real for v in drift_eigenvalues(matrix))


def is_stable(matrix: DriftMatrix, tol_stab: float = TOL_STAB_DEFAULT) -> bool:
    """Strict stability: every eigenvalue real part below -tol_stab."""
    return spectral_abscissa(matrix) < -tol_stab


def stability_verdict(
    matrix: DriftMatrix, tol_stab: float = TOL_STAB_DEFAULT
) -> StabilityVerdict:
    top = spectral_abscissa(matrix)
    if top < -tol_stab:
        return StabilityVerdict.STABLE
    if top > tol_stab:
        return StabilityVerdict.UNSTABLE
    return StabilityVerdict.MARGINAL


@dataclass(frozen=True)
class BranchAssessment:
    """Stability data attached to one branch candidate.

    eigenvalues and verdict are None when the branch was not evaluated
    (inadmissible and outside diagnostic mode); formal marks a verdict
    obtained from the continued drift matrix of an inadmissible root.
    """

    solution: BranchSolution
    eigenvalues: tuple[complex, complex, complex, complex] | None
    max_real: float
    verdict: StabilityVerdict | None
    formal: bool = False


@dataclass(frozen=True)
class PointClassification:
    label: PhaseLabel
    zero: BranchAssessment
    condensed: BranchAssessment
    diagnostic: BranchAssessment | None
    marginal: bool


def _assess(
    matrix: DriftMatrix, solution: BranchSolution, tol_stab: float, formal: bool = False
) -> BranchAssessment:
    vals = drift_eigenvalues(matrix)
    top = max(v.real for v in vals)
    if top < -tol_stab:
        verdict = StabilityVerdict.STABLE
    elif top > tol_stab:
        verdict = StabilityVerdict.UNSTABLE
    else:
        verdict = StabilityVerdict.MARGINAL
    return BranchAssessment(solution, vals, top, verdict, formal)


def _skip(solution: BranchSolution) -> BranchAssessment:
    return BranchAssessment(solution, None, math.nan, None)


def classify_point(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
    all_branches: bool = False,
) -> PointClassification:
    """Assess the competing branches and label the phase at one point."""
    zero_sol, plus_sol, minus_sol = steady_branches(params, eps_den, tol_phase)
    positive_kerr = params.kerr_sign is KerrSign.POSITIVE
    condensed_sol = plus_sol if positive_kerr else minus_sol
    diagnostic_sol = minus_sol if positive_kerr else plus_sol

    zero = _assess(build_drift_matrix(params, 0j), zero_sol, tol_stab)

    if condensed_sol.admissible:
        condensed = _assess(
            build_drift_matrix(params, condensed_sol.m_amplitude),
            condensed_sol,
            tol_stab,
        )
    else:
        condensed = _skip(condensed_sol)

    diagnostic = None
    if all_branches:
        if math.isfinite(diagnostic_sol.magnon_occ):
            matrix = drift_matrix_for_occupation(
                params, diagnostic_sol.magnon_occ, tol_phase
            )
            diagnostic = _assess(
                matrix, diagnostic_sol, tol_stab, formal=not diagnostic_sol.admissible
            )
        else:
            diagnostic = _skip(diagnostic_sol)

    zero_holds = zero.verdict is not StabilityVerdict.UNSTABLE
    condensed_holds = (
        condensed.verdict is not None
        and condensed.verdict is not StabilityVerdict.UNSTABLE
    )

    if zero_holds and condensed_holds:
        label = PhaseLabel.BISTABLE
    elif zero_holds:
        label = PhaseLabel.NORMAL
    elif condensed_holds:
        label = PhaseLabel.SUPERRADIANT
    else:
        label = PhaseLabel.UNSTABLE

    marginal = zero.verdict is StabilityVerdict.MARGINAL or (
        condensed.verdict is StabilityVerdict.MARGINAL
    )
    return PointClassification(label, zero, condensed, diagnostic, marginal)


def classify_phase(
    params: SystemParams,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> PhaseLabel:
    return classify_point(params, eps_den, tol_stab, tol_phase).label
