"""Brute-force cross checks by direct time integration.

Everything here validates the closed-form results by independent means: the
mean-field equations are relaxed with fixed-step RK4 until a trailing window
stops moving, the covariance equation is integrated to its stationary point,
hysteresis sweeps carry the relaxed state from drive to drive, and
validate_grid compares branch values and stability verdicts against
relaxation over a whole grid.

Integration decisions (divergence, trailing-window convergence) live in the
kernel backends so the compiled and pure-Python paths agree step for step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import Diverged
from .fluctuations import CovarianceMatrix, DiffusionMatrix, diffusion_matrix, solve_lyapunov
from .model import EPS_DEN_DEFAULT, KerrSign, SystemParams
from .stability import (
    TOL_STAB_DEFAULT,
    DriftMatrix,
    PhaseLabel,
    StabilityVerdict,
    build_drift_matrix,
    classify_point,
)
from .steadystate import TOL_PHASE_DEFAULT

MEAN_FIELD_BOUND = 1e6
COVARIANCE_BOUND = 1e12

# decision radii for the stability probes, relative to the anchor scale
_GROW_RADIUS = 1e-3
_DECAY_RADIUS = 1e-9
_LEAVE_FRACTION = 0.1
_RETURN_FRACTION = 1e-7
# a gap holding well above the kick at consecutive block ends means the
# state left the fixed point for a nearby orbit; transients decay within a
# block, so stable points never trip this
_ORBIT_FACTOR = 30.0
_ORBIT_BLOCKS = 2


@dataclass(frozen=True)
class MeanFieldRelaxation:
    cavity_amp: complex
    magnon_amp: complex
    converged: bool
    steps: int


def relax_mean_field(
    params: SystemParams,
    cavity_amp: complex = 0j,
    magnon_amp: complex = 0j,
    t_end: float = 200.0,
    dt: float = 1e-3,
    conv_tol: float = 1e-9,
    window: float = 1.0,
    bound: float = MEAN_FIELD_BOUND,
) -> MeanFieldRelaxation:
    """RK4 relaxation of the mean-field equations from a given state.

    Stops early once the state moves less than conv_tol over a trailing
    window; raises Diverged when the state norm exceeds bound.
    """
    n_steps = max(1, int(round(t_end / dt)))
    window_steps = max(1, int(round(window / dt)))
    a = complex(cavity_amp)
    m = complex(magnon_amp)
    a_re, a_im, m_re, m_im, status, steps = _kernels.mean_field_relax(
        params.delta_a,
        params.kappa_a,
        params.delta_m,
        params.gamma_m,
        params.g_m,
        params.kerr,
        params.omega_drive,
        a.real,
        a.imag,
        m.real,
        m.imag,
        dt,
        n_steps,
        window_steps,
        conv_tol,
        bound,
    )
    if status == 2:
        raise Diverged(f"mean-field state left |state| <= {bound:.1e} after {steps} steps")
    return MeanFieldRelaxation(
        cavity_amp=complex(a_re, a_im),
        magnon_amp=complex(m_re, m_im),
        converged=status == 1,
        steps=steps,
    )


def relax_covariance(
    drift: DriftMatrix,
    diffusion: DiffusionMatrix,
    v0: np.ndarray | None = None,
    t_end: float = 50.0,
    dt: float = 1e-3,
    conv_tol: float = 0.0,
    window: float = 1.0,
    bound: float = COVARIANCE_BOUND,
) -> CovarianceMatrix:
    """Integrate the covariance equation; defaults run the full budget.

    The default initial condition is the vacuum covariance (identity over
    two).  Pass conv_tol > 0 to stop once a trailing window stops moving.
    """
    if v0 is None:
        v0 = 0.5 * np.eye(4)
    n_steps = max(1, int(round(t_end / dt)))
    window_steps = max(1, int(round(window / dt)))
    v, status, steps = _kernels.covariance_relax(
        drift.entries,
        diffusion.entries,
        np.asarray(v0, dtype=float),
        dt,
        n_steps,
        window_steps,
        conv_tol,
        bound,
    )
    if status == 2:
        raise Diverged(f"covariance relaxation left |V| <= {bound:.1e} after {steps} steps")
    v = 0.5 * (v + v.T)
    return CovarianceMatrix(v)


@dataclass(frozen=True)
class HysteresisResult:
    omegas: np.ndarray
    rho: np.ndarray
    converged: np.ndarray


def hysteresis_sweep(
    params: SystemParams,
    omega_values,
    seed: int = 20240,
    noise: float = 1e-6,
    t_end: float = 20000.0,
    dt: float = 1e-3,
    conv_tol: float = 1e-10,
    window: float = 1.0,
    bound: float = MEAN_FIELD_BOUND,
) -> HysteresisResult:
    """Drive sweep that hands the relaxed state to the next drive value.

    omega_values must be strictly monotone; sweep direction is whatever
    order the values come in.  Each point is re-seeded with a small
    deterministic kick so the Zero branch can escape once it turns
    unstable.  Divergent points record NaN and reset the carried state.
    The budget is sized for escape rates down to about 1e-3; stable points
    exit early on the trailing-window test.
    """
    omegas = np.asarray(list(omega_values), dtype=float)
    if omegas.size < 2:
        raise ValueError("need at least two drive values")
    steps = np.diff(omegas)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("drive values must be strictly monotone")

    rng = np.random.default_rng(seed)
    rho = np.empty_like(omegas)
    converged = np.zeros(omegas.shape, dtype=bool)
    state_a = 0j
    state_m = 0j
    for idx, omega in enumerate(omegas):
        point = params.with_point(omega_drive=float(omega))
        kick = noise * rng.standard_normal(4)
        try:
            relaxed = relax_mean_field(
                point,
                cavity_amp=state_a + complex(kick[0], kick[1]),
                magnon_amp=state_m + complex(kick[2], kick[3]),
                t_end=t_end,
                dt=dt,
                conv_tol=conv_tol,
                window=window,
                bound=bound,
            )
        except Diverged:
            rho[idx] = math.nan
            converged[idx] = False
            state_a = 0j
            state_m = 0j
            continue
        state_a = relaxed.cavity_amp
        state_m = relaxed.magnon_amp
        rho[idx] = params.kerr_magnitude * abs(state_m) ** 2 / params.gamma_m
        converged[idx] = relaxed.converged
    return HysteresisResult(omegas=omegas, rho=rho, converged=converged)


@dataclass(frozen=True)
class PointCheck:
    """Formula-versus-relaxation comparison at one grid point."""

    omega: float
    detuning_ratio: float
    kerr_sign: KerrSign
    phase: PhaseLabel
    zero_stable_formula: bool
    zero_stable_oracle: bool | None
    condensed_admissible: bool
    condensed_stable_formula: bool | None
    condensed_stable_oracle: bool | None
    rho_formula: float
    rho_oracle: float
    rho_dev: float
    covariance_dev: float

    @property
    def verdicts_agree(self) -> bool:
        if self.zero_stable_oracle is None:
            return False
        if self.zero_stable_formula != self.zero_stable_oracle:
            return False
        if self.condensed_stable_formula is None:
            return True
        return self.condensed_stable_formula == self.condensed_stable_oracle


@dataclass
class ValidationReport:
    checks: list[PointCheck] = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return sum(not c.verdicts_agree for c in self.checks)

    @property
    def max_rho_dev(self) -> float:
        devs = [c.rho_dev for c in self.checks if math.isfinite(c.rho_dev)]
        return max(devs) if devs else 0.0

    @property
    def max_covariance_dev(self) -> float:
        devs = [c.covariance_dev for c in self.checks if math.isfinite(c.covariance_dev)]
        return max(devs) if devs else 0.0

    def ok(self, rho_tol: float = 1e-5, cov_tol: float = 1e-6) -> bool:
        return (
            self.disagreements == 0
            and self.max_rho_dev < rho_tol
            and self.max_covariance_dev < cov_tol
        )


def _norm4(a_re: float, a_im: float, m_re: float, m_im: float) -> float:
    return math.sqrt(a_re * a_re + a_im * a_im + m_re * m_re + m_im * m_im)


def _relax_raw(params, state, dt, t_block, conv_tol, window, bound):
    n_steps = max(1, int(round(t_block / dt)))
    window_steps = max(1, int(round(window / dt)))
    return _kernels.mean_field_relax(
        params.delta_a,
        params.kappa_a,
        params.delta_m,
        params.gamma_m,
        params.g_m,
        params.kerr,
        params.omega_drive,
        state[0],
        state[1],
        state[2],
        state[3],
        dt,
        n_steps,
        window_steps,
        conv_tol,
        bound,
    )


def _probe_zero(params, rng, dt, t_block, t_max, conv_tol, window, bound):
    """Does a small kick around the Zero branch decay or escape?"""
    kick = rng.standard_normal(4)
    kick *= 1e-6 / np.linalg.norm(kick)
    state = tuple(kick)
    elapsed = 0.0
    while elapsed < t_max:
        out = _relax_raw(params, state, dt, t_block, conv_tol, window, bound)
        a_re, a_im, m_re, m_im, status, _ = out
        if status == 2:
            return False
        state = (a_re, a_im, m_re, m_im)
        norm = _norm4(*state)
        if norm > _GROW_RADIUS:
            return False
        if norm < _DECAY_RADIUS or status == 1:
            # converged inside the trust radius: settled back to Zero
            return True
        elapsed += t_block
    return None


def _probe_condensed(params, anchor_a, anchor_m, rng, dt, t_block, t_max, conv_tol, window, bound):
    """Does the condensed branch re-attract a relative kick of 1e-3?

    Returns (stable or None, relaxed magnon amplitude or None).  Unstable
    points near a bifurcation settle on a small limit cycle instead of
    running away; the orbit check catches those.
    """
    anchor = (anchor_a.real, anchor_a.imag, anchor_m.real, anchor_m.imag)
    scale = _norm4(*anchor)
    kick = rng.standard_normal(4)
    state = (
        anchor[0] * (1.0 + 1e-3 * kick[0]),
        anchor[1] * (1.0 + 1e-3 * kick[1]),
        anchor[2] * (1.0 + 1e-3 * kick[2]),
        anchor[3] * (1.0 + 1e-3 * kick[3]),
    )
    gap0 = _norm4(
        state[0] - anchor[0],
        state[1] - anchor[1],
        state[2] - anchor[2],
        state[3] - anchor[3],
    ) / scale
    elapsed = 0.0
    orbit_blocks = 0
    while elapsed < t_max:
        out = _relax_raw(params, state, dt, t_block, conv_tol, window, bound)
        a_re, a_im, m_re, m_im, status, _ = out
        if status == 2:
            return False, None
        state = (a_re, a_im, m_re, m_im)
        gap = _norm4(
            state[0] - anchor[0],
            state[1] - anchor[1],
            state[2] - anchor[2],
            state[3] - anchor[3],
        ) / scale
        if gap > _LEAVE_FRACTION:
            return False, None
        if gap > _ORBIT_FACTOR * gap0:
            orbit_blocks += 1
            if orbit_blocks >= _ORBIT_BLOCKS:
                return False, None
        else:
            orbit_blocks = 0
        if status == 1 or gap < _RETURN_FRACTION:
            return True, complex(state[2], state[3])
        elapsed += t_block
    return None, None


def validate_grid(
    params: SystemParams,
    omega_values,
    ratio_values,
    signs: tuple[KerrSign, ...] = (KerrSign.POSITIVE, KerrSign.NEGATIVE),
    seed: int = 20240,
    dt: float = 0.01,
    t_block: float = 2000.0,
    t_max: float = 200000.0,
    cov_dt: float = 0.02,
    cov_t_max: float = 400000.0,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
) -> ValidationReport:
    """Compare formulas against relaxation over a drive-ratio grid.

    The time step is coarser than the single-shot default: fixed points of
    the flow are fixed points of the RK4 map at any stable step size, so
    only the transient is integrated less finely.  Budgets are sized for
    spectral gaps down to about 5e-5.
    """
    report = ValidationReport()
    conv_tol = 1e-13
    window = 1.0
    for sign_idx, sign in enumerate(signs):
        for i, ratio in enumerate(ratio_values):
            for j, omega in enumerate(omega_values):
                point = params.with_point(
                    omega_drive=float(omega),
                    detuning_ratio=float(ratio),
                    kerr_sign=sign,
                )
                cls = classify_point(point, eps_den, tol_stab, tol_phase)

                zero_formula = cls.zero.verdict is not StabilityVerdict.UNSTABLE
                rng = np.random.default_rng((seed, sign_idx, i, j, 0))
                zero_oracle = _probe_zero(
                    point, rng, dt, t_block, t_max, conv_tol, window, MEAN_FIELD_BOUND
                )

                condensed = cls.condensed
                admissible = condensed.solution.admissible
                condensed_formula = None
                condensed_oracle = None
                rho_formula = math.nan
                rho_oracle = math.nan
                rho_dev = math.nan
                if admissible:
                    condensed_formula = (
                        condensed.verdict is not StabilityVerdict.UNSTABLE
                    )
                    rng = np.random.default_rng((seed, sign_idx, i, j, 1))
                    condensed_oracle, relaxed_m = _probe_condensed(
                        point,
                        condensed.solution.a_amplitude,
                        condensed.solution.m_amplitude,
                        rng,
                        dt,
                        t_block,
                        t_max,
                        conv_tol,
                        window,
                        MEAN_FIELD_BOUND,
                    )
                    if condensed_oracle and relaxed_m is not None:
                        rho_formula = (
                            point.kerr_magnitude
                            * condensed.solution.magnon_occ
                            / point.gamma_m
                        )
                        rho_oracle = (
                            point.kerr_magnitude * abs(relaxed_m) ** 2 / point.gamma_m
                        )
                        rho_dev = abs(rho_oracle - rho_formula)

                cov_dev = math.nan
                diff = diffusion_matrix(point)
                for assessment, amplitude in (
                    (cls.zero, 0j),
                    (condensed, condensed.solution.m_amplitude),
                ):
                    if assessment.verdict is not StabilityVerdict.STABLE:
                        continue
                    drift = build_drift_matrix(point, amplitude)
                    stationary = solve_lyapunov(drift, diff, tol_stab)
                    relaxed = relax_covariance(
                        drift,
                        diff,
                        t_end=cov_t_max,
                        dt=cov_dt,
                        conv_tol=1e-11,
                        window=window,
                    )
                    dev = float(
                        np.abs(stationary.entries - relaxed.entries).max()
                    )
                    cov_dev = dev if math.isnan(cov_dev) else max(cov_dev, dev)

                report.checks.append(
                    PointCheck(
                        omega=float(omega),
                        detuning_ratio=float(ratio),
                        kerr_sign=sign,
                        phase=cls.label,
                        zero_stable_formula=zero_formula,
                        zero_stable_oracle=zero_oracle,
                        condensed_admissible=admissible,
                        condensed_stable_formula=condensed_formula,
                        condensed_stable_oracle=condensed_oracle,
                        rho_formula=rho_formula,
                        rho_oracle=rho_oracle,
                        rho_dev=rho_dev,
                        covariance_dev=cov_dev,
                    )
                )
    return report
