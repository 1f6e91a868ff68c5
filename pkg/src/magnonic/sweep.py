"""Grid and cut sweeps over drive strength and detuning ratio.

Workers are split over row or chunk indices and results are written back by
index, so the output arrays are identical for any worker count.  Points
where the steady-state reduction is singular carry the sentinel code -1 and
NaN values; points without any stable phase carry the Unstable code and NaN
values for quantities that have no steady value there.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DegenerateDenominator, UnstableDrift
from .fluctuations import NEAR_MARGINAL_DEFAULT, branch_fluctuations
from .model import EPS_DEN_DEFAULT, KerrSign, SystemParams
from .nonreciprocity import EPS_CONTRAST_DEFAULT, _rho_from_classification, contrast_value
from .stability import (
    TOL_STAB_DEFAULT,
    PhaseLabel,
    build_drift_matrix,
    classify_point,
)
from .steadystate import TOL_PHASE_DEFAULT

SENTINEL_CODE = -1


@dataclass(frozen=True)
class Axis:
    """Inclusive uniform axis with count points."""

    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError("axis needs at least two points")
        if not self.stop > self.start:
            raise ValueError("axis stop must exceed start")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.count - 1)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters plus the axes of a sweep.

    Two-dimensional sweeps set ratio_axis; one-dimensional cuts fix the
    detuning ratio instead.
    """

    base: SystemParams
    omega_axis: Axis
    ratio_axis: Axis | None = None
    fixed_ratio: float | None = None

    def __post_init__(self) -> None:
        if (self.ratio_axis is None) == (self.fixed_ratio is None):
            raise ValueError("set exactly one of ratio_axis and fixed_ratio")


@dataclass(frozen=True)
class PhaseDiagramResult:
    kerr_sign: KerrSign
    omegas: np.ndarray
    ratios: np.ndarray
    codes: np.ndarray
    marginal: np.ndarray


@dataclass(frozen=True)
class CutResult:
    ratio: float
    omegas: np.ndarray
    phase_pos: np.ndarray
    phase_neg: np.ndarray
    marginal_pos: np.ndarray
    marginal_neg: np.ndarray
    rho_pos: np.ndarray | None = None
    rho_neg: np.ndarray | None = None
    log_fluct_pos: np.ndarray | None = None
    log_fluct_neg: np.ndarray | None = None
    near_marginal_pos: np.ndarray | None = None
    near_marginal_neg: np.ndarray | None = None


@dataclass(frozen=True)
class ContrastMapResult:
    omegas: np.ndarray
    ratios: np.ndarray
    contrast: np.ndarray
    rho_pos: np.ndarray
    rho_neg: np.ndarray
    phase_pos: np.ndarray
    phase_neg: np.ndarray


def _run_indexed(worker, count: int, jobs: int) -> list:
    """Apply worker to range(count), in order, optionally across processes."""
    if jobs <= 1:
        return [worker(i) for i in range(count)]
    chunksize = max(1, count // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, range(count), chunksize=chunksize))


def _phase_row(
    spec: SweepSpec,
    sign: KerrSign,
    eps_den: float,
    tol_stab: float,
    tol_phase: float,
    row: int,
):
    omegas = spec.omega_axis.values()
    ratio = float(spec.ratio_axis.values()[row])
    codes = np.empty(omegas.size, dtype=np.int8)
    marginal = np.zeros(omegas.size, dtype=bool)
    for j, omega in enumerate(omegas):
        point = spec.base.with_point(
            omega_drive=float(omega), detuning_ratio=ratio, kerr_sign=sign
        )
        try:
            cls = classify_point(point, eps_den, tol_stab, tol_phase)
        except DegenerateDenominator:
            codes[j] = SENTINEL_CODE
            continue
        codes[j] = cls.label.code
        marginal[j] = cls.marginal
    return codes, marginal


def phase_diagram(
    spec: SweepSpec,
    kerr_sign: KerrSign,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
    jobs: int = 1,
) -> PhaseDiagramResult:
    """Phase label on the drive-ratio grid for one Kerr orientation."""
    if spec.ratio_axis is None:
        raise ValueError("phase_diagram needs a ratio axis")
    ratios = spec.ratio_axis.values()
    omegas = spec.omega_axis.values()
    worker = partial(_phase_row, spec, kerr_sign, eps_den, tol_stab, tol_phase)
    rows = _run_indexed(worker, ratios.size, jobs)
    codes = np.stack([r[0] for r in rows])
    marginal = np.stack([r[1] for r in rows])
    return PhaseDiagramResult(
        kerr_sign=kerr_sign, omegas=omegas, ratios=ratios, codes=codes, marginal=marginal
    )


def _selected_log_fluct(params: SystemParams, cls, tol_stab, marginal_threshold):
    """lg(n+1) of the branch the system actually sits on, NaN if none."""
    if cls.label is PhaseLabel.UNSTABLE:
        return math.nan, False
    if cls.label is PhaseLabel.NORMAL:
        amplitude = 0j
    else:
        amplitude = cls.condensed.solution.m_amplitude
    drift = build_drift_matrix(params, amplitude)
    try:
        value, cov = branch_fluctuations(
            params, drift, tol_stab, marginal_threshold
        )
    except UnstableDrift:
        return math.nan, False
    return math.log10(value + 1.0), cov.near_marginal


def _cut_chunk(
    spec: SweepSpec,
    eps_den: float,
    tol_stab: float,
    tol_phase: float,
    marginal_threshold: float,
    want_order: bool,
    want_fluct: bool,
    bounds: tuple,
    chunk: int,
):
    lo, hi = bounds[chunk], bounds[chunk + 1]
    omegas = spec.omega_axis.values()[lo:hi]
    size = omegas.size
    out = {
        "phase_pos": np.empty(size, dtype=np.int8),
        "phase_neg": np.empty(size, dtype=np.int8),
        "marginal_pos": np.zeros(size, dtype=bool),
        "marginal_neg": np.zeros(size, dtype=bool),
    }
    if want_order:
        out["rho_pos"] = np.full(size, math.nan)
        out["rho_neg"] = np.full(size, math.nan)
    if want_fluct:
        out["log_fluct_pos"] = np.full(size, math.nan)
        out["log_fluct_neg"] = np.full(size, math.nan)
        out["near_marginal_pos"] = np.zeros(size, dtype=bool)
        out["near_marginal_neg"] = np.zeros(size, dtype=bool)

    for j, omega in enumerate(omegas):
        for sign, tag in ((KerrSign.POSITIVE, "pos"), (KerrSign.NEGATIVE, "neg")):
            point = spec.base.with_point(
                omega_drive=float(omega),
                detuning_ratio=spec.fixed_ratio,
                kerr_sign=sign,
            )
            try:
                cls = classify_point(point, eps_den, tol_stab, tol_phase)
            except DegenerateDenominator:
                out[f"phase_{tag}"][j] = SENTINEL_CODE
                continue
            out[f"phase_{tag}"][j] = cls.label.code
            out[f"marginal_{tag}"][j] = cls.marginal
            if want_order:
                out[f"rho_{tag}"][j] = _rho_from_classification(point, cls)
            if want_fluct:
                value, near = _selected_log_fluct(
                    point, cls, tol_stab, marginal_threshold
                )
                out[f"log_fluct_{tag}"][j] = value
                out[f"near_marginal_{tag}"][j] = near
    return out


def cut_datasets(
    spec: SweepSpec,
    want_order: bool = True,
    want_fluct: bool = True,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
    marginal_threshold: float = NEAR_MARGINAL_DEFAULT,
    jobs: int = 1,
) -> CutResult:
    """Order parameter and fluctuation data along a fixed-ratio cut."""
    if spec.fixed_ratio is None:
        raise ValueError("cuts need a fixed detuning ratio")
    omegas = spec.omega_axis.values()
    n_chunks = 1 if jobs <= 1 else jobs * 4
    n_chunks = min(n_chunks, omegas.size)
    bounds = tuple(
        int(b) for b in np.linspace(0, omegas.size, n_chunks + 1).round()
    )
    worker = partial(
        _cut_chunk,
        spec,
        eps_den,
        tol_stab,
        tol_phase,
        marginal_threshold,
        want_order,
        want_fluct,
        bounds,
    )
    chunks = _run_indexed(worker, n_chunks, jobs)

    def glue(key):
        return np.concatenate([c[key] for c in chunks])

    return CutResult(
        ratio=spec.fixed_ratio,
        omegas=omegas,
        phase_pos=glue("phase_pos"),
        phase_neg=glue("phase_neg"),
        marginal_pos=glue("marginal_pos"),
        marginal_neg=glue("marginal_neg"),
        rho_pos=glue("rho_pos") if want_order else None,
        rho_neg=glue("rho_neg") if want_order else None,
        log_fluct_pos=glue("log_fluct_pos") if want_fluct else None,
        log_fluct_neg=glue("log_fluct_neg") if want_fluct else None,
        near_marginal_pos=glue("near_marginal_pos") if want_fluct else None,
        near_marginal_neg=glue("near_marginal_neg") if want_fluct else None,
    )


def order_parameter_cut(spec: SweepSpec, **kwargs) -> CutResult:
    return cut_datasets(spec, want_order=True, want_fluct=False, **kwargs)


def fluctuation_cut(spec: SweepSpec, **kwargs) -> CutResult:
    return cut_datasets(spec, want_order=False, want_fluct=True, **kwargs)


def _contrast_row(
    spec: SweepSpec,
    eps_den: float,
    tol_stab: float,
    tol_phase: float,
    eps_contrast: float,
    row: int,
):
    omegas = spec.omega_axis.values()
    ratio = float(spec.ratio_axis.values()[row])
    size = omegas.size
    contrast = np.full(size, math.nan)
    rho = {
        KerrSign.POSITIVE: np.full(size, math.nan),
        KerrSign.NEGATIVE: np.full(size, math.nan),
    }
    codes = {
        KerrSign.POSITIVE: np.empty(size, dtype=np.int8),
        KerrSign.NEGATIVE: np.empty(size, dtype=np.int8),
    }
    for j, omega in enumerate(omegas):
        values = {}
        degenerate = False
        unstable = False
        for sign in (KerrSign.POSITIVE, KerrSign.NEGATIVE):
            point = spec.base.with_point(
                omega_drive=float(omega), detuning_ratio=ratio, kerr_sign=sign
            )
            try:
                cls = classify_point(point, eps_den, tol_stab, tol_phase)
            except DegenerateDenominator:
                codes[sign][j] = SENTINEL_CODE
                degenerate = True
                continue
            codes[sign][j] = cls.label.code
            if cls.label is PhaseLabel.UNSTABLE:
                unstable = True
                continue
            values[sign] = _rho_from_classification(point, cls)
            rho[sign][j] = values[sign]
        if degenerate or unstable:
            continue
        contrast[j] = contrast_value(
            values[KerrSign.POSITIVE], values[KerrSign.NEGATIVE], eps_contrast
        )
    return contrast, rho[KerrSign.POSITIVE], rho[KerrSign.NEGATIVE], codes[
        KerrSign.POSITIVE
    ], codes[KerrSign.NEGATIVE]


def contrast_map(
    spec: SweepSpec,
    eps_den: float = EPS_DEN_DEFAULT,
    tol_stab: float = TOL_STAB_DEFAULT,
    tol_phase: float = TOL_PHASE_DEFAULT,
    eps_contrast: float = EPS_CONTRAST_DEFAULT,
    jobs: int = 1,
) -> ContrastMapResult:
    """Contrast between the Kerr orientations on the drive-ratio grid.

    Points where either orientation is Unstable keep a NaN contrast; both
    phase code layers are reported so the cutout is attributable.
    """
    if spec.ratio_axis is None:
        raise ValueError("contrast_map needs a ratio axis")
    ratios = spec.ratio_axis.values()
    omegas = spec.omega_axis.values()
    worker = partial(_contrast_row, spec, eps_den, tol_stab, tol_phase, eps_contrast)
    rows = _run_indexed(worker, ratios.size, jobs)
    return ContrastMapResult(
        omegas=omegas,
        ratios=ratios,
        contrast=np.stack([r[0] for r in rows]),
        rho_pos=np.stack([r[1] for r in rows]),
        rho_neg=np.stack([r[2] for r in rows]),
        phase_pos=np.stack([r[3] for r in rows]),
        phase_neg=np.stack([r[4] for r in rows]),
    )
