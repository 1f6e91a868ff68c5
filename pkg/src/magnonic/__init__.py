"""Steady phases, stability and quantum fluctuations of a driven Kerr
cavity-magnon pair, with orientation-contrast diagnostics and brute-force
cross checks."""

from .errors import (
    ConvergenceFailure,
    DegenerateDenominator,
    Diverged,
    InadmissibleBranch,
    MagnonicError,
    NoRealThreshold,
    PhaseInconsistent,
    SingularSystem,
    UnstableDrift,
    UnstableRegion,
    ZeroCoupling,
)
from .fluctuations import (
    CovarianceMatrix,
    DiffusionMatrix,
    branch_fluctuations,
    diffusion_matrix,
    magnon_fluctuations,
    solve_lyapunov,
)
from .model import (
    EffectiveMagnonMode,
    KerrSign,
    SystemParams,
    bose_occupancy,
    effective_magnon_mode,
    mean_field_rhs,
)
from .nonreciprocity import (
    ContrastPoint,
    OrderParameterResult,
    contrast_ratio,
    contrast_value,
    order_parameter,
    order_parameter_detail,
)
from .oracle import (
    HysteresisResult,
    MeanFieldRelaxation,
    PointCheck,
    ValidationReport,
    hysteresis_sweep,
    relax_covariance,
    relax_mean_field,
    validate_grid,
)
from .stability import (
    BranchAssessment,
    DriftMatrix,
    PhaseLabel,
    PointClassification,
    StabilityVerdict,
    build_drift_matrix,
    classify_phase,
    classify_point,
    drift_eigenvalues,
    drift_matrix_for_occupation,
    is_stable,
    spectral_abscissa,
    stability_verdict,
)
from .steadystate import (
    AdmissibilityTable,
    BranchLabel,
    BranchSolution,
    admissibility,
    branch_amplitudes,
    critical_ratio,
    first_critical_drive,
    photon_occupation,
    second_critical_drive,
    steady_branches,
)
from .sweep import (
    Axis,
    ContrastMapResult,
    CutResult,
    PhaseDiagramResult,
    SweepSpec,
    contrast_map,
    cut_datasets,
    fluctuation_cut,
    order_parameter_cut,
    phase_diagram,
)

__version__ = "0.1.0"
