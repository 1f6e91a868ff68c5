"""Stationary quantum fluctuations around a stable steady point.

The linearized quadrature fluctuations obey an Ornstein-Uhlenbeck equation
with the drift matrix of the branch and input noise set by the decay rates
and thermal occupations.  The stationary covariance V solves the continuous
Lyapunov equation

    Lambda V + V Lambda^T = -D,

solved here by vectorizing to a 16x16 linear system and LU factorization.
The incoherent magnon population follows from the magnon block of V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem, UnstableDrift
from .model import SystemParams
from .stability import TOL_STAB_DEFAULT, DriftMatrix, spectral_abscissa

NEAR_MARGINAL_DEFAULT = 1e-6


@dataclass(frozen=True)
class DiffusionMatrix:
    """Diagonal input-noise matrix in the quadrature basis."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError("diffusion matrix must be 4x4")
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric stationary covariance of the quadrature fluctuations.

    near_marginal flags solutions obtained within marginal_threshold of the
    stability boundary, where the covariance is large and increasingly
    sensitive to the drift.
    """

    entries: np.ndarray
    near_marginal: bool = False

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError("covariance matrix must be 4x4")
        object.__setattr__(self, "entries", arr)


def diffusion_matrix(params: SystemParams) -> DiffusionMatrix:
    cavity = (2.0 * params.nbar_a + 1.0) * params.kappa_a
    magnon = (2.0 * params.nbar_m + 1.0) * params.gamma_m
    return DiffusionMatrix(np.diag([cavity, cavity, magnon, magnon]))


def solve_lyapunov(
    drift: DriftMatrix,
    diffusion: DiffusionMatrix,
    tol_stab: float = TOL_STAB_DEFAULT,
    marginal_threshold: float = NEAR_MARGINAL_DEFAULT,
) -> CovarianceMatrix:
    """Stationary covariance of a stable drift."""
    top = spectral_abscissa(drift)
    if not top < -tol_stab:
        raise UnstableDrift(
            f"spectral abscissa {top:.3e} is not below -{tol_stab:.1e}"
        )
    lam = drift.entries
    eye = np.eye(4)
    system = np.kron(eye, lam) + np.kron(lam, eye)
    try:
        flat = np.linalg.solve(system, -diffusion.entries.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("vectorized Lyapunov system is singular") from exc
    cov = flat.reshape(4, 4)
    cov = 0.5 * (cov + cov.T)
    return CovarianceMatrix(cov, near_marginal=top > -marginal_threshold)


def magnon_fluctuations(covariance: CovarianceMatrix) -> float:
    """Incoherent magnon occupation from the magnon block of V.

    Clamped at zero: vacuum covariance gives exactly zero and roundoff can
    land a hair below.
    """
    v = covariance.entries
    value = 0.5 * (v[2, 2] + v[3, 3] - 1.0)
    return value if value > 0.0 else 0.0


def branch_fluctuations(
    params: SystemParams,
    drift: DriftMatrix,
    tol_stab: float = TOL_STAB_DEFAULT,
    marginal_threshold: float = NEAR_MARGINAL_DEFAULT,
) -> tuple[float, CovarianceMatrix]:
    """Magnon fluctuation number and covariance for one stable branch."""
    cov = solve_lyapunov(drift, diffusion_matrix(params), tol_stab, marginal_threshold)
    return magnon_fluctuations(cov), cov
