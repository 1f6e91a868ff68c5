"""Brute-force relaxation cross checks."""

import math

import numpy as np
import pytest

from conftest import make_params
from magnonic import (
    DiffusionMatrix,
    Diverged,
    DriftMatrix,
    KerrSign,
    PhaseLabel,
    PointCheck,
    ValidationReport,
    build_drift_matrix,
    diffusion_matrix,
    hysteresis_sweep,
    mean_field_rhs,
    relax_covariance,
    relax_mean_field,
    solve_lyapunov,
    steady_branches,
    validate_grid,
)


class TestRelaxMeanField:
    def test_undriven_decay(self):
        out = relax_mean_field(
            make_params(), cavity_amp=1 + 1j, magnon_amp=1 - 1j, t_end=60.0, conv_tol=1e-12
        )
        assert out.converged
        assert abs(out.cavity_amp) < 1e-8
        assert abs(out.magnon_amp) < 1e-8

    def test_budget_exhaustion_reported(self):
        out = relax_mean_field(
            make_params(), cavity_amp=1 + 0j, t_end=0.5, conv_tol=1e-15
        )
        assert not out.converged
        assert out.steps == 500

    def test_condensed_branch_reattracts(self):
        p = make_params(omega=2.2)
        _, plus, _ = steady_branches(p)
        out = relax_mean_field(
            p,
            cavity_amp=plus.a_amplitude * (1 + 1e-3),
            magnon_amp=plus.m_amplitude * (1 + 1e-3),
            t_end=2000.0,
            conv_tol=1e-12,
        )
        assert out.converged
        assert abs(out.magnon_amp - plus.m_amplitude) < 1e-6
        da, dm = mean_field_rhs(p, out.cavity_amp, out.magnon_amp)
        assert max(abs(da), abs(dm)) < 1e-8

    def test_bistable_basins(self):
        p = make_params(omega=2.05, sign=KerrSign.NEGATIVE)
        _, _, minus = steady_branches(p)
        near_zero = relax_mean_field(
            p, cavity_amp=1e-6 + 0j, magnon_amp=1e-6 + 0j, t_end=2000.0, conv_tol=1e-12
        )
        assert near_zero.converged
        assert abs(near_zero.magnon_amp) < 1e-6
        near_branch = relax_mean_field(
            p,
            cavity_amp=minus.a_amplitude * 1.01,
            magnon_amp=minus.m_amplitude * 1.01,
            t_end=2000.0,
            conv_tol=1e-12,
        )
        assert near_branch.converged
        assert abs(near_branch.magnon_amp) ** 2 == pytest.approx(
            minus.magnon_occ, abs=1e-6
        )

    def test_runaway_raises(self):
        # with a negligible Kerr coefficient nothing saturates the vacuum
        # instability, so the state runs into the norm guard
        p = make_params(omega=2.8, kerr_magnitude=1e-12)
        with pytest.raises(Diverged):
            relax_mean_field(
                p, cavity_amp=1e-3 + 0j, t_end=2000.0, dt=0.01, conv_tol=0.0
            )


class TestRelaxCovariance:
    def test_exponential_closed_form(self):
        drift = DriftMatrix(-0.5 * np.eye(4))
        diff = DiffusionMatrix(np.eye(4))
        cov = relax_covariance(drift, diff, t_end=60.0)
        assert np.allclose(cov.entries, np.eye(4), atol=1e-9)

    def test_initial_condition_forgotten(self):
        drift = DriftMatrix(-0.5 * np.eye(4))
        diff = DiffusionMatrix(np.eye(4))
        a = relax_covariance(drift, diff, v0=np.zeros((4, 4)), t_end=80.0)
        b = relax_covariance(drift, diff, v0=10.0 * np.eye(4), t_end=80.0)
        assert np.allclose(a.entries, b.entries, atol=1e-10)

    def test_matches_direct_solve(self):
        p = make_params(omega=2.2)
        _, plus, _ = steady_branches(p)
        drift = build_drift_matrix(p, plus.m_amplitude)
        diff = diffusion_matrix(p)
        stationary = solve_lyapunov(drift, diff)
        relaxed = relax_covariance(drift, diff, t_end=200.0, conv_tol=1e-12)
        assert np.abs(stationary.entries - relaxed.entries).max() < 1e-6

    def test_unstable_drift_diverges(self):
        with pytest.raises(Diverged):
            relax_covariance(
                DriftMatrix(0.5 * np.eye(4)),
                DiffusionMatrix(np.eye(4)),
                t_end=100.0,
            )


class TestHysteresisSweep:
    def test_too_few_values(self):
        with pytest.raises(ValueError):
            hysteresis_sweep(make_params(sign=KerrSign.NEGATIVE), [2.0])

    def test_non_monotone_rejected(self):
        with pytest.raises(ValueError):
            hysteresis_sweep(
                make_params(sign=KerrSign.NEGATIVE), [2.0, 2.1, 2.05]
            )

    def test_flat_below_fold(self):
        result = hysteresis_sweep(
            make_params(sign=KerrSign.NEGATIVE), np.linspace(1.85, 1.95, 5)
        )
        assert result.converged.all()
        assert (result.rho < 1e-6).all()

    def test_deterministic_for_seed(self):
        p = make_params(sign=KerrSign.NEGATIVE)
        omegas = np.linspace(1.9, 2.0, 5)
        a = hysteresis_sweep(p, omegas, seed=11)
        b = hysteresis_sweep(p, omegas, seed=11)
        assert np.array_equal(a.rho, b.rho)
        assert np.array_equal(a.converged, b.converged)

    def test_loop_edges(self):
        # sweeping up, the Zero branch survives to the vacuum instability
        # near 2.108; sweeping down, the condensed branch survives to the
        # fold near 2.025
        p = make_params(sign=KerrSign.NEGATIVE)
        omegas = np.linspace(2.0, 2.15, 16)
        up = hysteresis_sweep(p, omegas)
        assert up.converged.all()
        below = omegas <= 2.105
        above = omegas >= 2.115
        assert (up.rho[below] < 0.05).all()
        assert (up.rho[above] > 1.0).all()

        down = hysteresis_sweep(p, omegas[::-1])
        assert down.converged.all()
        high = down.omegas >= 2.025
        low = down.omegas <= 2.02
        assert (down.rho[high] > 1.0).all()
        assert (down.rho[low] < 0.05).all()


class TestReportStructures:
    def make_check(self, **overrides):
        base = dict(
            omega=2.0,
            detuning_ratio=1.0,
            kerr_sign=KerrSign.POSITIVE,
            phase=PhaseLabel.NORMAL,
            zero_stable_formula=True,
            zero_stable_oracle=True,
            condensed_admissible=False,
            condensed_stable_formula=None,
            condensed_stable_oracle=None,
            rho_formula=math.nan,
            rho_oracle=math.nan,
            rho_dev=math.nan,
            covariance_dev=1e-9,
        )
        base.update(overrides)
        return PointCheck(**base)

    def test_verdict_agreement(self):
        assert self.make_check().verdicts_agree
        assert not self.make_check(zero_stable_oracle=None).verdicts_agree
        assert not self.make_check(zero_stable_oracle=False).verdicts_agree
        assert self.make_check(
            condensed_admissible=True,
            condensed_stable_formula=True,
            condensed_stable_oracle=True,
        ).verdicts_agree
        assert not self.make_check(
            condensed_admissible=True,
            condensed_stable_formula=True,
            condensed_stable_oracle=False,
        ).verdicts_agree

    def test_report_thresholds(self):
        report = ValidationReport(
            checks=[self.make_check(rho_dev=2e-5, covariance_dev=1e-8)]
        )
        assert report.disagreements == 0
        assert report.max_rho_dev == 2e-5
        assert not report.ok()
        assert report.ok(rho_tol=1e-4)

    def test_empty_report_ok(self):
        assert ValidationReport().ok()


class TestValidateGrid:
    def test_small_grid_agrees(self):
        report = validate_grid(
            make_params(),
            omega_values=[1.9, 2.2],
            ratio_values=[0.8, 1.3],
        )
        assert len(report.checks) == 8
        assert report.disagreements == 0
        assert report.max_rho_dev < 1e-5
        assert report.max_covariance_dev < 1e-6
        assert report.ok()

    def test_deterministic_for_seed(self):
        kwargs = dict(
            omega_values=[2.2],
            ratio_values=[1.3],
            signs=(KerrSign.NEGATIVE,),
            seed=5,
        )
        a = validate_grid(make_params(), **kwargs).checks[0]
        b = validate_grid(make_params(), **kwargs).checks[0]
        assert a == b

    def test_small_limit_cycle_counted_unstable(self):
        # just past the condensed-branch destabilization the flow settles
        # on a limit cycle a few percent away from the fixed point; the
        # probe must still call the fixed point unstable
        report = validate_grid(
            make_params(),
            omega_values=[2.3684210526315788],
            ratio_values=[1.2736842105263158],
            signs=(KerrSign.NEGATIVE,),
        )
        check = report.checks[0]
        assert check.phase is PhaseLabel.UNSTABLE
        assert check.condensed_stable_formula is False
        assert check.condensed_stable_oracle is False
        assert check.verdicts_agree
