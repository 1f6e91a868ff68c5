#!/usr/bin/env python3
"""Timing comparison of the integrator kernel backends.

Runs identical fixed-step workloads through the compiled kernel and the
pure-Python fallback and reports per-step cost and speedup.  The workloads
mirror what the relaxation oracle does in practice: a mean-field relaxation
at a bistable drive point and a covariance relaxation on the condensed
branch.  Convergence checks are disabled so both backends do exactly the
requested number of steps.
"""

import argparse
import time

import numpy as np

from magnonic import (
    KerrSign,
    SystemParams,
    build_drift_matrix,
    diffusion_matrix,
    steady_branches,
)
from magnonic._kernels import _ode_py

try:
    from magnonic._kernels import _ode_cy
except ImportError:
    _ode_cy = None


def reference_point() -> SystemParams:
    return SystemParams(
        delta_a=3.0,
        delta_m=3.9,
        gamma_m=1.0,
        g_m=2.4,
        kerr_sign=KerrSign.NEGATIVE,
        omega_drive=2.05,
    )


def best_of(fn, args, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(
        description="compare the compiled and pure-Python integrator kernels"
    )
    parser.add_argument("--mf-steps", type=int, default=200000)
    parser.add_argument("--cov-steps", type=int, default=20000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    p = reference_point()
    # window_steps past the budget: the trailing-window test never fires
    mf_args = (
        p.delta_a, p.kappa_a, p.delta_m, p.gamma_m, p.g_m, p.kerr,
        p.omega_drive, 0.3, -0.2, 1.1, 0.4,
        1e-3, args.mf_steps, args.mf_steps + 1, 0.0, 1e6,
    )

    _, _, minus = steady_branches(p)
    cov_args = (
        build_drift_matrix(p, minus.m_amplitude).entries,
        diffusion_matrix(p).entries,
        0.5 * np.eye(4),
        1e-3, args.cov_steps, args.cov_steps + 1, 0.0, 1e12,
    )

    workloads = (
        ("mean-field relax", "mean_field_relax", mf_args, args.mf_steps),
        ("covariance relax", "covariance_relax", cov_args, args.cov_steps),
    )

    print(f"{'workload':<18}{'steps':>9}{'python':>12}{'cython':>12}{'speedup':>9}")
    for label, fn_name, call_args, steps in workloads:
        t_py, r_py = best_of(getattr(_ode_py, fn_name), call_args, args.repeats)
        if _ode_cy is None:
            print(f"{label:<18}{steps:>9}{t_py:>11.3f}s{'absent':>12}{'':>9}")
            continue
        t_cy, r_cy = best_of(getattr(_ode_cy, fn_name), call_args, args.repeats)
        print(
            f"{label:<18}{steps:>9}{t_py:>11.3f}s{t_cy:>11.3f}s"
            f"{t_py / t_cy:>8.1f}x"
        )
        if fn_name == "mean_field_relax":
            dev = max(abs(a - b) for a, b in zip(r_py[:4], r_cy[:4]))
        else:
            dev = float(np.abs(np.asarray(r_py[0]) - np.asarray(r_cy[0])).max())
        print(f"{'':<18}{'':>9}  backends agree to {dev:.1e}")
    if _ode_cy is None:
        print("compiled kernel not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
