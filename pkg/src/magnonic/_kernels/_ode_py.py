"""Pure-Python fallback integrator kernels.

Mirrors _ode_cy step for step: classical RK4 with a fixed time step, a
divergence guard evaluated every step and a trailing-window convergence
test evaluated every window_steps steps.  Status codes: 0 budget exhausted,
1 converged, 2 diverged.
"""

from __future__ import annotations

import numpy as np


def mean_field_relax(
    delta_a: float,
    kappa_a: float,
    delta_m: float,
    gamma_m: float,
    g_m: float,
    kerr: float,
    omega: float,
    a_re: float,
    a_im: float,
    m_re: float,
    m_im: float,
    dt: float,
    n_steps: int,
    window_steps: int,
    conv_tol: float,
    bound: float,
):
    """Relax the four real mean-field components; returns state and status."""
    bound_sq = bound * bound
    prev = (a_re, a_im, m_re, m_im)
    status = 0
    steps = 0

    for i in range(1, n_steps + 1):
        # k1
        det = delta_m + kerr * (m_re * m_re + m_im * m_im)
        k1a = (delta_a - omega) * a_im - kappa_a * a_re + g_m * m_im
        k1b = -(delta_a + omega) * a_re - kappa_a * a_im - g_m * m_re
        k1c = det * m_im - gamma_m * m_re + g_m * a_im
        k1d = -det * m_re - gamma_m * m_im - g_m * a_re
        # k2
        ar = a_re + 0.5 * dt * k1a
        ai = a_im + 0.5 * dt * k1b
        mr = m_re + 0.5 * dt * k1c
        mi = m_im + 0.5 * dt * k1d
        det = delta_m + kerr * (mr * mr + mi * mi)
        k2a = (delta_a - omega) * ai - kappa_a * ar + g_m * mi
        k2b = -(delta_a + omega) * ar - kappa_a * ai - g_m * mr
        k2c = det * mi - gamma_m * mr + g_m * ai
        k2d = -det * mr - gamma_m * mi - g_m * ar
        # k3
        ar = a_re + 0.5 * dt * k2a
        ai = a_im + 0.5 * dt * k2b
        mr = m_re + 0.5 * dt * k2c
        mi = m_im + 0.5 * dt * k2d
        det = delta_m + kerr * (mr * mr + mi * mi)
        k3a = (delta_a - omega) * ai - kappa_a * ar + g_m * mi
        k3b = -(delta_a + omega) * ar - kappa_a * ai - g_m * mr
        k3c = det * mi - gamma_m * mr + g_m * ai
        k3d = -det * mr - gamma_m * mi - g_m * ar
        # k4
        ar = a_re + dt * k3a
        ai = a_im + dt * k3b
        mr = m_re + dt * k3c
        mi = m_im + dt * k3d
        det = delta_m + kerr * (mr * mr + mi * mi)
        k4a = (delta_a - omega) * ai - kappa_a * ar + g_m * mi
        k4b = -(delta_a + omega) * ar - kappa_a * ai - g_m * mr
        k4c = det * mi - gamma_m * mr + g_m * ai
        k4d = -det * mr - gamma_m * mi - g_m * ar

        sixth = dt / 6.0
        a_re = a_re + sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
        a_im = a_im + sixth * (k1b + 2.0 * (k2b + k3b) + k4b)
        m_re = m_re + sixth * (k1c + 2.0 * (k2c + k3c) + k4c)
        m_im = m_im + sixth * (k1d + 2.0 * (k2d + k3d) + k4d)
        steps = i

        norm_sq = a_re * a_re + a_im * a_im + m_re * m_re + m_im * m_im
        if not norm_sq <= bound_sq:
            status = 2
            break

        if i % window_steps == 0:
            drift = max(
                abs(a_re - prev[0]),
                abs(a_im - prev[1]),
                abs(m_re - prev[2]),
                abs(m_im - prev[3]),
            )
            if drift < conv_tol:
                status = 1
                break
            prev = (a_re, a_im, m_re, m_im)

    return a_re, a_im, m_re, m_im, status, steps


def covariance_relax(
    lam: np.ndarray,
    diff: np.ndarray,
    v0: np.ndarray,
    dt: float,
    n_steps: int,
    window_steps: int,
    conv_tol: float,
    bound: float,
):
    """Relax dV/dt = lam V + V lam^T + diff from v0; returns (V, status, steps)."""
    lam = np.asarray(lam, dtype=float)
    lam_t = lam.T
    diff = np.asarray(diff, dtype=float)
    v = np.array(v0, dtype=float)
    prev = v.copy()
    status = 0
    steps = 0

    for i in range(1, n_steps + 1):
        k1 = lam @ v + v @ lam_t + diff
        w = v + 0.5 * dt * k1
        k2 = lam @ w + w @ lam_t + diff
        w = v + 0.5 * dt * k2
        k3 = lam @ w + w @ lam_t + diff
        w = v + dt * k3
        k4 = lam @ w + w @ lam_t + diff
        v = v + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        steps = i

        peak = np.abs(v).max()
        if not peak <= bound:
            status = 2
            break

        if i % window_steps == 0:
            if np.abs(v - prev).max() < conv_tol:
                status = 1
                break
            prev = v.copy()

    return v, status, steps
