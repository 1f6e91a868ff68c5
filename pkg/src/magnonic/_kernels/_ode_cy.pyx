# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrator kernels; see _ode_py for the reference semantics."""

import numpy as np


def mean_field_relax(
    double delta_a,
    double kappa_a,
    double delta_m,
    double gamma_m,
    double g_m,
    double kerr,
    double omega,
    double a_re,
    double a_im,
    double m_re,
    double m_im,
    double dt,
    long n_steps,
    long window_steps,
    double conv_tol,
    double bound,
):
    cdef double bound_sq = bound * bound
    cdef double p0 = a_re, p1 = a_im, p2 = m_re, p3 = m_im
    cdef double det, ar, ai, mr, mi, sixth, norm_sq, drift, d
    cdef double k1a, k1b, k1c, k1d, k2a, k2b, k2c, k2d
    cdef double k3a, k3b, k3c, k3d, k4a, k4b, k4c, k4d
    cdef long i, steps = 0
    cdef int status = 0

    for i in range(1, n_steps + 1):
        det = delta_m + kerr * (m_re * m_re + m_im * m_im)
        k1a = (delta_a - omega) * a_im - kappa_a * a_re + g_m * m_im
        k1b = -(delta_a + omega) * a_re - kappa_a * a_im - g_m * m_re
        k1c = det * m_im - gamma_m * m_re + g_m * a_im
        k1d = -det * m_re - gamma_m * m_im - g_m * a_re

        ar = a_re + 0.5 * dt * k1a
        ai = a_im + 0.5 * dt * k1b
        mr = m_re + 0.5 * dt * k1c
        mi = m_im + 0.5 * dt * k1d
        det = delta_m + kerr * (mr * mr + mi * mi)
        k2a = (delta_a - omega) * ai - kappa_a * ar + g_m * mi
        k2b = -(delta_a + omega) * ar - kappa_a * ai - g_m * mr
        k2c = det * mi - gamma_m * mr + g_m * ai
        k2d = -det * mr - gamma_m * mi - g_m * ar

        ar = a_re + 0.5 * dt * k2a
        ai = a_im + 0.5 * dt * k2b
        mr = m_re + 0.5 * dt * k2c
        mi = m_im + 0.5 * dt * k2d
        det = delta_m + kerr * (mr * mr + mi * mi)
        k3a = (delta_a - omega) * ai - kappa_a * ar + g_m * mi
        k3b = -(delta_a + omega) * ar - kappa_a * ai - g_m * mr
        k3c = det * mi - gamma_m * mr + g_m * ai
        k3d = -det * mr - gamma_m * mi - g_m * ar

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
            drift = 0.0
            d = a_re - p0
            if d < 0:
                d = -d
            if d > drift:
                drift = d
            d = a_im - p1
            if d < 0:
                d = -d
            if d > drift:
                drift = d
            d = m_re - p2
            if d < 0:
                d = -d
            if d > drift:
                drift = d
            d = m_im - p3
            if d < 0:
                d = -d
            if d > drift:
                drift = d
            if drift < conv_tol:
                status = 1
                break
            p0 = a_re
            p1 = a_im
            p2 = m_re
            p3 = m_im

    return a_re, a_im, m_re, m_im, status, steps


cdef inline void _cov_rhs(double[4][4] lam, double[4][4] diff,
                          double[4][4] v, double[4][4] out) noexcept:
    cdef int i, j, k
    cdef double acc
    for i in range(4):
        for j in range(4):
            acc = diff[i][j]
            for k in range(4):
                acc += lam[i][k] * v[k][j] + v[i][k] * lam[j][k]
            out[i][j] = acc


def covariance_relax(
    object lam_in,
    object diff_in,
    object v0_in,
    double dt,
    long n_steps,
    long window_steps,
    double conv_tol,
    double bound,
):
    cdef double[4][4] lam, diff, v, prev, w, k1, k2, k3, k4
    cdef double[:, :] lam_mv = np.ascontiguousarray(lam_in, dtype=np.float64)
    cdef double[:, :] diff_mv = np.ascontiguousarray(diff_in, dtype=np.float64)
    cdef double[:, :] v_mv = np.ascontiguousarray(v0_in, dtype=np.float64)
    cdef int i, j
    cdef long step, steps = 0
    cdef int status = 0
    cdef double peak, gap, d, sixth

    for i in range(4):
        for j in range(4):
            lam[i][j] = lam_mv[i, j]
            diff[i][j] = diff_mv[i, j]
            v[i][j] = v_mv[i, j]
            prev[i][j] = v_mv[i, j]

    for step in range(1, n_steps + 1):
        _cov_rhs(lam, diff, v, k1)
        for i in range(4):
            for j in range(4):
                w[i][j] = v[i][j] + 0.5 * dt * k1[i][j]
        _cov_rhs(lam, diff, w, k2)
        for i in range(4):
            for j in range(4):
                w[i][j] = v[i][j] + 0.5 * dt * k2[i][j]
        _cov_rhs(lam, diff, w, k3)
        for i in range(4):
            for j in range(4):
                w[i][j] = v[i][j] + dt * k3[i][j]
        _cov_rhs(lam, diff, w, k4)
        sixth = dt / 6.0
        for i in range(4):
            for j in range(4):
                v[i][j] = v[i][j] + sixth * (
                    k1[i][j] + 2.0 * (k2[i][j] + k3[i][j]) + k4[i][j]
                )
        steps = step

        peak = 0.0
        for i in range(4):
            for j in range(4):
                d = v[i][j]
                if d < 0:
                    d = -d
                if d > peak:
                    peak = d
        if not peak <= bound:
            status = 2
            break

        if step % window_steps == 0:
            gap = 0.0
            for i in range(4):
                for j in range(4):
                    d = v[i][j] - prev[i][j]
                    if d < 0:
                        d = -d
                    if d > gap:
                        gap = d
            if gap < conv_tol:
                status = 1
                break
            for i in range(4):
                for j in range(4):
                    prev[i][j] = v[i][j]

    out = np.empty((4, 4), dtype=np.float64)
    cdef double[:, :] out_mv = out
    for i in range(4):
        for j in range(4):
            out_mv[i, j] = v[i][j]
    return out, status, steps
