# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: master-equation RK4 stepping and pair-coupling fill.

Must stay semantically identical to ``py_backend`` (same branch cutoffs,
same update order); only the speed differs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

K0 = 2.0 * np.pi
EPS_DICKE = 1e-8
SERIES_CUTOFF = 1e-3

cdef double C_K0 = 2.0 * 3.14159265358979323846
cdef double C_EPS_DICKE = 1e-8
cdef double C_SERIES_CUTOFF = 1e-3


cdef void _matmul(double complex[:, :] a, double complex[:, :] b,
                  double complex[:, :] out, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


cdef void _rhs(double complex[:, :] h,
               double complex[:, :, :] jumps,
               double[:] rates,
               double complex[:, :] gamma_total,
               double complex[:, :] rho,
               double complex[:, :] out,
               double complex[:, :] w1,
               double complex[:, :] w2,
               Py_ssize_t d, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j, k, l
    cdef double complex acc
    # -i (h rho - rho h) - (gamma_total rho + rho gamma_total) / 2
    _matmul(h, rho, w1, d)
    _matmul(rho, h, w2, d)
    for i in range(d):
        for j in range(d):
            out[i, j] = -1j * (w1[i, j] - w2[i, j])
    _matmul(gamma_total, rho, w1, d)
    _matmul(rho, gamma_total, w2, d)
    for i in range(d):
        for j in range(d):
            out[i, j] = out[i, j] - 0.5 * (w1[i, j] + w2[i, j])
    # + sum_l rate_l J rho J†
    for l in range(m):
        _matmul(jumps[l], rho, w1, d)
        for i in range(d):
            for j in range(d):
                acc = 0
                for k in range(d):
                    acc = acc + w1[i, k] * jumps[l, j, k].conjugate()
                out[i, j] = out[i, j] + rates[l] * acc


def lindblad_rhs(h, jumps, rates, gamma_total, rho):
    """Single right-hand-side evaluation (see ``py_backend.lindblad_rhs``)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] h_ = np.ascontiguousarray(h, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] j_ = np.ascontiguousarray(jumps, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r_ = np.ascontiguousarray(rates, dtype=float)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] g_ = np.ascontiguousarray(gamma_total, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] rho_ = np.ascontiguousarray(rho, dtype=complex)
    cdef Py_ssize_t d = rho_.shape[0]
    cdef Py_ssize_t m = j_.shape[0]
    out = np.empty((d, d), dtype=complex)
    w1 = np.empty((d, d), dtype=complex)
    w2 = np.empty((d, d), dtype=complex)
    cdef double complex[:, :] out_v = out
    cdef double complex[:, :] w1_v = w1
    cdef double complex[:, :] w2_v = w2
    _rhs(h_, j_, r_, g_, rho_, out_v, w1_v, w2_v, d, m)
    return out


def evolve_rk4(h, jumps, rates, rho0, double dt, Py_ssize_t n_steps,
               observable, Py_ssize_t snapshot_stride=0):
    """Fixed-step RK4 evolution (see ``py_backend.evolve_rk4``)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] h_ = np.ascontiguousarray(h, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] j_ = np.ascontiguousarray(jumps, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r_ = np.ascontiguousarray(rates, dtype=float)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] obs_ = np.ascontiguousarray(observable, dtype=complex)
    cdef Py_ssize_t d = h_.shape[0]
    cdef Py_ssize_t m = j_.shape[0]

    rho_arr = np.array(rho0, dtype=complex, order="C")
    gamma_arr = np.zeros((d, d), dtype=complex)
    for l in range(m):
        gamma_arr += r_[l] * (j_[l].conj().T @ j_[l])

    traces = np.empty(n_steps + 1)
    pops = np.empty(n_steps + 1)
    purs = np.empty(n_steps + 1)
    snapshots = []

    k1 = np.empty((d, d), dtype=complex)
    k2 = np.empty((d, d), dtype=complex)
    k3 = np.empty((d, d), dtype=complex)
    k4 = np.empty((d, d), dtype=complex)
    stage = np.empty((d, d), dtype=complex)
    w1 = np.empty((d, d), dtype=complex)
    w2 = np.empty((d, d), dtype=complex)

    cdef double complex[:, :] h_v = h_
    cdef double complex[:, :, :] j_v = j_
    cdef double[:] r_v = r_
    cdef double complex[:, :] rho = rho_arr
    cdef double complex[:, :] gamma_total = gamma_arr
    cdef double complex[:, :] obs = obs_
    cdef double complex[:, :] k1_v = k1, k2_v = k2, k3_v = k3, k4_v = k4
    cdef double complex[:, :] stage_v = stage, w1_v = w1, w2_v = w2
    cdef double[:] traces_v = traces, pops_v = pops, purs_v = purs

    cdef Py_ssize_t step, i, jj
    cdef double tr, pop, pur
    cdef double complex rij

    with nogil:
        tr = 0; pop = 0; pur = 0
        for i in range(d):
            tr = tr + rho[i, i].real
            for jj in range(d):
                rij = rho[i, jj]
                pop = pop + (rij * obs[jj, i]).real
                pur = pur + (rij * rij.conjugate()).real
        traces_v[0] = tr; pops_v[0] = pop; purs_v[0] = pur

    if snapshot_stride:
        snapshots.append((0, rho_arr.copy()))

    for step in range(1, n_steps + 1):
        with nogil:
            _rhs(h_v, j_v, r_v, gamma_total, rho, k1_v, w1_v, w2_v, d, m)
            for i in range(d):
                for jj in range(d):
                    stage_v[i, jj] = rho[i, jj] + (0.5 * dt) * k1_v[i, jj]
            _rhs(h_v, j_v, r_v, gamma_total, stage_v, k2_v, w1_v, w2_v, d, m)
            for i in range(d):
                for jj in range(d):
                    stage_v[i, jj] = rho[i, jj] + (0.5 * dt) * k2_v[i, jj]
            _rhs(h_v, j_v, r_v, gamma_total, stage_v, k3_v, w1_v, w2_v, d, m)
            for i in range(d):
                for jj in range(d):
                    stage_v[i, jj] = rho[i, jj] + dt * k3_v[i, jj]
            _rhs(h_v, j_v, r_v, gamma_total, stage_v, k4_v, w1_v, w2_v, d, m)
            for i in range(d):
                for jj in range(d):
                    rho[i, jj] = rho[i, jj] + (dt / 6.0) * (
                        k1_v[i, jj] + 2.0 * (k2_v[i, jj] + k3_v[i, jj]) + k4_v[i, jj])
            tr = 0; pop = 0; pur = 0
            for i in range(d):
                tr = tr + rho[i, i].real
                for jj in range(d):
                    rij = rho[i, jj]
                    pop = pop + (rij * obs[jj, i]).real
                    pur = pur + (rij * rij.conjugate()).real
            traces_v[step] = tr; pops_v[step] = pop; purs_v[step] = pur
        if snapshot_stride and step % snapshot_stride == 0:
            snapshots.append((step, rho_arr.copy()))

    return rho_arr, traces, pops, purs, snapshots


cdef double _pair_coupling(double sx, double sy, double sz,
                           double dx, double dy, double dz) noexcept nogil:
    cdef double r = sqrt(sx * sx + sy * sy + sz * sz)
    cdef double u, c, a, b, t1, t2, u2
    if r < C_EPS_DICKE:
        return 1.0
    u = C_K0 * r
    c = (dx * sx + dy * sy + dz * sz) / r
    a = 1.0 - c * c
    b = 1.0 - 3.0 * c * c
    if u < C_SERIES_CUTOFF:
        u2 = u * u
        t1 = 1.0 - u2 / 6.0 + u2 * u2 / 120.0
        t2 = -1.0 / 3.0 + u2 / 30.0 - u2 * u2 / 840.0
    else:
        t1 = sin(u) / u
        t2 = cos(u) / (u * u) - sin(u) / (u * u * u)
    return 1.5 * (a * t1 + b * t2)


def pair_coupling(sep, dipole):
    """Scalar pair coupling (see ``py_backend.pair_coupling``)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s = np.ascontiguousarray(sep, dtype=float)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.ascontiguousarray(dipole, dtype=float)
    return _pair_coupling(s[0], s[1], s[2], d[0], d[1], d[2])


def fill_reduced(positions, dipole):
    """Pairwise coupling matrix (see ``py_backend.fill_reduced``)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pos = np.ascontiguousarray(positions, dtype=float)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dip = np.ascontiguousarray(dipole, dtype=float)
    cdef Py_ssize_t n = pos.shape[0]
    out = np.eye(n)
    cdef double[:, :] out_v = out
    cdef Py_ssize_t j, k
    cdef double g
    with nogil:
        for j in range(n):
            for k in range(j + 1, n):
                g = _pair_coupling(pos[j, 0] - pos[k, 0], pos[j, 1] - pos[k, 1],
                                   pos[j, 2] - pos[k, 2], dip[0], dip[1], dip[2])
                out_v[j, k] = g
                out_v[k, j] = g
    return out
