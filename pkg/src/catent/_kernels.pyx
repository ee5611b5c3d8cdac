# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Poisson-weighted Jaynes-Cummings kernel sums."""
import numpy as np

from libc.math cimport atan2, cos, exp, lgamma, log, sin


def kernel_sums(const double complex[::1] beta, const double complex[::1] gamma,
                const double[:, ::1] c2, const double[:, ::1] cs,
                const long long[::1] n_lo, const long long[::1] n_hi):
    """For each pair k and time t:

        s0[k, t] = sum_n w_n c2[t, n],   s1[k, t] = sum_n w_n cs[t, n],
        tot[k]   = sum_n w_n,

    with ``w_n = <n|beta_k> <gamma_k|n>`` over ``n_lo[k] <= n < n_hi[k]``.
    """
    cdef Py_ssize_t K = beta.shape[0]
    cdef Py_ssize_t T = c2.shape[0]
    cdef Py_ssize_t N = c2.shape[1]
    s0 = np.zeros((K, T), dtype=np.complex128)
    s1 = np.zeros((K, T), dtype=np.complex128)
    tot = np.zeros(K, dtype=np.complex128)
    cdef double complex[:, ::1] s0v = s0
    cdef double complex[:, ::1] s1v = s1
    cdef double complex[::1] totv = tot
    cdef double[::1] wr = np.zeros(N)
    cdef double[::1] wi = np.zeros(N)
    cdef Py_ssize_t k, t, n, lo, hi
    cdef double br, bi, gr, gi, zr, zi, lw0, lz, az, m, ph
    cdef double tr, ti, ar, ai, xr, xi, c, s
    with nogil:
        for k in range(K):
            br = beta[k].real
            bi = beta[k].imag
            gr = gamma[k].real
            gi = gamma[k].imag
            # z = beta * conj(gamma)
            zr = br * gr + bi * gi
            zi = bi * gr - br * gi
            lw0 = -0.5 * (br * br + bi * bi + gr * gr + gi * gi)
            lo = n_lo[k]
            hi = n_hi[k]
            if hi > N:
                hi = N
            tr = 0.0
            ti = 0.0
            if zr == 0.0 and zi == 0.0:
                lo = 0
                hi = 1
                wr[0] = exp(lw0)
                wi[0] = 0.0
                tr = wr[0]
            else:
                lz = 0.5 * log(zr * zr + zi * zi)
                az = atan2(zi, zr)
                for n in range(lo, hi):
                    m = exp(lw0 + n * lz - lgamma(n + 1.0))
                    ph = n * az
                    wr[n] = m * cos(ph)
                    wi[n] = m * sin(ph)
                    tr = tr + wr[n]
                    ti = ti + wi[n]
            totv[k] = tr + 1j * ti
            for t in range(T):
                ar = 0.0
                ai = 0.0
                xr = 0.0
                xi = 0.0
                for n in range(lo, hi):
                    c = c2[t, n]
                    s = cs[t, n]
                    ar = ar + wr[n] * c
                    ai = ai + wi[n] * c
                    xr = xr + wr[n] * s
                    xi = xi + wi[n] * s
                s0v[k, t] = ar + 1j * ai
                s1v[k, t] = xr + 1j * xi
    return s0, s1, tot
