"""Pure numpy implementation of the Poisson-weighted kernel sums.

Same contract as the compiled ``catent._kernels.kernel_sums``.
"""
import numpy as np
from scipy.special import gammaln


def kernel_sums(beta, gamma, c2, cs, n_lo, n_hi):
    beta = np.asarray(beta, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    K = beta.shape[0]
    T, N = c2.shape
    s0 = np.zeros((K, T), dtype=complex)
    s1 = np.zeros((K, T), dtype=complex)
    tot = np.zeros(K, dtype=complex)
    z = beta * gamma.conj()
    lw0 = -0.5 * (np.abs(beta) ** 2 + np.abs(gamma) ** 2)
    for k in range(K):
        if z[k] == 0:
            w = np.array([np.exp(lw0[k])], dtype=complex)
            lo, hi = 0, 1
        else:
            lo, hi = int(n_lo[k]), min(int(n_hi[k]), N)
            n = np.arange(lo, hi)
            mag = np.exp(lw0[k] + n * np.log(np.abs(z[k])) - gammaln(n + 1.0))
            ph = n * np.angle(z[k])
            w = mag * np.cos(ph) + 1j * (mag * np.sin(ph))
        tot[k] = w.sum()
        s0[k] = c2[:, lo:hi] @ w
        s1[k] = cs[:, lo:hi] @ w
    return s0, s1, tot
