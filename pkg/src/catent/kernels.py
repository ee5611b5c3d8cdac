"""Batched Jaynes-Cummings kernels for coherent branch pairs.

The inner Poisson sums run in a compiled extension when it is available and
fall back to numpy otherwise. Set ``CATENT_PURE_PYTHON=1`` to force the
fallback. :data:`BACKEND` names the implementation selected at import.
"""
from concurrent.futures import ThreadPoolExecutor
import math
import os

import numpy as np

from . import _kernels_py
from .errors import TruncationError

_BACKENDS = {"python": _kernels_py.kernel_sums}
try:
    if os.environ.get("CATENT_PURE_PYTHON"):
        raise ImportError("compiled kernel disabled by CATENT_PURE_PYTHON")
    from . import _kernels as _compiled
except ImportError:
    BACKEND = "python"
else:
    _BACKENDS["compiled"] = _compiled.kernel_sums
    BACKEND = "compiled"

MAX_TRUNCATION = 100_000


def available_backends():
    return sorted(_BACKENDS)


def truncation(mu):
    """Photon cutoff ``max(32, ceil(mu + 10 sqrt(mu) + 16))`` for mean photon number `mu`."""
    n = max(32, math.ceil(mu + 10.0 * math.sqrt(mu) + 16.0))
    if n > MAX_TRUNCATION:
        raise TruncationError(f"truncation {n} exceeds {MAX_TRUNCATION} (mean photon number {mu:g})")
    return n


def _lower_cut(nu):
    # Poisson-like weights peak at |beta||gamma|; 10 widths below the peak they are < e^-50.
    return max(0, int(math.floor(nu - 10.0 * math.sqrt(nu) - 16.0)))


def windows(beta, gamma):
    mb = np.abs(beta)
    mg = np.abs(gamma)
    hi = np.array([truncation(max(x, y) ** 2) for x, y in zip(mb, mg)], dtype=np.int64)
    lo = np.array([_lower_cut(x * y) for x, y in zip(mb, mg)], dtype=np.int64)
    return lo, hi


def trig_tables(taus, nmax):
    """``cos^2(tau sqrt n)`` and ``cos(tau sqrt n) sin(tau sqrt(n+1)) / sqrt(n+1)``."""
    taus = np.asarray(taus, dtype=float)
    n = np.arange(nmax, dtype=float)
    rn = np.sqrt(n)
    rn1 = np.sqrt(n + 1.0)
    c = np.cos(np.outer(taus, rn))
    s = np.sin(np.outer(taus, rn1))
    return np.ascontiguousarray(c * c), np.ascontiguousarray(c * s / rn1)


def coherent_kernels(beta, gamma, taus, backend=None, workers=1, chunk=256):
    """JC kernels ``Tr_mode[U (|0><0| (x) |beta><gamma|) U^dagger]`` for many pairs.

    Parameters
    ----------
    beta, gamma : array_like of complex, shape (K,)
        Ket and bra amplitudes of each branch pair.
    taus : array_like of float, shape (T,)

    Returns
    -------
    ndarray, shape (K, T, 2, 2)
        ``K[k, t, q, q']`` is the coefficient of the qubit operator ``|q><q'|``.
    """
    beta = np.ascontiguousarray(np.atleast_1d(beta), dtype=complex)
    gamma = np.ascontiguousarray(np.atleast_1d(gamma), dtype=complex)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    fn = _BACKENDS[backend or BACKEND]
    lo, hi = windows(beta, gamma)
    c2, cs = trig_tables(taus, int(hi.max()))
    K = beta.shape[0]
    spans = [(i, min(i + chunk, K)) for i in range(0, K, chunk)]

    def run(span):
        a, b = span
        return fn(beta[a:b], gamma[a:b], c2, cs, lo[a:b], hi[a:b])

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(sp) for sp in spans]
    s0 = np.concatenate([p[0] for p in parts])
    s1 = np.concatenate([p[1] for p in parts])
    tot = np.concatenate([p[2] for p in parts])
    out = np.empty((K, taus.size, 2, 2), dtype=complex)
    out[:, :, 0, 0] = s0
    out[:, :, 1, 1] = tot[:, None] - s0
    out[:, :, 0, 1] = 1j * gamma.conj()[:, None] * s1
    out[:, :, 1, 0] = -1j * beta[:, None] * s1
    return out
