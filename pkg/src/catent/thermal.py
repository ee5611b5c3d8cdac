"""Displaced thermal distributions and their phase-space averages.

A displaced thermal state of variance ``V`` and (real) displacement ``d`` is
the Gaussian mixture of coherent states

    P(alpha) = 2 / (pi (V - 1)) * exp(-2 |alpha - d|^2 / (V - 1)),

so each quadrature ``Re alpha``, ``Im alpha`` is normal with standard
deviation ``sqrt((V - 1) / 4)`` and the mean photon number is ``(V - 1) / 2``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, i0e

from .errors import ConvergenceError, TruncationError, ValidationError

DEFAULT_NODES = 48
DEFAULT_TOL = 1e-8
MAX_NODES = 256
# Below this magnitude a relative change is measured against the floor instead.
_SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class ThermalEnsemble:
    V: float
    d: float = 0.0
    nodes_per_axis: int = DEFAULT_NODES
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if not np.isfinite(self.V) or self.V < 1.0:
            raise ValidationError(f"V must be >= 1, got {self.V!r}")
        if isinstance(self.d, complex) or not np.isfinite(self.d) or self.d < 0.0:
            raise ValidationError(f"d must be real and >= 0, got {self.d!r}")
        if int(self.nodes_per_axis) < 1:
            raise ValidationError("nodes_per_axis must be positive")
        if not self.tolerance > 0.0:
            raise ValidationError("tolerance must be positive")

    @property
    def mean_photon(self):
        return mean_photon(self.V)

    @property
    def sigma(self):
        """Standard deviation of each quadrature of alpha."""
        return math.sqrt((self.V - 1.0) / 4.0)

    @property
    def is_point_mass(self):
        return self.V == 1.0

    def nodes(self, n=None):
        """Tensor Gauss-Hermite nodes (complex alphas) and weights summing to one."""
        n = self.nodes_per_axis if n is None else int(n)
        x, w = gauss_hermite_rule(n)
        s = self.sigma
        re = self.d + s * x
        im = s * x
        alphas = (re[:, None] + 1j * im[None, :]).ravel()
        weights = np.outer(w, w).ravel()
        return alphas, weights


def variance_from_temperature(beta_omega):
    """Variance ``V = (e^x + 1)/(e^x - 1) = coth(x/2)`` for ``x = beta * omega``."""
    x = float(beta_omega)
    if not x > 0.0:
        raise ValidationError("beta_omega must be positive")
    return 1.0 / math.tanh(0.5 * x)


def mean_photon(V):
    if V < 1.0:
        raise ValidationError(f"V must be >= 1, got {V!r}")
    return 0.5 * (V - 1.0)


def thermal_density(alpha, ens):
    """Value of the displaced thermal P-function at `alpha` (scalar or array)."""
    if ens.V <= 1.0:
        raise ValidationError("the V = 1 distribution is a point mass and has no density")
    width = ens.V - 1.0
    alpha = np.asarray(alpha, dtype=complex)
    val = 2.0 / (math.pi * width) * np.exp(-2.0 * np.abs(alpha - ens.d) ** 2 / width)
    return val if val.ndim else float(val)


@lru_cache(maxsize=None)
def gauss_hermite_rule(n):
    """Probabilists' Gauss-Hermite rule normalized to the standard normal."""
    x, w = hermegauss(int(n))
    w = w / math.sqrt(2.0 * math.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def compensated_sum(values, weights):
    """Neumaier-compensated ``sum_k weights[k] * values[k]`` in index order.

    `values` may carry trailing dimensions; the sum runs over axis 0.
    """
    values = np.asarray(values)
    is_complex = np.iscomplexobj(values)
    if is_complex:
        # compensate real and imaginary parts separately
        values = np.stack([values.real, values.imag], axis=-1)
    values = np.asarray(values, dtype=float)
    total = np.zeros(values.shape[1:])
    comp = np.zeros_like(total)
    for w, v in zip(weights, values):
        term = w * v
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    total = total + comp
    if is_complex:
        return total[..., 0] + 1j * total[..., 1]
    return total


def _quadrature(f, ens, n, vectorized, workers, weight_floor, chunk):
    alphas, weights = ens.nodes(n)
    if weight_floor > 0.0:
        keep = weights >= weight_floor
        alphas, weights = alphas[keep], weights[keep]
    if vectorized:
        parts = [(alphas[i:i + chunk], weights[i:i + chunk]) for i in range(0, len(alphas), chunk)]
        if workers > 1 and len(parts) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                evaluated = list(pool.map(lambda p: np.asarray(f(p[0])), parts))
        else:
            evaluated = [np.asarray(f(p[0])) for p in parts]
        values = np.concatenate(evaluated, axis=0)
    else:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                values = np.asarray(list(pool.map(f, alphas)))
        else:
            values = np.asarray([f(a) for a in alphas])
    return compensated_sum(values, weights)


def node_schedule(start, cap=MAX_NODES):
    sched = [int(start)]
    while sched[-1] < cap:
        sched.append(min(2 * sched[-1], cap))
    return sched


def thermal_average(f, ens, vectorized=False, workers=1, weight_floor=0.0, chunk=4096):
    """Average ``f(alpha)`` over the displaced thermal distribution of `ens`.

    Tensor Gauss-Hermite quadrature centered at ``d`` with the node count
    doubled from ``ens.nodes_per_axis`` (capped at 256 per axis) until the
    relative change between successive estimates drops below
    ``ens.tolerance``. For ``V = 1`` the distribution is a point mass and
    ``f(d)`` is returned.

    Parameters
    ----------
    f : callable
        Pure function of a complex amplitude. With ``vectorized=True`` it
        receives a 1-D array of amplitudes and returns an array whose first
        axis runs over them.
    workers : int
        Threads used to evaluate `f`; the reduction order is fixed, so the
        result does not depend on this value.
    weight_floor : float
        Nodes whose product weight is below this are skipped. Only safe for
        bounded integrands.

    Raises
    ------
    ConvergenceError
        If the estimate has not settled at the node cap; ``estimates`` holds
        the last two values.
    """
    if ens.is_point_mass:
        if vectorized:
            return np.asarray(f(np.array([complex(ens.d)])))[0]
        return f(complex(ens.d))
    prev = est = None
    for n in node_schedule(ens.nodes_per_axis):
        prev, est = est, _quadrature(f, ens, n, vectorized, workers, weight_floor, chunk)
        if prev is not None:
            change = np.max(np.abs(np.asarray(est) - np.asarray(prev)))
            scale = max(np.max(np.abs(est)), _SCALE_FLOOR)
            if change <= ens.tolerance * scale:
                return est[()] if isinstance(est, np.ndarray) and est.ndim == 0 else est
    raise ConvergenceError(
        f"thermal average not converged to {ens.tolerance:g} at {MAX_NODES} nodes per axis "
        f"(V={ens.V}, d={ens.d})",
        estimates=(prev, est),
    )


@lru_cache(maxsize=None)
def _legendre_rule(n):
    x, w = leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def radial_average(g, ens, start=64, cap=8192):
    """Average of ``g(|alpha|^2)`` for an integrand that depends on ``|alpha|`` only.

    The angular integral of the displaced Gaussian is ``2 pi I_0(4 r d/(V-1))``,
    leaving a smooth integral over ``r = |alpha|`` (the factor ``r`` removes
    the cone point at the origin that slows tensor quadrature down). Gauss-
    Legendre on ``[0, d + 14 sigma]`` with doubling until the relative change
    is below ``ens.tolerance``.

    `g` receives a 1-D array of ``|alpha|^2`` values.
    """
    if ens.is_point_mass:
        return float(np.asarray(g(np.array([ens.d ** 2])))[0])
    w2 = ens.V - 1.0
    hi = ens.d + 14.0 * ens.sigma
    prev = None
    n = int(start)
    while n <= cap:
        x, w = _legendre_rule(n)
        r = 0.5 * hi * (x + 1.0)
        # 4 r / (V-1) exp(-2 (r^2 + d^2)/(V-1)) I_0(4 r d/(V-1)), with I_0 scaled for stability
        dens = 4.0 * r / w2 * np.exp(-2.0 * (r - ens.d) ** 2 / w2) * i0e(4.0 * r * ens.d / w2)
        est = float(compensated_sum(dens * np.asarray(g(r * r), dtype=float), 0.5 * hi * w))
        if prev is not None and abs(est - prev) <= ens.tolerance * max(abs(est), _SCALE_FLOOR):
            return est
        prev = est
        n *= 2
    raise ConvergenceError(
        f"radial average not converged to {ens.tolerance:g} (V={ens.V}, d={ens.d})",
        estimates=(prev, est),
    )


# ---------------------------------------------------------------------------
# Exact Fock-basis averages.
#
# For coherent amplitudes the thermal average of |n><m| projections is the
# Fock matrix element of the displaced thermal state,
#     rho_{PQ} = int P(alpha) <P|alpha><alpha|Q> d^2 alpha,
# which for real d >= 0 is a positive generalized-Laguerre expression.
# ---------------------------------------------------------------------------


def _log_laguerre_negative(nmax, k, z):
    """``log L_n^{(k)}(-z)`` for ``n = 0..nmax`` with ``z >= 0``.

    All terms of ``L_n^{(k)}(-z)`` are positive, so the forward three-term
    recurrence is run on ratios, which is stable and cannot overflow.
    """
    out = np.zeros(nmax + 1)
    if nmax == 0:
        return out
    r = 1.0 + k + z  # L_1 / L_0
    out[1] = math.log(r)
    for n in range(1, nmax):
        # (n+1) L_{n+1} = (2n + 1 + k + z) L_n - (n + k) L_{n-1}
        r = ((2 * n + 1 + k + z) - (n + k) / r) / (n + 1)
        out[n + 1] = out[n] + math.log(r)
    return out


def log_fock_elements(V, d, nmax, offset):
    """``log rho_{P, P+offset}`` for ``P = 0..nmax`` of the displaced thermal state.

    Returns ``-inf`` where the element vanishes (``offset != 0`` at ``d = 0``).
    Elements are real and positive for ``d > 0`` and symmetric in the offset.
    """
    k = abs(int(offset))
    P = np.arange(nmax + 1)
    Q = P + k
    nbar = mean_photon(V)
    if nbar == 0.0:
        # coherent state |d>
        if d == 0.0:
            out = np.full(nmax + 1, -np.inf)
            if k == 0:
                out[0] = 0.0
            return out
        ld = math.log(d)
        return -d * d + (P + Q) * ld - 0.5 * (gammaln(P + 1) + gammaln(Q + 1))
    x = nbar / (1.0 + nbar)
    if d == 0.0:
        if k:
            return np.full(nmax + 1, -np.inf)
        return -math.log1p(nbar) + P * math.log(x)
    a0 = d / (1.0 + nbar)
    z = d * d / (nbar * (1.0 + nbar))
    logL = _log_laguerre_negative(nmax, k, z)
    # M_{PQ} = E[e^{-|a|^2} a^P conj(a)^Q] = e^{-d^2/(1+n)}/(1+n) P! x^P a0^k L_P^{(k)}(-z)
    logM = (-math.log1p(nbar) - d * d / (1.0 + nbar)
            + gammaln(P + 1) + P * math.log(x) + k * math.log(a0) + logL)
    return logM - 0.5 * (gammaln(P + 1) + gammaln(Q + 1))


def fock_truncation(V, d, rel_tail=1e-15, limit=10**6):
    """Photon-number cutoff beyond which the displaced thermal populations are negligible.

    Raises
    ------
    TruncationError
        If the cutoff would exceed `limit` (checked before any large allocation).
    """
    nbar = mean_photon(V)
    mean = nbar + d * d
    var = nbar * (nbar + 1.0) + d * d * (2.0 * nbar + 1.0)
    guess = int(mean + 12.0 * math.sqrt(var) + 40)
    if nbar > 0:
        # thermal tails are geometric with ratio nbar / (1 + nbar)
        guess = max(guess, int(mean + math.log(1.0 / rel_tail) * (1.0 + nbar) + 40))
    # extend until the populations left out of the tail sum are negligible
    while True:
        if guess > limit:
            raise TruncationError(f"photon cutoff for V={V!r}, d={d!r} exceeds {limit}")
        pops = np.exp(log_fock_elements(V, d, guess, 0))
        if pops[-1] < 1e-3 * rel_tail / max(1.0, nbar + 1.0) and pops[-1] <= pops[-2]:
            break
        guess *= 2
    cum = np.cumsum(pops[::-1])[::-1]
    above = np.nonzero(cum > rel_tail)[0]
    n = int(above[-1]) + 2 if above.size else 2
    if n > limit:
        raise TruncationError(f"photon cutoff {n} exceeds {limit}")
    return n
