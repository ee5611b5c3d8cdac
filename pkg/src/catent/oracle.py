"""Brute-force truncated-Fock reference used to certify the closed forms.

Nothing in the production paths imports this module. States are dense
vectors over the tensor basis of all subsystems in order: the modes of the
expanded branch state first, then appended qubits.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from .analytics import covariance_from_moments
from .errors import TruncationError, ValidationError
from .kernels import truncation as default_truncation

LEAK_TOL = 1e-8


@dataclass(frozen=True)
class FockVector:
    mode_dims: tuple
    qubit_count: int
    amplitudes: np.ndarray

    @property
    def dims(self):
        return tuple(self.mode_dims) + (2,) * self.qubit_count

    @property
    def tensor(self):
        return self.amplitudes.reshape(self.dims)

    def norm2(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def _label_vector(label, dim):
    v = np.zeros(dim, dtype=complex)
    if label.is_fock:
        if label.n >= dim:
            raise TruncationError(f"fock label {label.n} does not fit in dimension {dim}", 1.0)
        v[label.n] = 1.0
        return v
    g = label.amp
    if g == 0:
        v[0] = 1.0
        return v
    n = np.arange(dim)
    return np.exp(-0.5 * abs(g) ** 2 + n * np.log(g) - 0.5 * gammaln(n + 1.0))


def expand(state, truncation=None):
    """Dense Fock expansion of a branch state.

    Subsystems holding only Fock labels get dimension 2; coherent ones get
    `truncation` levels (default: the adaptive cutoff of the largest
    amplitude).

    Raises
    ------
    TruncationError
        If the truncated norm misses more than 1e-8 of the exact norm.
    """
    k = state.num_subsystems
    dims = []
    for s in range(k):
        labs = [ls[s] for ls in state.labels]
        if all(l.is_fock for l in labs):
            dims.append(2)
        else:
            mu = max(abs(l.amp) ** 2 for l in labs if not l.is_fock)
            dims.append(int(truncation) if truncation is not None else default_truncation(mu))
    vec = np.zeros(int(np.prod(dims)), dtype=complex)
    for c, ls in state.terms:
        v = np.array([c], dtype=complex)
        for s, lab in enumerate(ls):
            v = np.kron(v, _label_vector(lab, dims[s]))
        vec += v
    out = FockVector(tuple(dims), 0, vec)
    leaked = state.norm2() - out.norm2()
    if abs(leaked) > LEAK_TOL:
        raise TruncationError(f"truncation leaks {leaked:.3e} of the norm", leaked)
    return out


def add_qubits(v, count=1):
    """Append `count` qubits in ``|0>``."""
    amps = v.amplitudes
    for _ in range(count):
        amps = np.kron(amps, np.array([1.0, 0.0]))
    return FockVector(v.mode_dims, v.qubit_count + count, amps)


def mode_to_qubit(v, mode_index):
    """Reinterpret a two-level mode as a qubit (moved behind the existing qubits)."""
    if v.mode_dims[mode_index] != 2:
        raise ValidationError("only a two-level mode can become a qubit")
    nm = len(v.mode_dims)
    order = [i for i in range(nm) if i != mode_index] + list(range(nm, nm + v.qubit_count)) + [mode_index]
    t = v.tensor.transpose(order)
    dims = tuple(d for i, d in enumerate(v.mode_dims) if i != mode_index)
    return FockVector(dims, v.qubit_count + 1, t.reshape(-1).copy())


def jc_exact(v, mode_index, qubit_index, tau):
    """Resonant JC evolution: ``|0, n> <-> |1, n-1>`` rotates by ``tau sqrt n``.

    ``|0, n>`` goes to ``cos(tau sqrt n)|0, n> - i sin(tau sqrt n)|1, n-1>``.
    The top level ``|1, N-1>`` couples outside the truncated space and is
    left alone, as in the exponential of the truncated generator.
    """
    nm = len(v.mode_dims)
    if not 0 <= mode_index < nm or not 0 <= qubit_index < v.qubit_count:
        raise ValidationError("mode or qubit index out of range")
    t = np.moveaxis(v.tensor, (mode_index, nm + qubit_index), (-2, -1)).copy()
    dim = v.mode_dims[mode_index]
    out = t.copy()
    for n in range(1, dim):
        c, s = math.cos(tau * math.sqrt(n)), math.sin(tau * math.sqrt(n))
        a = t[..., n, 0]
        b = t[..., n - 1, 1]
        out[..., n, 0] = c * a - 1j * s * b
        out[..., n - 1, 1] = c * b - 1j * s * a
    out = np.moveaxis(out, (-2, -1), (mode_index, nm + qubit_index))
    return FockVector(v.mode_dims, v.qubit_count, out.reshape(-1).copy())


def jc_generator(dim):
    """Truncated JC generator ``a sigma_+ + a^dagger sigma_-`` on (mode, qubit)."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0|
    return np.kron(a, sp) + np.kron(a.T, sp.T)


def reduce_to_qubits(v):
    """Two-qubit density matrix after tracing out every mode."""
    if v.qubit_count != 2:
        raise ValidationError(f"need exactly two qubits, found {v.qubit_count}")
    m = v.amplitudes.reshape(-1, 4)
    rho = m.T @ m.conj()
    return rho / np.trace(rho).real


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def _expect(v, ops):
    """``<v| prod_k ops[k] |v>`` with ops keyed by mode index (unnormalized)."""
    t = v.tensor
    w = t
    for idx, op in ops.items():
        w = np.moveaxis(np.tensordot(op, w, axes=(1, idx)), 0, idx)
    return np.vdot(t.reshape(-1), w.reshape(-1))


def moment_sums(v, modes=(0, 1)):
    """Unnormalized ``(norm^2, norm^2 * means, norm^2 * second)`` of two modes.

    Summing these over a mixture and dividing by the summed weight gives the
    moments of the mixture.
    """
    i1, i2 = modes
    a1, a2 = _ladder(v.mode_dims[i1]), _ladder(v.mode_dims[i2])
    n2 = v.norm2()
    a = [_expect(v, {i1: a1}), _expect(v, {i2: a2})]
    a_sq = [_expect(v, {i1: a1 @ a1}), _expect(v, {i2: a2 @ a2})]
    ada = [_expect(v, {i1: a1.T @ a1}).real, _expect(v, {i2: a2.T @ a2}).real]
    s = _expect(v, {i1: a1, i2: a2})
    t = _expect(v, {i1: a1.T, i2: a2})
    means = np.array([2 * a[0].real, 2 * a[0].imag, 2 * a[1].real, 2 * a[1].imag])
    m = np.zeros((4, 4))
    for k in range(2):
        o = 2 * k
        # <x^2> = <a^2 + a^dag^2 + 2 a^dag a + 1>,  <p^2> = -<a^2 + a^dag^2> + <2 a^dag a + 1>
        m[o, o] = 2 * a_sq[k].real + 2 * ada[k] + n2
        m[o + 1, o + 1] = -2 * a_sq[k].real + 2 * ada[k] + n2
        m[o, o + 1] = m[o + 1, o] = 2 * a_sq[k].imag
    cross = np.array([
        [2 * (s + t).real, 2 * (s + t).imag],
        [2 * (s - t).imag, 2 * (t - s).real],
    ])
    m[:2, 2:] = cross
    m[2:, :2] = cross.T
    return n2, means, m


def moments(v, modes=(0, 1), centered=True):
    """Vacuum-normalized covariance of two modes (``x = a + a^dag``, ``p = -i(a - a^dag)``)."""
    w, means, second = moment_sums(v, modes)
    return covariance_from_moments(means / w, second / w, centered=centered)


def symmetric_scheme(state, tau, truncation=None):
    """Both subsystems of `state` exchange with their own qubit for time `tau`."""
    v = add_qubits(expand(state, truncation), 2)
    v = jc_exact(v, 0, 0, tau)
    return reduce_to_qubits(jc_exact(v, 1, 1, tau))


def single_cavity_scheme(state, tau, truncation=None):
    """Subsystem 0 of `state` is qubit a itself; subsystem 1 exchanges with qubit b."""
    v = mode_to_qubit(expand(state, truncation), 0)
    v = add_qubits(v, 1)
    return reduce_to_qubits(jc_exact(v, 0, 1, tau))
