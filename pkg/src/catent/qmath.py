"""Small dense linear algebra and two-qubit entanglement measures.

Two-qubit matrices use the basis order ``|00>, |01>, |10>, |11>`` throughout,
with the first qubit as the most significant index.
"""
import numpy as np

from .errors import NonHermitianError, ValidationError

HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-10
# Jacobi sweeps stop once the off-diagonal mass falls below this fraction of the norm.
_JACOBI_EPS = 1e-17
_MAX_SWEEPS = 64


def as_matrix(m, max_dim=16):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > max_dim:
        raise ValidationError(f"dimension {m.shape[0]} exceeds {max_dim}")
    return m


def hermitize(m, tol=HERMITIAN_TOL):
    """Return ``(M + M^dagger)/2``, rejecting inputs further than `tol` from Hermitian."""
    m = as_matrix(m)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NonHermitianError(dev, tol)
    return 0.5 * (m + m.conj().T)


def _jacobi_symmetric(a):
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    scale = np.sqrt(np.sum(a * a))
    if n < 2 or scale == 0.0:
        return np.diag(a).copy()
    for _ in range(_MAX_SWEEPS):
        off = np.sum(a * a) - np.sum(np.diag(a) ** 2)
        if off <= (_JACOBI_EPS * scale) ** 2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    return np.diag(a).copy()


def hermitian_eigenvalues(m, tol=HERMITIAN_TOL):
    """Ascending eigenvalues of a small Hermitian matrix.

    The complex matrix ``H = X + iY`` is embedded as the real symmetric
    ``[[X, -Y], [Y, X]]``, whose spectrum is that of ``H`` with every value
    doubled; cyclic Jacobi on the embedding is deterministic and accurate to
    rounding for the dimensions used here (at most 16).

    Raises
    ------
    NonHermitianError
        If ``max|M - M^dagger|`` exceeds `tol`.
    """
    h = hermitize(m, tol)
    n = h.shape[0]
    x, y = h.real, h.imag
    embed = np.block([[x, -y], [y, x]])
    ev = np.sort(_jacobi_symmetric(embed))
    return 0.5 * (ev[0::2] + ev[1::2]) if n else ev


def _qubit_pair(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"two-qubit density matrix must be 4x4, got {rho.shape}")
    return rho


def partial_transpose(rho, subsystem="second"):
    """Transpose the indices of one qubit of a 4x4 two-qubit operator."""
    rho = _qubit_pair(rho)
    t = rho.reshape(2, 2, 2, 2)  # (a, b, a', b')
    if subsystem in ("second", 1, "b"):
        t = t.transpose(0, 3, 2, 1)
    elif subsystem in ("first", 0, "a"):
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValidationError(f"unknown subsystem {subsystem!r}")
    return t.reshape(4, 4).copy()


def validate_density(rho, tol=DENSITY_TOL):
    """Check trace, Hermiticity and positivity; return the symmetrized matrix."""
    h = hermitize(rho, tol)
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix trace {tr!r} differs from 1")
    lmin = hermitian_eigenvalues(h, tol)[0]
    if lmin < -tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lmin:.3e}")
    return h


def negativity(rho):
    """Two-qubit negativity ``max(0, -2 * lambda_min(rho^T_b))``.

    Eigenvalues in ``[-1e-12, 0)`` are treated as round-off and clamp to zero.
    """
    h = validate_density(_qubit_pair(rho))
    lmin = hermitian_eigenvalues(partial_transpose(h))[0]
    if lmin >= -1e-12:
        return 0.0
    return min(1.0, -2.0 * lmin)


def linearized_entropy(rho):
    """Linearized entropy ``(4/3)(1 - Tr rho^2)`` of a two-qubit state, in [0, 1]."""
    h = validate_density(_qubit_pair(rho))
    purity = np.real(np.sum(h * h.T))
    return float(np.clip(4.0 / 3.0 * (1.0 - purity), 0.0, 1.0))


def bell_state(which="phi+"):
    """Projector onto one of the four Bell states."""
    s = 1.0 / np.sqrt(2.0)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    v = np.array(vecs[which], dtype=complex)
    return np.outer(v, v.conj())


def werner_state(p):
    return p * bell_state("phi+") + (1.0 - p) * np.eye(4) / 4.0
