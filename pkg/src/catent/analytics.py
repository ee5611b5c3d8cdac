"""Closed-form entanglement of the cat state and two-mode covariance analysis.

Quadratures are ``x = a + a^dagger`` and ``p = -i (a - a^dagger)`` and the
variance matrix is ``V_ij = <{R_i, R_j}>/2`` in the ordering
``(x_1, p_1, x_2, p_2)``, so the vacuum has the identity as covariance.
"""
from dataclasses import dataclass, field
import enum
import math

import numpy as np

from . import branches as br
from .errors import ValidationError
from .thermal import radial_average, thermal_average

SIMON_TOL = 1e-9
_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class SchmidtPair:
    lambda_minus: float
    lambda_plus: float


def _overlap_exponent(alpha, phi):
    # |alpha|^2 (1 - cos phi), written with sin^2 to keep precision near phi = 0
    return 2.0 * abs(alpha) ** 2 * math.sin(0.5 * phi) ** 2


def schmidt_lambdas(alpha, phi):
    """Schmidt weights of ``make_cat(alpha, phi)``: ``lambda_-+ = (1 +- k)/2``.

    ``k = exp(-|alpha|^2 (1 - cos phi))`` is the modulus of the branch
    overlap. This closed form equals ``N_+-^2 / (N_+^2 + N_-^2)`` but stays
    finite at ``phi = 0``.
    """
    x = _overlap_exponent(alpha, phi)
    lam_plus = -0.5 * math.expm1(-x)
    return SchmidtPair(1.0 - lam_plus, lam_plus)


def pure_cat_entanglement(alpha, phi):
    """Negativity ``sqrt(1 - exp(-2|alpha|^2 (1 - cos phi)))`` of the pure cat state."""
    x = _overlap_exponent(alpha, phi)
    return math.sqrt(-math.expm1(-2.0 * x))


def _pure_cat_entanglement_array(alphas, phi):
    x = 2.0 * np.abs(alphas) ** 2 * math.sin(0.5 * phi) ** 2
    return np.sqrt(-np.expm1(-2.0 * x))


def mixed_cat_entanglement(ens, phi, workers=1, method="radial"):
    """Thermal average of :func:`pure_cat_entanglement` over alpha.

    The integrand depends on ``|alpha|`` only, so the default ``"radial"``
    method integrates the angle analytically; ``"quadrature"`` uses the
    generic tensor rule, which converges slowly when the cone point of the
    integrand at ``alpha = 0`` lies inside the distribution.
    """
    if math.sin(0.5 * phi) == 0.0:
        return 0.0
    if method == "radial":
        k = 4.0 * math.sin(0.5 * phi) ** 2
        return radial_average(lambda r2: np.sqrt(-np.expm1(-k * r2)), ens)
    if method != "quadrature":
        raise ValidationError(f"method must be 'radial' or 'quadrature', got {method!r}")
    val = thermal_average(
        lambda a: _pure_cat_entanglement_array(a, phi), ens, vectorized=True, workers=workers
    )
    return float(np.real(val))


# ---------------------------------------------------------------------------
# covariance matrices
# ---------------------------------------------------------------------------


class SimonVerdict(str, enum.Enum):
    NO_VIOLATION = "no-violation"
    ENTANGLED = "entangled-detected"
    INVALID = "invalid-state"


@dataclass(frozen=True)
class CovarianceMatrix:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    centered: bool = True
    means: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("A", "B", "C"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (2, 2):
                raise ValidationError(f"block {name} must be 2x2, got {m.shape}")
            object.__setattr__(self, name, m)

    @classmethod
    def from_full(cls, m, centered=True):
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise ValidationError(f"covariance matrix must be 4x4, got {m.shape}")
        return cls(m[:2, :2], m[2:, 2:], m[:2, 2:], centered)

    @property
    def full(self):
        return np.block([[self.A, self.C], [self.C.T, self.B]])


def cat_covariance_printed(alpha, phi):
    """Uncentered closed-form blocks of ``make_cat(alpha, phi)``.

    ``s = zeta + phi/2`` and ``r = |alpha|^2 sin(phi) + phi/2`` with zeta the
    phase of alpha. The ``p p`` entry of the cross block is
    ``alpha_phi sin(s) sin(r)``.
    """
    mod = abs(alpha)
    zeta = math.atan2(complex(alpha).imag, complex(alpha).real)
    s = zeta + 0.5 * phi
    r = mod ** 2 * math.sin(phi) + 0.5 * phi
    a_phi = 2.0 * mod * math.exp(-_overlap_exponent(alpha, phi))
    A = 2.0 * np.eye(2)
    cp = math.cos(phi)
    B = 2.0 * mod ** 2 * np.array([
        [1.0 + cp * math.cos(2 * s), math.sin(2 * s) * cp],
        [math.sin(2 * s) * cp, 1.0 - cp * math.cos(2 * s)],
    ]) + np.eye(2)
    C = a_phi * np.array([
        [math.cos(s) * math.cos(r), math.sin(s) * math.cos(r)],
        [math.cos(s) * math.sin(r), math.sin(s) * math.sin(r)],
    ])
    return CovarianceMatrix(A, B, C, centered=False)


def quadrature_moments(state, modes=(0, 1)):
    """First moments and symmetrized second moments of two modes of a branch state.

    Returns ``(means, second)`` with ``means`` of length 4 and ``second`` the
    uncentered 4x4 matrix ``<{R_i, R_j}>/2``; the state need not be normalized
    (moments are divided by its norm).
    """
    i1, i2 = modes
    terms = state.terms
    n2 = state.norm2()

    a = [0j, 0j]
    a2 = [0j, 0j]
    ada = [0.0, 0.0]
    a1a2 = 0j
    a1da2 = 0j
    for cb, lb in terms:
        for ck, lk in terms:
            w = cb.conjugate() * ck
            base = [br.label_overlap(x, y) for x, y in zip(lb, lk)]

            def rest(skip):
                out = 1.0 + 0j
                for idx, v in enumerate(base):
                    if idx not in skip:
                        out *= v
                return out

            for slot, idx in enumerate((i1, i2)):
                r = w * rest({idx})
                if r == 0:
                    continue
                a[slot] += r * br.ladder_element(lb[idx], lk[idx], 0, 1)
                a2[slot] += r * br.ladder_element(lb[idx], lk[idx], 0, 2)
                ada[slot] += (r * br.ladder_element(lb[idx], lk[idx], 1, 1)).real
            r = w * rest({i1, i2})
            if r != 0:
                a1a2 += r * br.ladder_element(lb[i1], lk[i1], 0, 1) * br.ladder_element(lb[i2], lk[i2], 0, 1)
                a1da2 += r * br.ladder_element(lb[i1], lk[i1], 1, 0) * br.ladder_element(lb[i2], lk[i2], 0, 1)
    a = [v / n2 for v in a]
    a2 = [v / n2 for v in a2]
    ada = [v / n2 for v in ada]
    a1a2 /= n2
    a1da2 /= n2
    return _assemble_moments(a, a2, ada, a1a2, a1da2)


def _assemble_moments(a, a2, ada, a1a2, a1da2):
    means = np.array([2 * a[0].real, 2 * a[0].imag, 2 * a[1].real, 2 * a[1].imag])
    m = np.zeros((4, 4))
    for k in range(2):
        o = 2 * k
        m[o, o] = 2 * a2[k].real + 2 * ada[k] + 1.0
        m[o + 1, o + 1] = -2 * a2[k].real + 2 * ada[k] + 1.0
        m[o, o + 1] = m[o + 1, o] = 2 * a2[k].imag
    s, t = a1a2, a1da2
    cross = np.array([
        [2 * (s + t).real, 2 * (s + t).imag],
        [2 * (s - t).imag, 2 * (t - s).real],
    ])
    m[:2, 2:] = cross
    m[2:, :2] = cross.T
    return means, m


def covariance_from_moments(means, second, centered=True):
    m = second - np.outer(means, means) if centered else second
    cov = CovarianceMatrix.from_full(m, centered)
    return CovarianceMatrix(cov.A, cov.B, cov.C, centered, np.asarray(means))


def cat_covariance(alpha, phi, centered=True):
    """Variance matrix of ``make_cat(alpha, phi)`` (micro mode first)."""
    if not centered:
        return cat_covariance_printed(alpha, phi)
    means, second = quadrature_moments(br.make_cat(alpha, phi))
    return covariance_from_moments(means, second, centered=True)


def ecs_covariance(V):
    """Closed-form covariance of the '+'-conditioned entangled coherent state at d = 0."""
    if V < 1.0:
        raise ValidationError(f"V must be >= 1, got {V!r}")
    diag = (V * V + 1.0) / (2.0 * V)
    off = -((V - 1.0) ** 2) / (2.0 * V)
    return CovarianceMatrix(diag * np.eye(2), diag * np.eye(2), off * np.eye(2), centered=True)


def ecs_thermal_covariance(ens, sign="+", phi=math.pi, workers=1):
    """Centered covariance of the thermally mixed conditioned ECS, by quadrature.

    Each alpha contributes its projected (unnormalized) branch state, i.e. its
    moments weighted by the outcome probability; the mixture is normalized once.
    """
    def f(alpha):
        if br.ecs_probability(alpha, sign, phi) == 0.0:
            return np.zeros(21)
        proj = br.conditioned_ecs(alpha, sign, phi, normalize=False)
        w = proj.norm2()
        means, second = quadrature_moments(proj)
        return np.concatenate([[w], w * means, (w * second).ravel()])

    acc = np.real(thermal_average(f, ens, workers=workers))
    p = acc[0]
    means = acc[1:5] / p
    second = acc[5:].reshape(4, 4) / p
    return covariance_from_moments(means, second, centered=True)


def two_mode_squeezed_covariance(r):
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    return CovarianceMatrix(c * np.eye(2), c * np.eye(2), s * np.diag([1.0, -1.0]))


def simon_margin(cov):
    """``det A det B + (1 - |det C|)^2 - tr(AJCJBJC^TJ) - det A - det B``.

    Non-negative for every separable state (vacuum-normalized units).
    """
    A, B, C = cov.A, cov.B, cov.C
    dA, dB, dC = np.linalg.det(A), np.linalg.det(B), np.linalg.det(C)
    tr = np.trace(A @ _J @ C @ _J @ B @ _J @ C.T @ _J)
    return dA * dB + (1.0 - abs(dC)) ** 2 - tr - dA - dB


def is_physical(cov, tol=SIMON_TOL):
    """Robertson-Schrodinger bound ``V + i Omega >= 0``."""
    omega = np.kron(np.eye(2), _J)
    ev = np.linalg.eigvalsh(cov.full + 1j * omega)
    return ev[0] >= -tol * max(1.0, np.max(np.abs(ev)))


def simon_check(cov, tol=SIMON_TOL):
    """Simon's PPT test on a centered, vacuum-normalized two-mode covariance.

    The margin is compared against `tol` scaled by ``max(1, det A det B)`` so
    that round-off in large covariances does not register as a violation.
    """
    if not cov.centered:
        raise ValidationError("Simon's criterion needs a centered covariance matrix")
    for name in ("A", "B"):
        m = getattr(cov, name)
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValidationError(f"block {name} is not symmetric")
    if not is_physical(cov, tol):
        return SimonVerdict.INVALID
    scale = max(1.0, abs(np.linalg.det(cov.A) * np.linalg.det(cov.B)))
    if simon_margin(cov) < -tol * scale:
        return SimonVerdict.ENTANGLED
    return SimonVerdict.NO_VIOLATION
