"""Entangling power: transfer of field entanglement to two qubits.

Each qubit starts in ``|0>`` and either undergoes a resonant Jaynes-Cummings
exchange with one field subsystem (carrier ``"mode"``) or *is* that subsystem
(carrier ``"qubit"``, used when a two-level system was entangled directly).
For a branch pair ``(i, j)`` the mode trace of the JC evolution is the kernel

    K[q][q'] = sum_n A_q(n) conj(A_q'(n)) <n+q|l_i> <l_j|n+q'>,
    A_0(n) = cos(tau sqrt n),  A_1(n) = -i sin(tau sqrt(n+1)),

and the two-qubit state is ``sum_ij c_i conj(c_j) K_a(i, j) (x) K_b(i, j)``
in the basis ``|00>, |01>, |10>, |11>`` (qubit a first).

Thermal averages are taken over the density-matrix entries and only then
is the state measured. Two averaging methods are provided:

``"fock"``
    Exact: the average of ``<P|alpha><alpha|Q>`` is the Fock element of the
    displaced thermal state, so every entry becomes a one- or two-index sum
    over photon numbers.
``"quadrature"``
    Gauss-Hermite quadrature of the per-alpha matrices. Only practical for
    small V (the integrands oscillate like ``exp(2i tau |alpha|)``); kept as
    an independent cross-check.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from . import branches as br
from . import kernels
from .errors import ConvergenceError, ValidationError
from .qmath import hermitize, linearized_entropy, negativity
from .thermal import ThermalEnsemble, fock_truncation, log_fock_elements, thermal_average

SCHEMES = ("symmetric", "single_cavity", "ecs_plus", "ecs_minus")
CARRIERS = ("mode", "qubit")
TELEPORT_THRESHOLD = 2.0 / 3.0
DEFAULT_TAUS = np.round(np.arange(0.0, 10.0 + 1e-9, 0.05), 10)
# tau values are processed in blocks of this size whatever the worker count
TAU_BLOCK = 32
# quadrature nodes carrying less weight than this are skipped (integrands are bounded)
QUAD_WEIGHT_FLOOR = 1e-20


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _rabi_tables(taus, nmax):
    """``A_0(n)`` and ``A_1(n)`` on a (T, nmax) grid."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    n = np.arange(nmax, dtype=float)
    a0 = np.cos(np.outer(taus, np.sqrt(n))).astype(complex)
    a1 = -1j * np.sin(np.outer(taus, np.sqrt(n + 1.0)))
    return a0, a1


def _fock_kernels(ni, nj, taus):
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    out = np.zeros((taus.size, 2, 2), dtype=complex)
    if ni == 0 and nj == 0:
        out[:, 0, 0] = 1.0
    elif ni == 1 and nj == 1:
        out[:, 0, 0] = np.cos(taus) ** 2
        out[:, 1, 1] = np.sin(taus) ** 2
    elif ni == 0:
        out[:, 0, 1] = 1j * np.sin(taus)
    else:
        out[:, 1, 0] = -1j * np.sin(taus)
    return out


def jc_kernel_fock(n_i, n_j, tau):
    """Kernel for the Fock branch pair ``|n_i><n_j|`` with ``n_i, n_j`` in {0, 1}."""
    if n_i not in (0, 1) or n_j not in (0, 1):
        raise ValidationError(f"fock kernels need photon numbers 0 or 1, got ({n_i}, {n_j})")
    return _fock_kernels(n_i, n_j, [tau])[0]


def jc_kernel_coherent(beta, gamma, tau):
    """Kernel for the coherent branch pair ``|beta><gamma|`` (adaptive Poisson truncation)."""
    return kernels.coherent_kernels([beta], [gamma], [tau])[0, 0]


def _label_amplitudes(label, nmax):
    n = np.arange(nmax)
    out = np.zeros(nmax, dtype=complex)
    if label.is_fock:
        out[label.n] = 1.0
        return out
    g = label.amp
    if g == 0:
        out[0] = 1.0
        return out
    return np.exp(-0.5 * abs(g) ** 2 + n * np.log(g) - 0.5 * gammaln(n + 1.0))


def _mixed_kernels(li, lj, taus):
    amps = [l.amp for l in (li, lj) if not l.is_fock]
    nmax = kernels.truncation(max(abs(a) ** 2 for a in amps)) + 2
    ui = _label_amplitudes(li, nmax)
    uj = _label_amplitudes(lj, nmax)
    A = _rabi_tables(taus, nmax - 1)
    out = np.empty((len(A[0]), 2, 2), dtype=complex)
    for q in (0, 1):
        for qq in (0, 1):
            w = ui[q:q + nmax - 1] * uj[qq:qq + nmax - 1].conj()
            out[:, q, qq] = (A[q] * A[qq].conj()) @ w
    return out


def _pair_kernels(li, lj, alphas, taus, carrier):
    """Kernels of template labels scaled by each alpha: shape (len(alphas), T, 2, 2)."""
    nA, nT = len(alphas), len(taus)
    if carrier == "qubit":
        if not (li.is_fock and lj.is_fock):
            raise ValidationError("a qubit carrier needs fock labels")
        out = np.zeros((1, nT, 2, 2), dtype=complex)
        out[:, :, li.n, lj.n] = 1.0
        return np.broadcast_to(out, (nA, nT, 2, 2))
    if li.is_fock and lj.is_fock:
        return np.broadcast_to(_fock_kernels(li.n, lj.n, taus), (nA, nT, 2, 2))
    if not li.is_fock and not lj.is_fock:
        return kernels.coherent_kernels(li.amp * alphas, lj.amp * alphas, taus)
    out = np.empty((nA, nT, 2, 2), dtype=complex)
    for k, a in enumerate(alphas):
        si = li if li.is_fock else br.coherent(li.amp * a)
        sj = lj if lj.is_fock else br.coherent(lj.amp * a)
        out[k] = _mixed_kernels(si, sj, taus)
    return out


def _check_carriers(carriers):
    carriers = tuple(carriers)
    if len(carriers) != 2 or any(c not in CARRIERS for c in carriers):
        raise ValidationError(f"carriers must be two of {CARRIERS}, got {carriers!r}")
    return carriers


def _batch_states(template, alphas, taus_a, taus_b, carriers):
    """Unnormalized two-qubit matrices, shape (len(alphas), T, 4, 4)."""
    if template.num_subsystems != 2:
        raise ValidationError("two-qubit transfer needs a two-subsystem branch state")
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    nT = len(taus_a)
    rho = np.zeros((len(alphas), nT, 4, 4), dtype=complex)
    terms = template.terms
    for ci, (la, lb) in terms:
        for cj, (ma, mb) in terms:
            ka = _pair_kernels(la, ma, alphas, taus_a, carriers[0])
            kb = _pair_kernels(lb, mb, alphas, taus_b, carriers[1])
            rho += (ci * cj.conjugate()) * np.einsum("ktab,ktcd->ktacbd", ka, kb).reshape(rho.shape)
    return rho


def _trace_normalize(rho):
    tr = np.einsum("...ii->...", rho).real
    if np.any(tr <= 0.0):
        raise ValidationError("two-qubit matrix has non-positive trace")
    out = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    return out / tr[..., None, None]


def two_qubit_state(state, tau_a, tau_b, carriers=("mode", "mode")):
    """Reduced two-qubit state after local transfer from the two subsystems of `state`.

    Parameters
    ----------
    state : BranchState
        Two subsystems; subsystem 0 feeds qubit a, subsystem 1 feeds qubit b.
    tau_a, tau_b : float
        Rescaled JC interaction times. Ignored for a ``"qubit"`` carrier.
    carriers : pair of {"mode", "qubit"}

    Returns
    -------
    ndarray, shape (4, 4)
        Hermitian, unit trace.
    """
    carriers = _check_carriers(carriers)
    rho = _batch_states(state, [1.0], [float(tau_a)], [float(tau_b)], carriers)[0, 0]
    rho = hermitize(rho, tol=1e-8)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchemeSpec:
    """Scheme, interaction phase, JC times and the thermal ensemble of the field.

    ``tau_a`` and ``tau_b`` are the interaction times used by
    :func:`averaged_state`; curves override both with the grid value
    (``tau_a`` is irrelevant in the single-cavity scheme).
    """

    scheme: str
    phi: float
    ensemble: ThermalEnsemble
    tau_a: float = 0.0
    tau_b: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not math.isfinite(self.phi):
            raise ValidationError("phi must be finite")


def scheme_template(scheme, phi):
    """Branch state at ``alpha = 1`` and the carriers of the two qubits.

    Every coherent amplitude of the schemes is linear in alpha and the
    coefficients do not depend on it; the ECS template carries the bare
    (unnormalized) projection so that its norm is the outcome probability.
    """
    if scheme == "symmetric":
        return br.make_cat(1.0, phi), ("mode", "mode")
    if scheme == "single_cavity":
        cat = br.dispersive_evolve(br.plus_state(br.coherent(1.0)), 0, 1, phi)
        return cat, ("qubit", "mode")
    if scheme in ("ecs_plus", "ecs_minus"):
        sign = "+" if scheme == "ecs_plus" else "-"
        return br.conditioned_ecs(1.0, sign, phi, normalize=False), ("mode", "mode")
    raise ValidationError(f"unknown scheme {scheme!r}")


def single_cavity_state(alpha, phi, tau):
    """Qubit a dispersively entangled with the field, then JC transfer to qubit b."""
    s = br.dispersive_evolve(br.plus_state(br.coherent(alpha)), 0, 1, phi)
    return two_qubit_state(s, 0.0, tau, carriers=("qubit", "mode"))


def map_drive_to_displacement(drive_amplitude, transit_time):
    """Displacement ``d = beta * dt`` produced by a classical drive during the transit."""
    if drive_amplitude < 0 or transit_time < 0:
        raise ValidationError("drive amplitude and transit time must be nonnegative")
    return float(drive_amplitude) * float(transit_time)


def teleportation_usable(s_l):
    """True iff the linearized entropy is strictly below 2/3."""
    if not 0.0 <= s_l <= 1.0:
        raise ValidationError(f"linearized entropy must lie in [0, 1], got {s_l!r}")
    return s_l < TELEPORT_THRESHOLD


# ---------------------------------------------------------------------------
# exact Fock-basis thermal averages
# ---------------------------------------------------------------------------


class _FockElements:
    """``log rho_{P,Q}`` of a displaced thermal state for ``|P - Q| <= 2``."""

    def __init__(self, V, d, nmax):
        self.nmax = nmax
        self.tabs = [log_fock_elements(V, d, nmax + 2, k) for k in range(3)]

    def log(self, P, Q):
        P = np.asarray(P)
        Q = np.asarray(Q)
        k = np.abs(Q - P)
        m = np.minimum(P, Q)
        out = np.full(np.broadcast(P, Q).shape, -np.inf)
        ok = (m >= 0) & (np.maximum(P, Q) <= self.nmax)
        for kk in range(3):
            sel = ok & (k == kk)
            out[sel] = self.tabs[kk][m[sel]]
        return out


def _log_power(s, P):
    """``log(s^P)`` elementwise for integer arrays P (``-inf`` for ``0^P``, P > 0)."""
    P = np.asarray(P)
    if s == 0:
        return np.where(P == 0, 0.0, -np.inf).astype(complex)
    return P * np.log(complex(s))


def _coherent_scales(template):
    """Per-subsystem coherent scale ``s_ik`` or None, and the common ``sum_k |s_ik|^2``."""
    kinds = []
    for k in range(template.num_subsystems):
        fk = [ls[k].is_fock for ls in template.labels]
        if all(fk):
            kinds.append("fock")
        elif not any(fk):
            kinds.append("coherent")
        else:
            raise ValidationError("the exact thermal path needs uniform label kinds per subsystem")
    weights = {round(sum(abs(ls[k].amp) ** 2 for k in range(len(ls)) if kinds[k] == "coherent"), 12)
               for ls in template.labels}
    if len(weights) != 1:
        raise ValidationError("branches must carry equal total coherent intensity")
    return kinds, weights.pop()


def _fock_factor(li, lj, taus, carrier):
    if carrier == "qubit":
        out = np.zeros((len(taus), 2, 2), dtype=complex)
        out[:, li.n, lj.n] = 1.0
        return out
    return _fock_kernels(li.n, lj.n, taus)


def _exact_one_mode(template, kinds, carriers, taus_a, taus_b, rho_el, scale, nmax):
    """One coherent subsystem: entries are single sums over n."""
    kc = kinds.index("coherent")
    kf = 1 - kc
    taus = (taus_a, taus_b)
    A = _rabi_tables(taus[kc], nmax)
    n = np.arange(nmax)
    nT = len(taus_a)
    out = np.zeros((nT, 2, 2, 2, 2), dtype=complex)  # (t, qa, qb, qa', qb')
    for ci, li in template.terms:
        for cj, lj in template.terms:
            si = li[kc].amp / scale
            sj = lj[kc].amp / scale
            fac = _fock_factor(li[kf], lj[kf], taus[kf], carriers[kf])
            K = np.empty((nT, 2, 2), dtype=complex)
            for q in (0, 1):
                for qq in (0, 1):
                    P, Q = n + q, n + qq
                    w = np.exp(rho_el.log(P, Q) + _log_power(si, P) + np.conj(_log_power(sj, Q)))
                    K[:, q, qq] = (A[q] * A[qq].conj()) @ w
            c = ci * cj.conjugate()
            if kc == 1:
                out += c * np.einsum("tab,tcd->tacbd", fac, K)
            else:
                out += c * np.einsum("tab,tcd->tacbd", K, fac)
    return out.reshape(nT, 4, 4)


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _exact_two_mode(template, taus_a, taus_b, rho_el, scale, nmax, workers):
    """Both subsystems coherent: entries are double sums ``T_a G T_b`` over (n_a, n_b)."""
    n = np.arange(nmax)
    na, nb = np.meshgrid(n, n, indexing="ij")
    Aa = _rabi_tables(taus_a, nmax)
    Ab = _rabi_tables(taus_b, nmax)
    nT = len(taus_a)
    out = np.zeros((nT, 4, 4), dtype=complex)
    blocks = [slice(i, min(i + TAU_BLOCK, nT)) for i in range(0, nT, TAU_BLOCK)]
    idx = [(qa, qb) for qa in (0, 1) for qb in (0, 1)]
    for r, (qa, qb) in enumerate(idx):
        for c in range(r, 4):
            qa2, qb2 = idx[c]
            Pa, Pb = na + qa, nb + qb
            Qa, Qb = na + qa2, nb + qb2
            P, Q = Pa + Pb, Qa + Qb
            base = rho_el.log(P, Q)
            base = base + 0.5 * (_log_binom(P, Pa) + _log_binom(Q, Qa))
            live = np.isfinite(base)
            G = np.zeros((nmax, nmax), dtype=complex)
            for ci, li in template.terms:
                for cj, lj in template.terms:
                    ph = (_log_power(li[0].amp / scale, Pa) + _log_power(li[1].amp / scale, Pb)
                          + np.conj(_log_power(lj[0].amp / scale, Qa) + _log_power(lj[1].amp / scale, Qb)))
                    e = np.zeros((nmax, nmax), dtype=complex)
                    e[live] = np.exp(base[live] + ph[live])
                    G += (ci * cj.conjugate()) * e
            Ta = Aa[qa] * Aa[qa2].conj()
            Tb = Ab[qb] * Ab[qb2].conj()

            def run(sl, Ta=Ta, Tb=Tb, G=G):
                return np.sum((Ta[sl] @ G) * Tb[sl], axis=1)

            if workers > 1 and len(blocks) > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    vals = list(pool.map(run, blocks))
            else:
                vals = [run(sl) for sl in blocks]
            v = np.concatenate(vals)
            out[:, r, c] = v
            if c != r:
                out[:, c, r] = v.conj()
    return out


def _exact_average(template, carriers, ens, taus_a, taus_b, workers):
    kinds, weight = _coherent_scales(template)
    ncoh = kinds.count("coherent")
    if ncoh == 0:
        return _batch_states(template, [1.0], taus_a, taus_b, carriers)[0]
    for k, kind in enumerate(kinds):
        if kind == "coherent" and carriers[k] != "mode":
            raise ValidationError("coherent subsystems must transfer through a JC mode")
    # alpha * s with sum |s|^2 = c is distributed like sqrt(c) alpha with unit-norm scales
    scale = math.sqrt(weight)
    V = 1.0 + weight * (ens.V - 1.0)
    d = scale * ens.d
    nmax = fock_truncation(V, d, limit=kernels.MAX_TRUNCATION)
    rho_el = _FockElements(V, d, nmax)
    if ncoh == 1:
        return _exact_one_mode(template, kinds, carriers, taus_a, taus_b, rho_el, scale, nmax)
    return _exact_two_mode(template, taus_a, taus_b, rho_el, scale, nmax, workers)


def _quadrature_average(template, carriers, ens, taus_a, taus_b, workers):
    def f(alphas):
        return _batch_states(template, alphas, taus_a, taus_b, carriers)

    try:
        return thermal_average(f, ens, vectorized=True, workers=workers,
                               weight_floor=QUAD_WEIGHT_FLOOR, chunk=256)
    except ConvergenceError as exc:
        prev, est = exc.estimates
        if prev is None:
            raise
        worst = int(np.argmax(np.max(np.abs(est - prev), axis=(1, 2))))
        raise ConvergenceError(
            f"{exc} ; largest change at tau = {taus_b[worst]:g}", estimates=exc.estimates
        ) from None


def averaged_states(spec, taus, method="fock", workers=1):
    """Thermally averaged, trace-normalized two-qubit states on a tau grid.

    Both qubits interact for the same time ``tau`` (the single-cavity qubit a
    never interacts). Returns an array of shape (T, 4, 4).
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.ndim != 1 or taus.size == 0:
        raise ValidationError("tau grid must be a nonempty 1-D sequence")
    template, carriers = scheme_template(spec.scheme, spec.phi)
    if method == "fock":
        rho = _exact_average(template, carriers, spec.ensemble, taus, taus, workers)
    elif method == "quadrature":
        rho = _quadrature_average(template, carriers, spec.ensemble, taus, taus, workers)
    else:
        raise ValidationError(f"method must be 'fock' or 'quadrature', got {method!r}")
    return _trace_normalize(rho)


def averaged_state(spec, method="fock"):
    """Averaged two-qubit state at the scheme's own ``(tau_a, tau_b)``."""
    template, carriers = scheme_template(spec.scheme, spec.phi)
    ta, tb = [float(spec.tau_a)], [float(spec.tau_b)]
    if method == "fock":
        rho = _exact_average(template, carriers, spec.ensemble, ta, tb, 1)
    elif method == "quadrature":
        rho = _quadrature_average(template, carriers, spec.ensemble, ta, tb, 1)
    else:
        raise ValidationError(f"method must be 'fock' or 'quadrature', got {method!r}")
    return _trace_normalize(rho)[0]


def entangling_power_curve(spec, tau_grid=DEFAULT_TAUS, method="fock", workers=1):
    """``(tau, negativity, linearized entropy)`` of the averaged state along `tau_grid`."""
    taus = np.asarray(tau_grid, dtype=float)
    if taus.size == 0:
        raise ValidationError("tau grid is empty")
    if np.any(np.diff(taus) <= 0):
        raise ValidationError("tau grid must be strictly ascending")
    rhos = averaged_states(spec, taus, method=method, workers=workers)
    return [(float(t), negativity(r), linearized_entropy(r)) for t, r in zip(taus, rhos)]
