"""Finite superpositions of product coherent/Fock branches.

Every per-alpha state in the cat and entangled-coherent-state constructions
is a short sum ``sum_i c_i |l_{i,1}> ... |l_{i,k}>`` where each label is a Fock
state (0 or 1 photons) or a coherent state. States are immutable; all gates
return new states. Coefficients are not renormalized implicitly.
"""
from dataclasses import dataclass
import cmath
import math

from .errors import ImpossibleOutcomeError, UnderflowError, ValidationError

MAX_TERMS = 64
SQRT_HALF = 1.0 / math.sqrt(2.0)
# (beta, gamma) -> ((beta + gamma)/sqrt2, (gamma - beta)/sqrt2) sends (alpha, 0) to (sigma, -sigma).
BEAM_SPLITTER = ((SQRT_HALF, SQRT_HALF), (-SQRT_HALF, SQRT_HALF))


@dataclass(frozen=True)
class BranchLabel:
    kind: str
    n: int = 0
    amp: complex = 0j

    def __post_init__(self):
        if self.kind == "fock":
            if self.n not in (0, 1):
                raise ValidationError(f"fock labels hold 0 or 1 excitations, got {self.n}")
        elif self.kind != "coherent":
            raise ValidationError(f"unknown label kind {self.kind!r}")

    @property
    def is_fock(self):
        return self.kind == "fock"


def fock(n):
    return BranchLabel("fock", n=int(n))


def coherent(amp):
    return BranchLabel("coherent", amp=complex(amp))


def fock_coherent_overlap(n, gamma):
    """``<n|gamma>`` for any photon number n."""
    if n < 0:
        return 0j
    if gamma == 0:
        return 1.0 + 0j if n == 0 else 0j
    return cmath.exp(-0.5 * abs(gamma) ** 2 + n * cmath.log(gamma) - 0.5 * math.lgamma(n + 1))


def _overlap_parts(bra_kind, bra_val, ket_kind, ket_val):
    if bra_kind == "fock" and ket_kind == "fock":
        return 1.0 + 0j if bra_val == ket_val else 0j
    if bra_kind == "fock":
        return fock_coherent_overlap(bra_val, ket_val)
    if ket_kind == "fock":
        return fock_coherent_overlap(ket_val, bra_val).conjugate()
    b, g = bra_val, ket_val
    return cmath.exp(-0.5 * abs(b) ** 2 - 0.5 * abs(g) ** 2 + b.conjugate() * g)


def _value(label):
    return label.n if label.is_fock else label.amp


def label_overlap(bra, ket):
    """``<bra|ket>`` for two single-mode labels."""
    return _overlap_parts(bra.kind, _value(bra), ket.kind, _value(ket))


def ladder_element(bra, ket, p, q):
    """``<bra| (a^dagger)^p a^q |ket>`` for single-mode labels."""
    factor = 1.0 + 0j
    if ket.is_fock:
        m = ket.n
        if q > m:
            return 0j
        factor *= math.sqrt(math.factorial(m) / math.factorial(m - q))
        kk, kv = "fock", m - q
    else:
        factor *= ket.amp ** q
        kk, kv = "coherent", ket.amp
    if bra.is_fock:
        n = bra.n
        if p > n:
            return 0j
        factor *= math.sqrt(math.factorial(n) / math.factorial(n - p))
        bk, bv = "fock", n - p
    else:
        factor *= bra.amp.conjugate() ** p
        bk, bv = "coherent", bra.amp
    return factor * _overlap_parts(bk, bv, kk, kv)


@dataclass(frozen=True)
class BranchState:
    """Superposition ``sum_i coeff_i |labels_i>`` over a fixed number of subsystems."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(c), tuple(ls)) for c, ls in self.terms)
        if not terms:
            raise ValidationError("a branch state needs at least one term")
        if len(terms) > MAX_TERMS:
            raise ValidationError(f"too many branches ({len(terms)} > {MAX_TERMS})")
        k = len(terms[0][1])
        if k == 0 or any(len(ls) != k for _, ls in terms):
            raise ValidationError("all branches must label the same number of subsystems")
        object.__setattr__(self, "terms", terms)

    @property
    def num_subsystems(self):
        return len(self.terms[0][1])

    @property
    def coeffs(self):
        return [c for c, _ in self.terms]

    @property
    def labels(self):
        return [ls for _, ls in self.terms]

    def norm2(self):
        return overlap(self, self).real

    def normalized(self):
        n2 = self.norm2()
        if not n2 > 0.0:
            raise ValidationError("cannot normalize a state of zero norm")
        s = 1.0 / math.sqrt(n2)
        return BranchState(tuple((c * s, ls) for c, ls in self.terms))

    def scaled(self, factor):
        return BranchState(tuple((c * factor, ls) for c, ls in self.terms))

    def merged(self):
        """Combine branches with identical labels; drops exactly-cancelled terms."""
        acc = {}
        for c, ls in self.terms:
            acc[ls] = acc.get(ls, 0j) + c
        kept = tuple((c, ls) for ls, c in acc.items() if c != 0)
        return BranchState(kept) if kept else None

    def tensor(self, label):
        """Append one subsystem carrying `label` in every branch."""
        return BranchState(tuple((c, ls + (label,)) for c, ls in self.terms))

    def gram(self):
        """Matrix of branch overlaps ``G[i][j] = <labels_i|labels_j>``."""
        ls = self.labels
        return [[_product_overlap(a, b) for b in ls] for a in ls]


def _product_overlap(bra_labels, ket_labels):
    out = 1.0 + 0j
    for b, k in zip(bra_labels, ket_labels):
        out *= label_overlap(b, k)
        if out == 0:
            break
    return out


def overlap(a, b):
    """``<a|b>``; conjugate-symmetric in its arguments."""
    if a.num_subsystems != b.num_subsystems:
        raise ValidationError(
            f"subsystem count mismatch: {a.num_subsystems} vs {b.num_subsystems}"
        )
    total = 0j
    for ca, la in a.terms:
        for cb, lb in b.terms:
            total += ca.conjugate() * cb * _product_overlap(la, lb)
    return total


def _check_index(s, idx):
    if not 0 <= idx < s.num_subsystems:
        raise ValidationError(f"subsystem index {idx} out of range")


def make_cat(alpha, phi):
    """``(|0, alpha> + |1, alpha e^{i phi}>) / sqrt2`` on (micro mode, macro mode)."""
    alpha = complex(alpha)
    return BranchState((
        (SQRT_HALF, (fock(0), coherent(alpha))),
        (SQRT_HALF, (fock(1), coherent(alpha * cmath.exp(1j * phi)))),
    ))


def plus_state(mode_label):
    """``|+> (x) |label>`` with the qubit first."""
    return BranchState(((SQRT_HALF, (fock(0), mode_label)), (SQRT_HALF, (fock(1), mode_label))))


def dispersive_evolve(s, qubit, mode, phi):
    """Apply ``exp(-i phi n_mode |1><1|_qubit)``: coherent amp -> amp e^{-i phi} when qubit = 1."""
    _check_index(s, qubit)
    _check_index(s, mode)
    rot = cmath.exp(-1j * phi)
    out = []
    for c, ls in s.terms:
        q, m = ls[qubit], ls[mode]
        if not q.is_fock or m.is_fock:
            raise ValidationError("dispersive gate needs a fock qubit label and a coherent mode label")
        if q.n == 1:
            ls = ls[:mode] + (coherent(m.amp * rot),) + ls[mode + 1:]
        out.append((c, ls))
    return BranchState(tuple(out))


def beamsplit(s, mode_a, mode_b):
    """50:50 beam splitter on two coherent subsystems, ``(alpha, 0) -> (sigma, -sigma)``."""
    _check_index(s, mode_a)
    _check_index(s, mode_b)
    if mode_a == mode_b:
        raise ValidationError("beam splitter needs two distinct modes")
    (t11, t12), (t21, t22) = BEAM_SPLITTER
    out = []
    for c, ls in s.terms:
        la, lb = ls[mode_a], ls[mode_b]
        if la.is_fock or lb.is_fock:
            raise ValidationError("beam splitter acts on coherent labels only")
        beta, gamma = la.amp, lb.amp
        new = list(ls)
        new[mode_a] = coherent(t11 * beta + t12 * gamma)
        new[mode_b] = coherent(t21 * beta + t22 * gamma)
        out.append((c, tuple(new)))
    return BranchState(tuple(out))


def project_plus_minus(s, subsystem, outcome):
    """Unnormalized ``(<0| +- <1|)/sqrt2`` projection; the measured subsystem is removed.

    Returns None when the projected state vanishes identically.
    """
    _check_index(s, subsystem)
    if outcome not in ("+", "-"):
        raise ValidationError(f"outcome must be '+' or '-', got {outcome!r}")
    if s.num_subsystems < 2:
        raise ValidationError("measuring the only subsystem leaves nothing to condition")
    sign = 1.0 if outcome == "+" else -1.0
    out = []
    for c, ls in s.terms:
        lab = ls[subsystem]
        if not lab.is_fock:
            raise ValidationError("plus/minus measurement needs fock labels")
        amp = SQRT_HALF if lab.n == 0 else sign * SQRT_HALF
        out.append((c * amp, ls[:subsystem] + ls[subsystem + 1:]))
    return BranchState(tuple(out)).merged()


def measure_plus_minus(s, subsystem, outcome):
    """Probability of `outcome` and the normalized conditional state of the rest.

    Raises
    ------
    ImpossibleOutcomeError
        The projected branches cancel exactly (e.g. outcome '-' on a product ``|+>`` state).
    UnderflowError
        The outcome is allowed but its probability is not representable.
    """
    total = s.norm2()
    proj = project_plus_minus(s, subsystem, outcome)
    if proj is None:
        raise ImpossibleOutcomeError(f"outcome {outcome!r} has zero probability")
    p = proj.norm2() / total
    if not p > 1e-300:
        raise UnderflowError(f"probability of outcome {outcome!r} underflowed ({p!r})")
    return p, proj.scaled(1.0 / math.sqrt(proj.norm2()))


def conditioned_ecs(alpha, sign="+", phi=math.pi, normalize=True):
    """Cat state, ``+-`` detection of the micro mode, then macro mode mixed with vacuum.

    With ``normalize=False`` the coefficients are those of the bare projection,
    so ``norm2()`` is the outcome probability.
    """
    cat = make_cat(alpha, phi)
    proj = project_plus_minus(cat, 0, sign)
    if proj is None:
        raise ImpossibleOutcomeError(f"outcome {sign!r} has zero probability at alpha={alpha}")
    two_mode = beamsplit(proj.tensor(coherent(0.0)), 0, 1)
    return two_mode.normalized() if normalize else two_mode


def ecs_state(alpha, sign="+"):
    """Normalized ``|sigma, -sigma> +- |-sigma, sigma>`` with ``sigma = alpha/sqrt2``."""
    return conditioned_ecs(alpha, sign, math.pi)


def ecs_probability(alpha, sign="+", phi=math.pi):
    """Probability of detecting `sign` on the micro mode of ``make_cat(alpha, phi)``."""
    k = label_overlap(coherent(alpha), coherent(complex(alpha) * cmath.exp(1j * phi)))
    s = 1.0 if sign == "+" else -1.0
    return 0.5 * (1.0 + s * k.real)
