import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catent import branches as br
from catent.errors import ImpossibleOutcomeError, UnderflowError, ValidationError

amps = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def coherent_state(amp):
    return br.BranchState(((1.0, (br.coherent(amp),)),))


def test_coherent_overlaps():
    a = 0.7 - 1.1j
    assert br.overlap(coherent_state(a), coherent_state(a)) == pytest.approx(1.0, abs=1e-15)
    assert br.overlap(coherent_state(a), coherent_state(-a)) == pytest.approx(math.exp(-2 * abs(a) ** 2), abs=1e-15)
    g = 1.3 + 0.2j
    assert br.label_overlap(br.fock(0), br.coherent(g)) == pytest.approx(math.exp(-abs(g) ** 2 / 2), abs=1e-15)


def test_fock_coherent_overlap_matches_series():
    g = 0.9 + 0.4j
    for n in range(8):
        want = cmath.exp(-abs(g) ** 2 / 2) * g ** n / math.sqrt(math.factorial(n))
        assert br.fock_coherent_overlap(n, g) == pytest.approx(want, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(amps, amps, st.floats(-4, 4))
def test_overlap_conjugate_symmetric(a, b, phi):
    s = br.make_cat(a, phi)
    t = br.BranchState(((0.6, (br.fock(1), br.coherent(b))), (0.8j, (br.fock(0), br.coherent(-b)))))
    assert br.overlap(s, t) == pytest.approx(br.overlap(t, s).conjugate(), abs=1e-14)


def test_overlap_subsystem_mismatch():
    with pytest.raises(ValidationError):
        br.overlap(coherent_state(1.0), br.make_cat(1.0, 1.0))


@settings(max_examples=100, deadline=None)
@given(amps, st.floats(-4, 4))
def test_make_cat_normalized(a, phi):
    s = br.make_cat(a, phi)
    assert s.norm2() == pytest.approx(1.0, abs=1e-14)
    k = br.label_overlap(s.labels[0][1], s.labels[1][1])
    want = math.exp(-abs(a) ** 2 * (1 - math.cos(phi))) * cmath.exp(1j * abs(a) ** 2 * math.sin(phi))
    assert k == pytest.approx(want, abs=1e-14)


def test_make_cat_phi_zero_is_product():
    s = br.make_cat(1.3, 0.0)
    assert s.labels[0][1] == s.labels[1][1]
    assert s.norm2() == pytest.approx(1.0)


def test_labels_validation():
    with pytest.raises(ValidationError):
        br.fock(2)
    with pytest.raises(ValidationError):
        br.BranchLabel("squeezed")


def test_dispersive_evolution():
    s = br.plus_state(br.coherent(1.2))
    assert br.dispersive_evolve(s, 0, 1, 0.0) == s
    one = br.BranchState(((1.0, (br.fock(1), br.coherent(0.8))),))
    out = br.dispersive_evolve(one, 0, 1, math.pi)
    assert out.labels[0][1].amp == pytest.approx(-0.8, abs=1e-15)
    phi = 0.9
    cat = br.dispersive_evolve(s, 0, 1, phi)
    assert br.overlap(cat, br.make_cat(1.2, -phi)) == pytest.approx(1.0, abs=1e-14)
    assert cat.norm2() == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValidationError):
        br.dispersive_evolve(s, 1, 0, phi)


def test_dispersive_commutes_with_phase_rotation():
    rot = cmath.exp(0.37j)
    s = br.plus_state(br.coherent(1.1 - 0.3j))
    a = br.dispersive_evolve(s, 0, 1, 1.3)
    b = br.dispersive_evolve(br.plus_state(br.coherent((1.1 - 0.3j) * rot)), 0, 1, 1.3)
    for (ca, la), (cb, lb) in zip(a.terms, b.terms):
        assert ca == cb
        assert la[1].amp * rot == pytest.approx(lb[1].amp, abs=1e-15)


def test_beamsplit_convention():
    vac = br.BranchState(((1.0, (br.coherent(0), br.coherent(0))),))
    assert br.beamsplit(vac, 0, 1).labels[0] == (br.coherent(0), br.coherent(0))
    a = 1.4 + 0.5j
    s = br.BranchState(((1.0, (br.coherent(a), br.coherent(0))),))
    la, lb = br.beamsplit(s, 0, 1).labels[0]
    sigma = a / math.sqrt(2)
    assert la.amp == pytest.approx(sigma, abs=1e-15)
    assert lb.amp == pytest.approx(-sigma, abs=1e-15)


def test_beamsplit_preserves_gram(rng):
    terms = []
    for _ in range(5):
        c = complex(rng.normal(), rng.normal())
        terms.append((c, (br.coherent(complex(*rng.normal(size=2))), br.coherent(complex(*rng.normal(size=2))))))
    s = br.BranchState(tuple(terms))
    g0 = np.array(s.gram())
    g1 = np.array(br.beamsplit(s, 0, 1).gram())
    assert np.max(np.abs(g0 - g1)) < 1e-12
    assert br.beamsplit(s, 0, 1).norm2() == pytest.approx(s.norm2(), rel=1e-12)


def test_measure_plus_minus():
    cat = br.make_cat(1.1, math.pi)
    p_plus, cond = br.measure_plus_minus(cat, 0, "+")
    p_minus, _ = br.measure_plus_minus(cat, 0, "-")
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-12)
    assert p_plus == pytest.approx(br.ecs_probability(1.1, "+"), abs=1e-14)
    even = br.BranchState(((1.0, (br.coherent(1.1),)), (1.0, (br.coherent(-1.1),)))).normalized()
    assert abs(br.overlap(even, cond)) == pytest.approx(1.0, abs=1e-12)


def test_measure_at_zero_amplitude():
    cat = br.make_cat(0.0, math.pi)
    p, _ = br.measure_plus_minus(cat, 0, "+")
    assert p == pytest.approx(1.0)
    with pytest.raises(ImpossibleOutcomeError):
        br.measure_plus_minus(cat, 0, "-")


def test_measure_underflow_is_distinct():
    # branches differ, but P(-) ~ |alpha|^2 is below the smallest normal double
    with pytest.raises(UnderflowError):
        br.measure_plus_minus(br.make_cat(1e-160, math.pi), 0, "-")


def test_ecs_state():
    v = br.ecs_state(0.0, "+")
    assert v.num_subsystems == 2
    assert len(v.terms) == 1 and v.labels[0] == (br.coherent(0), br.coherent(0))
    for a in (0.5, 1.0, 3.0):
        assert br.ecs_state(a, "+").norm2() == pytest.approx(1.0, abs=1e-12)
        assert br.ecs_state(a, "-").norm2() == pytest.approx(1.0, abs=1e-12)
    s = br.ecs_state(1.2, "+")
    la, lb = s.labels
    ov = br.label_overlap(la[0], lb[0]) * br.label_overlap(la[1], lb[1])
    assert ov == pytest.approx(math.exp(-2 * 1.2 ** 2), abs=1e-15)


def test_ecs_matches_direct_construction(rng):
    for _ in range(20):
        a = complex(*rng.normal(size=2))
        for sign in "+-":
            sg = 1.0 if sign == "+" else -1.0
            sig = a / math.sqrt(2)
            ref = br.BranchState(((1.0, (br.coherent(sig), br.coherent(-sig))),
                                  (sg, (br.coherent(-sig), br.coherent(sig))))).normalized()
            assert abs(br.overlap(ref, br.ecs_state(a, sign))) == pytest.approx(1.0, abs=1e-12)


def test_gates_preserve_norm(rng):
    for _ in range(10):
        s = br.make_cat(complex(*rng.normal(size=2)), rng.uniform(-3, 3)).tensor(br.coherent(0.3))
        assert br.beamsplit(s, 1, 2).norm2() == pytest.approx(s.norm2(), abs=1e-12)
        assert br.dispersive_evolve(s, 0, 1, 0.4).norm2() == pytest.approx(s.norm2(), abs=1e-12)


def test_term_limit():
    with pytest.raises(ValidationError):
        br.BranchState(tuple((1.0, (br.coherent(k),)) for k in range(65)))
