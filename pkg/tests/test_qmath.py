import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catent import qmath
from catent.errors import NonHermitianError, ValidationError
from conftest import random_density, random_product_mixture


def test_eigenvalues_identity_and_diagonal():
    assert np.allclose(qmath.hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1], atol=1e-14)
    ev = qmath.hermitian_eigenvalues(np.diag([0.4, 0.1, 0.3, 0.2]))
    assert np.allclose(ev, [0.1, 0.2, 0.3, 0.4], atol=1e-14)


def test_bell_partial_transpose_spectrum():
    pt = qmath.partial_transpose(qmath.bell_state())
    ev = qmath.hermitian_eigenvalues(pt)
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)
    # independent diagonalization
    assert np.allclose(ev, np.linalg.eigvalsh(pt), atol=1e-12)


def test_eigenvalues_match_lapack_on_random_hermitian(rng):
    for n in (1, 2, 3, 4, 8, 16):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = a + a.conj().T
        ev = qmath.hermitian_eigenvalues(h)
        assert np.all(np.diff(ev) >= 0)
        assert np.allclose(ev, np.linalg.eigvalsh(h), atol=1e-10)
        assert abs(ev.sum() - np.trace(h).real) < 1e-10


def test_eigenvalues_deterministic(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    assert np.array_equal(qmath.hermitian_eigenvalues(h), qmath.hermitian_eigenvalues(h.copy()))


def test_non_hermitian_rejected_with_deviation():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(NonHermitianError) as info:
        qmath.hermitian_eigenvalues(m)
    assert info.value.deviation == pytest.approx(1e-6)


def test_small_asymmetry_is_absorbed():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-12
    assert np.allclose(qmath.hermitian_eigenvalues(m), 1.0)


def test_dimension_limit():
    with pytest.raises(ValidationError):
        qmath.hermitian_eigenvalues(np.eye(17))


def test_partial_transpose_properties(rng):
    for _ in range(20):
        rho = random_density(rng)
        for sub in ("first", "second"):
            pt = qmath.partial_transpose(rho, sub)
            assert np.array_equal(qmath.partial_transpose(pt, sub), rho)
            assert abs(np.trace(pt) - np.trace(rho)) < 1e-14
            assert np.allclose(pt, pt.conj().T, atol=1e-14)


def test_partial_transpose_of_product_keeps_spectrum(rng):
    a = random_density(rng)[:2, :2]
    a = a / np.trace(a)
    b = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    rho = np.kron(a, b)
    pt = qmath.partial_transpose(rho)
    assert np.allclose(np.linalg.eigvalsh(pt), np.linalg.eigvalsh(rho), atol=1e-12)


def test_partial_transpose_rejects_wrong_shape():
    with pytest.raises(ValidationError):
        qmath.partial_transpose(np.eye(3))
    with pytest.raises(ValidationError):
        qmath.partial_transpose(np.eye(4), "third")


def test_negativity_values():
    assert qmath.negativity(qmath.bell_state()) == pytest.approx(1.0, abs=1e-12)
    assert qmath.negativity(np.eye(4) / 4) == 0.0
    # Werner partial-transpose eigenvalue (1 - 3p)/4 gives 0.5 at p = 2/3
    assert qmath.negativity(qmath.werner_state(2 / 3)) == pytest.approx(0.5, abs=1e-10)


def test_negativity_zero_on_separable_mixtures(rng):
    for _ in range(1000):
        assert qmath.negativity(random_product_mixture(rng)) == 0.0


def test_linearized_entropy_values(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    assert qmath.linearized_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)
    assert qmath.linearized_entropy(np.eye(4) / 4) == pytest.approx(1.0, abs=1e-12)
    # Tr rho^2 = 7/16 for Werner p = 1/2
    assert qmath.linearized_entropy(qmath.werner_state(0.5)) == pytest.approx(0.75, abs=1e-12)


def test_linearized_entropy_monotone_under_mixing(rng):
    rho = random_density(rng, rank=1)
    vals = [qmath.linearized_entropy((1 - t) * rho + t * np.eye(4) / 4) for t in np.linspace(0, 1, 21)]
    assert np.all(np.diff(vals) >= -1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=2**32 - 1))
def test_linearized_entropy_in_unit_interval(rank, seed):
    rho = random_density(np.random.default_rng(seed), rank)
    s = qmath.linearized_entropy(rho)
    assert -1e-12 <= s <= 1 + 1e-12


def test_validate_density_rejects_bad_trace():
    with pytest.raises(ValidationError):
        qmath.negativity(np.eye(4) / 2)
