import math

import numpy as np
import pytest

from catent import thermal
from catent.errors import ConvergenceError, ValidationError
from catent.thermal import ThermalEnsemble, thermal_average


def riemann_average(f, V, d, half_width=8.0, n=801):
    # dense midpoint grid, independent of the Gauss-Hermite rule
    s = math.sqrt((V - 1) / 4)
    x = np.linspace(d - half_width * s, d + half_width * s, n)
    y = np.linspace(-half_width * s, half_width * s, n)
    X, Y = np.meshgrid(x, y, indexing="ij")
    a = X + 1j * Y
    p = thermal.thermal_density(a, ThermalEnsemble(V, d))
    dA = (x[1] - x[0]) * (y[1] - y[0])
    return np.sum(p * f(a)) * dA


def test_variance_from_temperature():
    assert thermal.variance_from_temperature(50.0) == pytest.approx(1.0, abs=1e-12)
    assert thermal.variance_from_temperature(math.log(3.0)) == pytest.approx(2.0, abs=1e-14)
    x = 0.01
    assert thermal.variance_from_temperature(x) == pytest.approx((math.exp(x) + 1) / (math.exp(x) - 1), rel=1e-12)
    vals = [thermal.variance_from_temperature(x) for x in (0.1, 0.5, 1.0, 5.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_variance_from_temperature_rejects(bad):
    with pytest.raises(ValidationError):
        thermal.variance_from_temperature(bad)


def test_mean_photon():
    assert thermal.mean_photon(1.0) == 0.0
    assert thermal.mean_photon(10.0) == 4.5
    assert thermal.mean_photon(100.0) == 49.5
    with pytest.raises(ValidationError):
        thermal.mean_photon(0.5)


def test_density_values():
    ens = ThermalEnsemble(2.0, 0.0)
    assert thermal.thermal_density(1.0, ens) == pytest.approx(2 / math.pi * math.exp(-2), rel=1e-14)
    ens = ThermalEnsemble(7.0, 1.5)
    assert thermal.thermal_density(1.5, ens) == pytest.approx(2 / (math.pi * 6.0), rel=1e-14)
    with pytest.raises(ValidationError):
        thermal.thermal_density(0.0, ThermalEnsemble(1.0))


def test_density_normalized():
    val = riemann_average(lambda a: np.ones_like(a.real), 5.0, 2.0)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_ensemble_validation():
    with pytest.raises(ValidationError):
        ThermalEnsemble(0.9)
    with pytest.raises(ValidationError):
        ThermalEnsemble(2.0, -1.0)
    with pytest.raises(ValidationError):
        ThermalEnsemble(2.0, 1j)


def test_average_constant_and_moments():
    ens = ThermalEnsemble(5.0, 2.0)
    assert thermal_average(lambda a: 1.0, ens) == pytest.approx(1.0, abs=1e-10)
    m2 = thermal_average(lambda a: abs(a) ** 2, ens)
    assert m2 == pytest.approx(6.0, abs=1e-10)
    assert riemann_average(lambda a: np.abs(a) ** 2, 5.0, 2.0) == pytest.approx(6.0, abs=1e-8)
    for V, d in [(3.0, 0.0), (5.0, 2.0), (20.0, 7.0)]:
        ens = ThermalEnsemble(V, d)
        assert thermal_average(lambda a: a, ens) == pytest.approx(d, abs=1e-10)
        assert riemann_average(lambda a: a, V, d) == pytest.approx(d, abs=1e-8)


def test_polynomial_exactness():
    ens = ThermalEnsemble(3.0, 0.5, nodes_per_axis=4)
    x, w = ens.nodes()
    # degree 7 in Re alpha is exact with 4 nodes per axis
    s2 = (3.0 - 1) / 4
    xr = x.real - 0.5
    assert np.dot(w, xr ** 6) == pytest.approx(15 * s2 ** 3, rel=1e-12)
    assert np.dot(w, xr ** 7) == pytest.approx(0.0, abs=1e-12)


def test_linearity():
    ens = ThermalEnsemble(4.0, 1.0)
    f = lambda a: np.exp(-abs(a) ** 2 / 3)
    g = lambda a: np.cos(a.real)
    lhs = thermal_average(lambda a: 2 * f(a) - 3 * g(a), ens)
    assert lhs == pytest.approx(2 * thermal_average(f, ens) - 3 * thermal_average(g, ens), abs=1e-12)


def test_point_mass():
    ens = ThermalEnsemble(1.0, 1.7)
    assert thermal_average(lambda a: a ** 2, ens) == 1.7 ** 2
    f = lambda a: np.exp(-abs(a - 1) ** 2)
    near = thermal_average(f, ThermalEnsemble(1.0 + 1e-8, 1.7))
    assert near == pytest.approx(f(1.7), abs=1e-6)


def test_vectorized_and_threads_identical():
    ens = ThermalEnsemble(8.0, 3.0)
    f = lambda a: np.exp(-0.1 * np.abs(a - 1) ** 2) * np.cos(a.real)
    serial = thermal_average(f, ens, vectorized=True, workers=1, chunk=100)
    par = thermal_average(f, ens, vectorized=True, workers=4, chunk=100)
    assert serial == par
    assert thermal_average(lambda a: f(np.asarray(a)), ens) == pytest.approx(serial, abs=1e-14)


def test_nonconvergence_carries_estimates():
    ens = ThermalEnsemble(100.0, 0.0)
    with pytest.raises(ConvergenceError) as info:
        thermal_average(lambda a: np.cos(40 * a.real), ens, vectorized=True)
    prev, est = info.value.estimates
    assert prev is not None and est is not None


def test_node_schedule():
    assert thermal.node_schedule(48) == [48, 96, 192, 256]


def test_compensated_sum_complex():
    vals = np.array([1e16, 1.0, -1e16]) * (1 + 1j)
    assert thermal.compensated_sum(vals, np.ones(3)) == 1 + 1j


def test_fock_elements_match_displaced_thermal_matrix():
    from scipy.linalg import expm
    V, d, N = 3.0, 1.2, 90
    nbar = (V - 1) / 2
    n = np.arange(N)
    th = np.diag(nbar ** n / (1 + nbar) ** (n + 1))
    a = np.diag(np.sqrt(np.arange(1, N)), 1)
    D = expm(d * (a.T - a))
    rho = D @ th @ D.T
    for k in range(3):
        got = np.exp(thermal.log_fock_elements(V, d, 30, k))
        want = np.array([rho[p, p + k] for p in range(31)])
        assert np.allclose(got, want, atol=1e-14, rtol=1e-10)


def test_fock_truncation_covers_population():
    V, d = 100.0, 20.0
    n = thermal.fock_truncation(V, d)
    pops = np.exp(thermal.log_fock_elements(V, d, n + 2000, 0))
    assert pops[:n].sum() == pytest.approx(1.0, abs=1e-13)
