import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import smooth_field
from geohydro.densities import (
    AffineEnergy,
    Barotropic,
    Classical,
    IntegralF,
    PolynomialNonlinearity,
    PotentialSpec,
    PowerEnergy,
    Quantum,
    bhattacharyya_angle,
    check_density,
    check_tangent,
    fisher_information,
    fisher_rao_geodesic,
    fisher_rao_geodesic_derivatives,
    fisher_rao_metric,
    fr_newton_accel,
    normalize_density,
    potential_derivative,
    potential_value,
    pressure,
    sqrt_map,
    sqrt_map_inv,
    wasserstein_otto_metric,
)
from geohydro.errors import NonPositiveDensity, NonPositiveField, NonZeroMean
from geohydro.grid import integrate, nodes, spectral_derivative

seeds = st.integers(0, 2**32 - 1)

# independent mpmath quadrature (30 digits), frozen
BHATTACHARYYA_SIN = 0.182777461930287861764643966027  # rho0 = 1, rho1 = 1 + 0.5 sin x
FISHER_COS = 0.0167468245269451691545346036559  # rho = 1 + 0.5 cos x


def random_density(rng, n=64):
    return normalize_density(np.exp(smooth_field(rng, n, modes=4, amplitude=0.4)))


def random_tangent(rng, rho):
    a = smooth_field(rng, len(rho), modes=4) * rho
    return a - integrate(a) * rho


def test_density_validation(x64):
    check_density(1 + 0.5 * np.cos(x64))
    with pytest.raises(NonZeroMean):
        check_density(np.full(64, 1.1))
    with pytest.raises(NonPositiveDensity):
        check_density(1 + 1.5 * np.cos(x64))
    with pytest.raises(NonZeroMean):
        check_tangent(np.ones(64))


def test_sqrt_map_examples(x64):
    assert np.array_equal(sqrt_map(np.ones(64)), np.ones(64))
    f = sqrt_map(1 + 0.5 * np.cos(x64))
    assert integrate(f * f) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NonPositiveField):
        sqrt_map_inv(math.sqrt(2) * np.cos(x64))


@given(seeds)
def test_sqrt_round_trip(seed):
    rho = random_density(np.random.default_rng(seed))
    assert np.max(np.abs(sqrt_map_inv(sqrt_map(rho)) - rho)) <= 1e-13


def test_fisher_rao_metric_examples(x64):
    one = np.ones(64)
    assert fisher_rao_metric(one, np.cos(x64), np.cos(x64)) == pytest.approx(1 / 8, abs=1e-16)
    assert fisher_rao_metric(one, np.zeros(64), np.cos(x64)) == 0.0
    assert abs(fisher_rao_metric(one, np.cos(x64), np.sin(x64))) < 1e-16


def test_wasserstein_examples(x64):
    one = np.ones(64)
    assert wasserstein_otto_metric(one, np.cos(x64), np.cos(x64)) == pytest.approx(0.5, abs=1e-15)
    assert wasserstein_otto_metric(one, np.zeros(64), np.cos(x64)) == 0.0
    assert abs(wasserstein_otto_metric(one, np.cos(x64), np.sin(x64))) < 1e-16


def test_geodesic_examples(x64):
    rho0 = np.ones(64)
    rho, d = fisher_rao_geodesic(rho0, rho0, 0.3)
    assert d == 0.0 and np.array_equal(rho, rho0)
    rho1 = 1 + 0.5 * np.sin(x64)
    _, d = fisher_rao_geodesic(rho0, rho1, 0.5)
    assert d == pytest.approx(BHATTACHARYYA_SIN, abs=1e-14)
    a, _ = fisher_rao_geodesic(rho0, rho1, 0.5)
    b, _ = fisher_rao_geodesic(rho1, rho0, 0.5)
    assert np.max(np.abs(a - b)) <= 1e-13


def test_geodesic_endpoints_and_antipodal(x64):
    rho0 = 1 + 0.5 * np.cos(x64)
    rho1 = 1 + 0.5 * np.sin(2 * x64)
    assert np.max(np.abs(fisher_rao_geodesic(rho0, rho1, 0.0)[0] - rho0)) < 1e-14
    assert np.max(np.abs(fisher_rao_geodesic(rho0, rho1, 1.0)[0] - rho1)) < 1e-14
    # disjoint bumps, bounded below by the positivity floor, stay within a quarter turn:
    # positive square roots never reach the antipodal guard
    bump = np.where(np.abs(x64 - np.pi / 2) < 1.0, 1.0, 1e-11)
    other = np.where(np.abs(x64 - 3 * np.pi / 2) < 1.0, 1.0, 1e-11)
    _, d = fisher_rao_geodesic(bump / integrate(bump), other / integrate(other), 0.5)
    assert np.pi / 2 - 1e-4 < d <= np.pi / 2


def test_fisher_information_examples(x64):
    assert fisher_information(np.ones(64)) == 0.0
    assert fisher_information(1 + 0.5 * np.cos(x64)) == pytest.approx(FISHER_COS, rel=1e-13)


@given(seeds)
def test_fisher_information_root_identity(seed):
    rho = random_density(np.random.default_rng(seed))
    root = np.sqrt(rho)
    assert fisher_information(rho) == pytest.approx(0.5 * integrate(spectral_derivative(root) ** 2), rel=1e-10)


@given(seeds)
def test_sphere_pullback(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    a = random_tangent(rng, rho)
    f_dot = a / (2 * np.sqrt(rho))
    assert fisher_rao_metric(rho, a, a) == pytest.approx(integrate(f_dot**2), rel=1e-12)


@given(seeds, seeds)
def test_triangle_inequality(s1, s2):
    rng = np.random.default_rng([s1, s2])
    a, b, c = (random_density(rng) for _ in range(3))
    ab, bc, ac = bhattacharyya_angle(a, b), bhattacharyya_angle(b, c), bhattacharyya_angle(a, c)
    assert ac <= ab + bc + 1e-14


@given(seeds)
def test_wasserstein_symmetry_and_scaling(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    a, b = random_tangent(rng, rho), random_tangent(rng, rho)
    assert wasserstein_otto_metric(rho, a, b) == pytest.approx(wasserstein_otto_metric(rho, b, a), rel=1e-12)
    assert wasserstein_otto_metric(rho, 2 * a, 2 * a) == pytest.approx(4 * wasserstein_otto_metric(rho, a, a), rel=1e-12)


def test_potential_derivative_examples(x64):
    rho = 1 + 0.3 * np.sin(x64)
    V = np.cos(x64)
    assert np.array_equal(potential_derivative(PotentialSpec.of(Classical(V)), rho), V)
    law = AffineEnergy(0.5)
    assert np.max(np.abs(potential_derivative(PotentialSpec.of(Barotropic(law)), rho) - rho)) < 1e-15
    assert np.max(np.abs(pressure(law, rho) - rho**2 / 2)) < 1e-15
    assert np.max(np.abs(potential_derivative(PotentialSpec.of(Quantum(4)), np.ones(64)))) == 0.0


def test_power_law_validation():
    with pytest.raises(ValueError):
        PowerEnergy(1.0, 0.0)


def test_nonlinearity_primitive():
    f = PolynomialNonlinearity((1.0, 2.0, 3.0))
    a = np.array([0.0, 0.5, 2.0])
    assert np.allclose(f(a), 1 + 2 * a + 3 * a**2)
    assert np.allclose(f.primitive(a), a + a**2 + a**3)
    assert PolynomialNonlinearity((0.0,)).is_zero


SPECS = {
    "classical": lambda x: PotentialSpec.of(Classical(np.cos(x) + 0.3 * np.sin(2 * x))),
    "affine": lambda x: PotentialSpec.of(Barotropic(AffineEnergy(0.5, 0.2))),
    "power": lambda x: PotentialSpec.of(Barotropic(PowerEnergy(0.7, 1.4))),
    "quantum": lambda x: PotentialSpec.of(Quantum(4.0)),
    "integral": lambda x: PotentialSpec.of(IntegralF(PolynomialNonlinearity((0.5, 1.0, -0.2)), 2.0)),
}


@pytest.mark.parametrize("kind", sorted(SPECS))
def test_potential_value_derivative_consistency(kind):
    rng = np.random.default_rng(7)
    x = nodes(64)
    spec = SPECS[kind](x)
    rho = random_density(rng)
    h = random_tangent(rng, rho)
    eps = 1e-4
    fd = (potential_value(spec, rho + eps * h) - potential_value(spec, rho - eps * h)) / (2 * eps)
    exact = integrate(potential_derivative(spec, rho) * h)
    assert abs(fd - exact) <= 1e-6 * max(abs(exact), 1e-12)


def test_fr_newton_examples(x64):
    accel, lam = fr_newton_accel(np.ones(64), np.cos(x64), PotentialSpec())
    assert lam == pytest.approx(-0.25, abs=1e-16)
    assert np.max(np.abs(accel - np.cos(2 * x64) / 4)) < 1e-15
    accel, lam = fr_newton_accel(1 + 0.5 * np.cos(x64), np.zeros(64), PotentialSpec())
    assert lam == 0.0 and np.max(np.abs(accel)) == 0.0


@given(seeds)
def test_fr_newton_mass_neutral(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    spec = SPECS["classical"](nodes(64)) + SPECS["quantum"](None)
    accel, _ = fr_newton_accel(rho, random_tangent(rng, rho), spec)
    assert abs(integrate(accel)) <= 1e-10


def test_geodesic_solves_free_newton(x64):
    rho0 = normalize_density(1 + 0.3 * np.cos(x64))
    rho1 = normalize_density(1 + 0.4 * np.sin(3 * x64))
    for t in (0.2, 0.5, 0.8):
        rho, rho_dot, rho_ddot = fisher_rao_geodesic_derivatives(rho0, rho1, t)
        accel, _ = fr_newton_accel(rho, rho_dot, PotentialSpec())
        assert np.max(np.abs(rho_ddot - accel)) <= 1e-12
        # analytic derivative agrees with a central difference of the curve itself
        h = 1e-5
        fd = (fisher_rao_geodesic(rho0, rho1, t + h)[0] - fisher_rao_geodesic(rho0, rho1, t - h)[0]) / (2 * h)
        assert np.max(np.abs(fd - rho_dot)) <= 1e-8
