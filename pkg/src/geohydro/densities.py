"""Geometry of the space of unit-mass densities on the circle.

A density is a positive array with sample mean 1; a tangent vector is a
mean-zero array. Two metrics are provided: Fisher-Rao, which the square-root
map turns into the round metric of the unit L2 sphere, and Wasserstein-Otto,
the H^-1 type metric of optimal transport.

Potential functions are assembled from :class:`PotentialSpec` terms; each
term knows its value and its L2(mu) variational derivative.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AntipodalEndpoints, NonPositiveField, NonZeroMean
from .grid import (
    DENSITY_FLOOR,
    MEAN_TOL,
    check_positive,
    integrate,
    solve_weighted_poisson,
    spectral_derivative,
)

IDENTICAL_TOL = 1e-12
ANTIPODAL_TOL = 1e-8


def check_density(rho, mass_tol=MEAN_TOL):
    """Validate positivity and unit mass; returns ``rho`` as a float array."""
    rho = check_positive(rho)
    if abs(integrate(rho) - 1.0) > mass_tol:
        raise NonZeroMean(f"density has mass {integrate(rho)!r}, expected 1")
    return rho


def normalize_density(rho):
    rho = check_positive(rho)
    return rho / integrate(rho)


def check_tangent(rho_dot, tol=MEAN_TOL):
    if abs(integrate(rho_dot)) > tol:
        raise NonZeroMean(f"tangent density has mass {integrate(rho_dot):.3e}")
    return np.asarray(rho_dot, dtype=float)


def sqrt_map(rho):
    return np.sqrt(check_positive(rho))


def sqrt_map_inv(f):
    f = np.asarray(f, dtype=float)
    if not np.all(f > DENSITY_FLOOR):
        raise NonPositiveField("square-root representative must be strictly positive")
    return f * f


def fisher_rao_metric(rho, a, b):
    rho = check_positive(rho)
    return 0.25 * integrate(a * b / rho)


def wasserstein_otto_metric(rho, a, b):
    rho = check_positive(rho)
    theta_a = solve_weighted_poisson(rho, a)
    theta_b = theta_a if b is a else solve_weighted_poisson(rho, b)
    return integrate(spectral_derivative(theta_a) * spectral_derivative(theta_b) * rho)


def bhattacharyya_angle(rho0, rho1):
    """Fisher-Rao distance: arccos of the overlap of the square roots."""
    overlap = integrate(np.sqrt(check_positive(rho0) * check_positive(rho1)))
    return float(np.arccos(np.clip(overlap, -1.0, 1.0)))


def fisher_rao_geodesic(rho0, rho1, t):
    """Point at time ``t`` on the great circle from ``rho0`` to ``rho1``.

    Returns ``(rho_t, distance)``. The curve is parameterized on [0, 1] with
    constant speed equal to the distance.
    """
    f0, f1, d = _geodesic_roots(rho0, rho1)
    if d == 0.0:
        return np.array(rho0, dtype=float), 0.0
    f = (np.sin((1 - t) * d) * f0 + np.sin(t * d) * f1) / np.sin(d)
    return f * f, d


def fisher_rao_geodesic_derivatives(rho0, rho1, t):
    """Analytic ``(rho, rho_dot, rho_ddot)`` along the great circle at time ``t``."""
    f0, f1, d = _geodesic_roots(rho0, rho1)
    if d == 0.0:
        rho = np.array(rho0, dtype=float)
        return rho, np.zeros_like(rho), np.zeros_like(rho)
    s = np.sin(d)
    f = (np.sin((1 - t) * d) * f0 + np.sin(t * d) * f1) / s
    fd = d * (-np.cos((1 - t) * d) * f0 + np.cos(t * d) * f1) / s
    fdd = -d * d * f
    return f * f, 2 * f * fd, 2 * fd * fd + 2 * f * fdd


def _geodesic_roots(rho0, rho1):
    f0 = sqrt_map(rho0)
    f1 = sqrt_map(rho1)
    d = bhattacharyya_angle(rho0, rho1)
    if d >= np.pi - ANTIPODAL_TOL:
        raise AntipodalEndpoints("endpoints are antipodal on the sphere")
    if d < IDENTICAL_TOL:
        d = 0.0
    return f0, f1, d


def fisher_information(rho):
    rho = check_positive(rho)
    return 0.125 * integrate(spectral_derivative(rho) ** 2 / rho)


# --- potential functions -------------------------------------------------


@dataclass(frozen=True)
class AffineEnergy:
    """Internal energy ``e(rho) = a rho + b``."""

    a: float = 0.5
    b: float = 0.0

    def energy(self, rho):
        return self.a * rho + self.b

    def denergy(self, rho):
        return np.full_like(rho, self.a)


@dataclass(frozen=True)
class PowerEnergy:
    """Internal energy ``e(rho) = a rho**gamma``."""

    a: float
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("power-law exponent must be positive")

    def energy(self, rho):
        return self.a * rho**self.gamma

    def denergy(self, rho):
        return self.a * self.gamma * rho ** (self.gamma - 1)


def pressure(law, rho):
    """Barotropic pressure ``P = e'(rho) rho^2``."""
    return law.denergy(rho) * rho * rho


@dataclass(frozen=True)
class PolynomialNonlinearity:
    """Nonlinearity ``f(a) = sum_j c_j a**j`` with primitive ``F(0) = 0``.

    ``PolynomialNonlinearity((0, kappa))`` is the cubic NLS term.
    """

    coeffs: tuple = ()

    def __call__(self, a):
        return np.polynomial.polynomial.polyval(a, self.coeffs) if self.coeffs else np.zeros_like(a)

    def primitive(self, a):
        if not self.coeffs:
            return np.zeros_like(a)
        c = np.concatenate([[0.0], np.asarray(self.coeffs, float) / np.arange(1, len(self.coeffs) + 1)])
        return np.polynomial.polynomial.polyval(a, c)

    @property
    def is_zero(self):
        return not any(self.coeffs)


@dataclass(frozen=True, eq=False)
class Classical:
    """``U = integral of V rho``."""

    V: np.ndarray
    scale: float = 1.0

    def value(self, rho):
        return self.scale * integrate(self.V * rho)

    def derivative(self, rho):
        return self.scale * np.asarray(self.V, dtype=float)


@dataclass(frozen=True)
class Barotropic:
    """``U = integral of e(rho) rho``."""

    law: object

    def value(self, rho):
        return integrate(self.law.energy(rho) * rho)

    def derivative(self, rho):
        return self.law.energy(rho) + rho * self.law.denergy(rho)


@dataclass(frozen=True)
class Quantum:
    """``U = c I(rho)`` with Fisher information ``I``."""

    c: float

    def value(self, rho):
        return self.c * fisher_information(rho)

    def derivative(self, rho):
        root = np.sqrt(rho)
        return -0.5 * self.c * spectral_derivative(root, 2) / root


@dataclass(frozen=True)
class IntegralF:
    """``U = scale * integral of F(rho)`` where ``F' = f``."""

    f: PolynomialNonlinearity
    scale: float = 1.0

    def value(self, rho):
        return self.scale * integrate(self.f.primitive(rho))

    def derivative(self, rho):
        return self.scale * self.f(rho)


@dataclass(frozen=True)
class PotentialSpec:
    terms: tuple = field(default_factory=tuple)

    def __add__(self, other):
        return PotentialSpec(tuple(self.terms) + tuple(other.terms))

    @classmethod
    def of(cls, *terms):
        return cls(tuple(terms))


def potential_value(spec, rho):
    rho = check_positive(rho)
    return float(sum(term.value(rho) for term in spec.terms))


def potential_derivative(spec, rho):
    """L2(mu) gradient of the potential at ``rho``."""
    rho = check_positive(rho)
    out = np.zeros_like(rho)
    for term in spec.terms:
        out = out + term.derivative(rho)
    return out


def fr_newton_accel(rho, rho_dot, spec):
    """Acceleration of Newton's equation for the Fisher-Rao metric.

    Returns ``(rho_ddot, lam)`` with ``lam`` the multiplier that keeps the
    acceleration mass-neutral.
    """
    rho = check_positive(rho)
    grad = potential_derivative(spec, rho)
    kinetic = rho_dot * rho_dot / (2 * rho)
    lam = (integrate(grad * rho) - integrate(kinetic)) / integrate(rho)
    return kinetic - grad * rho + lam * rho, float(lam)
