"""Madelung transform between hydrodynamic pairs and wave functions.

The half-angle convention ``psi = sqrt(rho) exp(i theta / 2)`` is used
throughout. With it the transform is an exact isometry from the
Sasaki-Fisher-Rao metric to the Fubini-Study metric, and pulls the projective
symplectic form back to one quarter of the canonical one.

Wave functions are complex arrays of unit L2(mu) norm, compared modulo a
constant phase.
"""

from dataclasses import dataclass

import numpy as np

from .densities import check_density, check_tangent
from .errors import NonHorizontal, NonPositiveField, NonzeroWinding, VanishingModulus, ZeroVelocity
from .grid import DENSITY_FLOOR, MEAN_TOL, check_positive, inner, integrate, spectral_derivative

MODULUS_FLOOR = 1e-12


def gauge_fix(rho, theta):
    """Shift ``theta`` by a constant so that ``integrate(theta * rho) == 0``."""
    return theta - integrate(theta * rho) / integrate(rho)


@dataclass(frozen=True, eq=False)
class CotangentPoint:
    """A density with a gauge-fixed momentum potential."""

    rho: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        rho = check_density(self.rho)
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != rho.shape:
            raise ValueError("rho and theta must share a grid")
        if abs(integrate(theta * rho)) > MEAN_TOL:
            raise ValueError("theta violates the gauge integrate(theta * rho) = 0")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def gauged(cls, rho, theta):
        rho = np.asarray(rho, dtype=float)
        return cls(rho, gauge_fix(rho, np.asarray(theta, dtype=float)))


@dataclass(frozen=True, eq=False)
class CotangentTangent:
    rho_dot: np.ndarray
    theta_dot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho_dot", check_tangent(self.rho_dot))
        object.__setattr__(self, "theta_dot", np.asarray(self.theta_dot, dtype=float))

    def projected(self, rho):
        """Tangent with ``theta_dot`` shifted to satisfy ``integrate(theta_dot * rho) = 0``."""
        return CotangentTangent(self.rho_dot, gauge_fix(rho, self.theta_dot))


def l2_norm(psi):
    return float(np.sqrt(inner(psi, psi).real))


def normalize(psi):
    return psi / l2_norm(psi)


def align_phase(reference, psi):
    """Multiply ``psi`` by the unit constant maximizing ``Re <reference, psi>``."""
    overlap = inner(psi, reference)
    if abs(overlap) == 0:
        return psi
    return psi * (overlap / abs(overlap))


def projective_distance(reference, psi):
    """Sup-norm gap after removing the constant-phase ambiguity."""
    return float(np.max(np.abs(align_phase(reference, psi) - reference)))


def madelung_forward(p):
    return np.sqrt(p.rho) * np.exp(0.5j * p.theta)


def momentum_map(psi):
    """``(Im(conj(psi) psi'), |psi|^2)``; no positivity requirement."""
    psi = np.asarray(psi, dtype=complex)
    return np.imag(np.conj(psi) * spectral_derivative(psi)), np.abs(psi) ** 2


def unwrapped_phase(psi):
    """Continuous argument of a nonvanishing periodic ``psi``.

    Raises :class:`NonzeroWinding` when the phase does not close up.
    """
    psi = np.asarray(psi, dtype=complex)
    if np.min(np.abs(psi)) <= MODULUS_FLOOR:
        raise VanishingModulus(f"|psi| drops to {np.min(np.abs(psi)):.3e}")
    steps = np.angle(np.roll(psi, -1) / psi)
    winding = int(np.rint(np.sum(steps) / (2 * np.pi)))
    if winding:
        raise NonzeroWinding(winding)
    return np.angle(psi[0]) + np.concatenate([[0.0], np.cumsum(steps[:-1])])


def madelung_inverse(psi):
    rho = np.abs(psi) ** 2
    theta = 2 * unwrapped_phase(psi)
    return CotangentPoint.gauged(rho, theta)


def madelung_differential(p, v):
    root = np.sqrt(p.rho)
    return (v.rho_dot / (2 * root) + 0.5j * root * v.theta_dot) * np.exp(0.5j * p.theta)


def sasaki_fr_metric(p, v, w):
    rho = check_positive(p.rho)
    v = v.projected(rho)
    w = w.projected(rho)
    return 0.25 * integrate(v.rho_dot * w.rho_dot / rho + v.theta_dot * w.theta_dot * rho)


def fubini_study_metric(psi, a, b):
    norm2 = inner(psi, psi).real
    return float((inner(a, b) / norm2 - inner(a, psi) * inner(psi, b) / norm2**2).real)


def canonical_symplectic(v, w):
    return float(integrate(w.theta_dot * v.rho_dot - v.theta_dot * w.rho_dot))


def horizontal_part(psi, a):
    return a - inner(psi, a) / inner(psi, psi).real * psi


def projective_symplectic(psi, a, b):
    return float(inner(horizontal_part(psi, a), horizontal_part(psi, b)).imag)


def fs_geodesic(psi0, v0, t, tol=MEAN_TOL):
    """Fubini-Study great circle through unit ``psi0`` with horizontal velocity ``v0``."""
    if abs(inner(psi0, v0)) > tol:
        raise NonHorizontal(f"<psi0, v0> = {inner(psi0, v0):.3e}")
    speed = l2_norm(v0)
    if speed == 0:
        raise ZeroVelocity("initial velocity vanishes")
    return np.cos(speed * t) * psi0 + np.sin(speed * t) * (v0 / speed)


def fs_geodesic_velocity(psi0, v0, t):
    speed = l2_norm(v0)
    return -speed * np.sin(speed * t) * psi0 + np.cos(speed * t) * v0


def fs_distance(psi0, psi1):
    """Projective distance ``arccos |<psi0, psi1>|`` of the normalized states.

    Evaluated as ``2 arcsin(chord / 2)`` on phase-aligned unit vectors, which
    keeps full relative accuracy for nearby states where arccos does not.
    """
    a = psi0 / l2_norm(psi0)
    b = align_phase(a, psi1 / l2_norm(psi1))
    return float(2 * np.arcsin(min(l2_norm(b - a) / 2, 1.0)))


def lenells_map(phi_x, alpha):
    """``(phi_x, alpha) -> sqrt(phi_x) exp(i alpha / 2)``."""
    phi_x = np.asarray(phi_x, dtype=float)
    if not np.all(phi_x > DENSITY_FLOOR):
        raise NonPositiveField("phi_x must be strictly positive")
    if abs(integrate(phi_x) - 1.0) > MEAN_TOL:
        raise ValueError("phi_x must have mean 1")
    return np.sqrt(phi_x) * np.exp(0.5j * np.asarray(alpha, dtype=float))
