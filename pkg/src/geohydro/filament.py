"""Closed curves in R^3: binormal flow, Frenet invariants and the Hasimoto map.

Curves are ``(n, 3)`` arrays sampled at the circle nodes with the parameter
proportional to arclength, so ``|gamma'|`` is a constant ``c`` and the
arclength derivative is ``d/dx / c``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArclengthDrift, NonzeroTotalTorsion, VanishingCurvature
from .grid import antiderivative, check_size, evaluate, integrate, nodes, spectral_derivative
from .solvers import rk4

ARCLENGTH_TOL = 1e-6
DRIFT_TOL = 1e-3
CURVATURE_FLOOR = 1e-8
TORSION_TOL = 1e-8


def _d(gamma, order=1):
    return spectral_derivative(gamma.T, order).T


def speed_profile(gamma):
    return np.linalg.norm(_d(gamma), axis=1)


def arclength_variation(gamma):
    s = speed_profile(gamma)
    return float((s.max() - s.min()) / s.mean())


@dataclass(frozen=True, eq=False)
class FilamentCurve:
    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 2 or gamma.shape[1] != 3:
            raise ValueError("curve samples must have shape (n, 3)")
        check_size(gamma.shape[0])
        if not np.all(np.isfinite(gamma)):
            raise ValueError("curve samples must be finite")
        s = speed_profile(gamma)
        if not s.min() > 0 or arclength_variation(gamma) > ARCLENGTH_TOL:
            raise ValueError("curve is not a closed curve parameterized proportionally to arclength")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self):
        return self.gamma.shape[0]

    @property
    def speed(self):
        return float(np.mean(speed_profile(self.gamma)))

    @property
    def length(self):
        return 2 * np.pi * self.speed

    @classmethod
    def circle(cls, n, radius=1.0):
        x = nodes(n)
        return cls(np.stack([radius * np.cos(x), radius * np.sin(x), np.zeros(n)], axis=1))

    @classmethod
    def from_parametric(cls, func, n, oversample=8, iterations=60):
        """Sample the closed curve ``func`` at ``n`` points of equal arclength.

        ``func`` maps an array of parameters in [0, 2pi) to an ``(m, 3)``
        array of points. Arclength is computed spectrally on a grid
        ``oversample`` times finer, then inverted by Newton iteration.
        """
        fine = nodes(n * oversample)
        speed = speed_profile(np.asarray(func(fine), dtype=float))
        mean_speed = integrate(speed)
        # arclength map s(x) = x + S(x) with S periodic
        S = antiderivative(speed / mean_speed - 1.0)
        x = nodes(n)
        target = x.copy()
        for _ in range(iterations):
            step = (target + evaluate(S, target) - x) / (evaluate(speed, target) / mean_speed)
            target = target - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return cls(np.asarray(func(target), dtype=float))


def filament_rhs(gamma):
    """Binormal velocity ``gamma_s x gamma_ss`` in arclength units."""
    d1 = _d(gamma)
    d2 = _d(gamma, 2)
    return np.cross(d1, d2) / np.linalg.norm(d1, axis=1)[:, None] ** 3


def step_filament(curve, dt):
    (gamma,) = rk4(lambda s: (filament_rhs(s[0]),), (curve.gamma,), dt)
    drift = arclength_variation(gamma)
    if drift > DRIFT_TOL:
        raise ArclengthDrift(f"relative speed variation {drift:.3e} exceeds {DRIFT_TOL:.0e}")
    # bypass the strict constructor tolerance; drift is monitored above
    out = object.__new__(FilamentCurve)
    object.__setattr__(out, "gamma", gamma)
    return out


def curvature_torsion(curve):
    """Curvature and torsion as functions of the curve parameter."""
    gamma = curve.gamma
    d1, d2, d3 = _d(gamma), _d(gamma, 2), _d(gamma, 3)
    cross = np.cross(d1, d2)
    cross2 = np.sum(cross * cross, axis=1)
    k = np.sqrt(cross2) / np.linalg.norm(d1, axis=1) ** 3
    if np.min(k) <= CURVATURE_FLOOR:
        raise VanishingCurvature(f"curvature drops to {np.min(k):.3e}")
    tau = np.sum(cross * d3, axis=1) / cross2
    return k, tau


def hasimoto_transform(curve, tol=TORSION_TOL):
    """``psi = k exp(i * integral of tau ds)``, left unnormalized."""
    k, tau = curvature_torsion(curve)
    c = curve.speed
    mean = integrate(tau)
    if abs(mean) * c * 2 * np.pi > tol:
        raise NonzeroTotalTorsion(f"total torsion {mean * c * 2 * np.pi:.3e} does not vanish")
    phase = c * antiderivative(tau - mean, tol=np.inf)
    return k * np.exp(1j * phase)
