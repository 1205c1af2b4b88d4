"""Time steppers for the Newton/Hamilton flows on densities and wave functions.

Every flow except Schrodinger uses classical RK4; Schrodinger uses Strang
splitting, which is unitary and exact on plane waves. Steppers are pure
``state -> state`` functions.
"""

from typing import NamedTuple

import numpy as np

from .densities import PolynomialNonlinearity, potential_derivative, potential_value, pressure
from .errors import NonZeroMean, VacuumFormation
from .grid import (
    DENSITY_FLOOR,
    antiderivative,
    integrate,
    invert_inertia,
    spectral_derivative,
    wavenumbers,
)
from .madelung import gauge_fix

TWOHS_MEAN_TOL = 1e-8


class HydroState(NamedTuple):
    rho: np.ndarray
    theta: np.ndarray


class BarotropicState(NamedTuple):
    rho: np.ndarray
    u: np.ndarray


class NeumannState(NamedTuple):
    f: np.ndarray
    f_dot: np.ndarray


class TwoHSState(NamedTuple):
    u: np.ndarray
    sigma: np.ndarray


def rk4(rhs, state, dt):
    """One classical Runge-Kutta step for a tuple-of-arrays state."""

    rebuild = getattr(type(state), "_make", tuple)

    def shift(y, k, h):
        return rebuild(a + h * b for a, b in zip(y, k))

    k1 = rhs(state)
    k2 = rhs(shift(state, k1, dt / 2))
    k3 = rhs(shift(state, k2, dt / 2))
    k4 = rhs(shift(state, k3, dt))
    return rebuild(
        y + dt / 6 * (a + 2 * b + 2 * c + d) for y, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


def _no_vacuum(rho):
    lo = np.min(rho)
    if not lo > DENSITY_FLOOR:
        raise VacuumFormation(f"density fell to {lo:.3e}")


# --- Schrodinger ---------------------------------------------------------


def step_schrodinger(psi, V, nonlin, dt):
    """Strang step for ``i psi_t = -psi'' + V psi + f(|psi|^2) psi``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    nonlin = nonlin or PolynomialNonlinearity()
    k2 = wavenumbers(len(psi)) ** 2

    def half_potential(p):
        return p * np.exp(-0.5j * dt * (V + nonlin(np.abs(p) ** 2)))

    psi = half_potential(psi)
    psi = np.fft.ifft(np.exp(-1j * dt * k2) * np.fft.fft(psi))
    return half_potential(psi)


# --- Hamilton's equations on T*Dens (Wasserstein-Otto) --------------------


def hydro_rhs(state, spec):
    rho, theta = state
    _no_vacuum(rho)
    dtheta = spectral_derivative(theta)
    return HydroState(
        -spectral_derivative(rho * dtheta),
        -0.5 * dtheta**2 - potential_derivative(spec, rho),
    )


def step_hydro(state, spec, dt):
    rho, theta = rk4(lambda s: hydro_rhs(s, spec), HydroState(*state), dt)
    _no_vacuum(rho)
    return HydroState(rho, gauge_fix(rho, theta))


def barotropic_rhs(state, law):
    rho, u = state
    _no_vacuum(rho)
    return BarotropicState(
        -spectral_derivative(rho * u),
        -u * spectral_derivative(u) - spectral_derivative(pressure(law, rho)) / rho,
    )


def step_barotropic(state, law, dt):
    new = rk4(lambda s: barotropic_rhs(s, law), BarotropicState(*state), dt)
    _no_vacuum(new.rho)
    return new


# --- Fisher-Rao side -------------------------------------------------------


def neumann_multiplier(f, f_dot):
    return integrate(f_dot**2 + f * spectral_derivative(f, 2))


def neumann_rhs(state):
    f, f_dot = state
    lam = neumann_multiplier(f, f_dot)
    return NeumannState(f_dot, spectral_derivative(f, 2) - lam * f)


def step_neumann(state, dt):
    f, f_dot = rk4(neumann_rhs, NeumannState(*state), dt)
    f = f / np.sqrt(integrate(f * f))
    f_dot = f_dot - integrate(f * f_dot) * f
    return NeumannState(f, f_dot)


def inertia(u):
    """``integrate(u) - u''``, the momentum of the muCH equation."""
    return integrate(u) - spectral_derivative(u, 2)


def much_rhs(m):
    u = invert_inertia(m)
    return -u * spectral_derivative(m) - 2 * spectral_derivative(u) * m


def step_much(u, dt):
    (m,) = rk4(lambda s: (much_rhs(s[0]),), (inertia(u),), dt)
    return invert_inertia(m)


def twohs_velocity(w):
    """Recover ``u`` from ``w = u''`` under the gauge ``u(0) = 0``."""
    u = antiderivative(antiderivative(w, tol=TWOHS_MEAN_TOL))
    return u - u[0]


def twohs_rhs(w, sigma):
    u = twohs_velocity(w)
    du = spectral_derivative(u)
    return (
        -2 * du * w - u * spectral_derivative(w) + sigma * spectral_derivative(sigma),
        -spectral_derivative(sigma * u),
    )


def step_2hs(state, dt):
    u, sigma = state
    w = spectral_derivative(u, 2)
    if abs(integrate(w)) > TWOHS_MEAN_TOL:
        raise NonZeroMean("2HS compatibility integrate(u'') = 0 is violated")
    w, sigma = rk4(lambda s: twohs_rhs(*s), (w, np.asarray(sigma, dtype=float)), dt)
    return TwoHSState(twohs_velocity(w), sigma)


# --- Hamiltonians ----------------------------------------------------------


def evaluate_hamiltonian(kind, state, spec=None):
    """Quadrature of the conserved energy of the flow named by ``kind``.

    ``schrodinger``: ``state`` is psi, ``spec`` a ``(V, nonlinearity)`` pair.
    ``hydro``: ``(rho, theta)`` with a PotentialSpec.
    ``nls_euler``: psi with an internal-energy law (or None for e = 0).
    ``barotropic``: ``(rho, u)`` with an internal-energy law.
    ``neumann``, ``much``, ``twohs`` take their state alone.
    """
    if kind == "schrodinger":
        psi = state
        V, nonlin = spec if spec is not None else (0.0, None)
        nonlin = nonlin or PolynomialNonlinearity()
        a = np.abs(psi) ** 2
        grad = integrate(np.abs(spectral_derivative(psi)) ** 2)
        return float(0.5 * grad + 0.5 * integrate(V * a + nonlin.primitive(a)))
    if kind == "hydro":
        rho, theta = state
        kinetic = 0.5 * integrate(spectral_derivative(theta) ** 2 * rho)
        return float(kinetic + (potential_value(spec, rho) if spec is not None else 0.0))
    if kind == "nls_euler":
        psi = state
        a = np.abs(psi)
        energy = integrate(spec.energy(a**2) * a**2) if spec is not None else 0.0
        return float(
            0.5 * integrate(np.abs(spectral_derivative(psi)) ** 2)
            - 0.5 * integrate(spectral_derivative(a) ** 2)
            + energy
        )
    if kind == "barotropic":
        rho, u = state
        return float(integrate(0.5 * rho * u**2 + spec.energy(rho) * rho))
    if kind == "neumann":
        f, f_dot = state
        return float(0.5 * integrate(f_dot**2) + 0.5 * integrate(spectral_derivative(f) ** 2))
    if kind == "much":
        return float(0.5 * integrate(state * inertia(state)))
    if kind == "twohs":
        u, sigma = state
        return float(0.25 * integrate(spectral_derivative(u) ** 2 + sigma**2))
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")
