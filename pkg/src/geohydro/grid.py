"""Spectral calculus on the uniform periodic grid of the circle [0, 2pi).

Fields are plain 1-D numpy arrays sampled at the nodes ``x_j = 2 pi j / n``.
The grid is implied by the array length, which must be a power of two and at
least 16. Integrals are taken against the normalized measure ``dx / 2pi``, so
``integrate`` is simply the sample mean and a unit-mass density has mean 1.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonPositiveDensity, NonZeroMean

MEAN_TOL = 1e-10
DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class PeriodicGrid:
    n: int

    def __post_init__(self):
        check_size(self.n)

    @property
    def length(self):
        return 2 * np.pi

    @property
    def nodes(self):
        return nodes(self.n)

    @property
    def wavenumbers(self):
        return wavenumbers(self.n)

    def field(self, values):
        """Broadcast a scalar or validate an array as a field on this grid."""
        arr = np.asarray(values)
        if arr.ndim == 0:
            return np.full(self.n, arr[()], dtype=arr.dtype if arr.dtype.kind == "c" else float)
        if arr.shape != (self.n,):
            raise ValueError(f"expected {self.n} samples, got shape {arr.shape}")
        return arr


def check_size(n):
    if n < 16 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 16, got {n}")


def _size(f):
    n = np.shape(f)[-1]
    check_size(n)
    return n


@lru_cache(maxsize=None)
def _nodes(n):
    x = 2 * np.pi * np.arange(n) / n
    x.flags.writeable = False
    return x


@lru_cache(maxsize=None)
def _wavenumbers(n):
    k = np.fft.fftfreq(n, 1.0 / n)
    k.flags.writeable = False
    return k


def nodes(n):
    check_size(n)
    return _nodes(n)


def wavenumbers(n):
    """Integer wavenumbers in FFT order; the Nyquist mode sits at index n/2 as -n/2."""
    check_size(n)
    return _wavenumbers(n)


def integrate(f):
    return np.mean(f, axis=-1)


def inner(f, g):
    """Hermitian L2 product, conjugate-linear in the first slot."""
    return np.mean(np.conj(f) * g, axis=-1)


def spectral_derivative(f, order=1):
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    n = _size(f)
    k = wavenumbers(n)
    symbol = (1j * k) ** order
    if order % 2:
        symbol = symbol.copy()
        symbol[n // 2] = 0.0
    out = np.fft.ifft(symbol * np.fft.fft(f, axis=-1), axis=-1)
    if np.isrealobj(f):
        return out.real
    return out


def _require_mean_zero(f, tol):
    mean = integrate(f)
    if np.any(np.abs(mean) > tol):
        raise NonZeroMean(f"field has mean {np.max(np.abs(mean)):.3e}, tolerance {tol:.1e}")
    return mean


def antiderivative(f, tol=MEAN_TOL):
    """Mean-zero periodic primitive of a mean-zero field."""
    mean = _require_mean_zero(f, tol)
    n = _size(f)
    k = wavenumbers(n)
    fh = np.fft.fft(f - np.asarray(mean)[..., None], axis=-1)
    inv = np.zeros(n, dtype=complex)
    inv[1:] = 1.0 / (1j * k[1:])
    inv[n // 2] = 0.0
    out = np.fft.ifft(inv * fh, axis=-1)
    return out.real if np.isrealobj(f) else out


def invert_inertia(m):
    """Solve ``integrate(u) - u'' = m``."""
    n = _size(m)
    k2 = wavenumbers(n) ** 2
    k2 = k2.copy()
    k2[0] = 1.0
    out = np.fft.ifft(np.fft.fft(m, axis=-1) / k2, axis=-1)
    return out.real if np.isrealobj(m) else out


def check_positive(rho, floor=DENSITY_FLOOR):
    rho = np.asarray(rho, dtype=float)
    if not np.all(rho > floor):
        raise NonPositiveDensity(f"density minimum {np.min(rho):.3e} is not above {floor:.0e}")
    return rho


def solve_weighted_poisson(rho, rhs):
    """Mean-zero theta with ``(rho theta')' = rhs``.

    One dimension lets us integrate once in closed form: ``rho theta' = R + c``
    where ``R`` is the primitive of ``rhs`` and ``c`` makes ``theta'`` mean-zero.
    """
    rho = check_positive(rho)
    R = antiderivative(rhs)
    c = -integrate(R / rho) / integrate(1.0 / rho)
    dtheta = (R + c) / rho
    return antiderivative(dtheta - integrate(dtheta))


def evaluate(f, points):
    """Evaluate the trigonometric interpolant of ``f`` at arbitrary points.

    Direct summation of the Fourier series; the Nyquist mode is split evenly
    between +n/2 and -n/2 so real samples give a real interpolant.
    """
    n = _size(f)
    points = np.asarray(points, dtype=float)
    coeffs = np.fft.fft(f) / n
    k = wavenumbers(n).copy()
    k[n // 2] = n // 2
    phase = np.exp(1j * np.multiply.outer(points, k))
    nyq = coeffs[n // 2]
    coeffs = coeffs.copy()
    coeffs[n // 2] = 0.0
    vals = phase @ coeffs + nyq * np.cos(n // 2 * points)
    return vals.real if np.isrealobj(f) else vals
