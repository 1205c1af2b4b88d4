"""Vortex filament under the binormal flow and its Hasimoto wave function.

A unit circle translates rigidly with constant curvature 1. The wave function
built from the Frenet frame is fixed only up to a time-dependent constant
phase, so the NLS phase is read from the gauge rate k''/k - tau^2 + k^2/2,
which is 1/2 for the circle. A tilted saddle curve carries genuine torsion,
and there |psi| = k changes in time.

Run: python3 demos/filament_to_nls.py
"""

import numpy as np

from geohydro.filament import FilamentCurve, curvature_torsion, hasimoto_transform, step_filament
from geohydro.grid import integrate, spectral_derivative
from geohydro.verify import saddle_curve


def gauge_rate(curve):
    k, tau = curvature_torsion(curve)
    k2 = spectral_derivative(k, 2) / curve.speed**2
    return integrate(k2 / k - tau**2 + 0.5 * k**2)


for label, curve, steps in (("circle", FilamentCurve.circle(64), 1000), ("saddle", saddle_curve(64, 0.1), 200)):
    dt = 1e-3
    psi0 = hasimoto_transform(curve)
    for _ in range(steps):
        curve = step_filament(curve, dt)
    psi = hasimoto_transform(curve)
    print(f"{label}: t={dt * steps:g}  length={curve.length:.12f}  gauge phase rate={gauge_rate(curve):.9f}")
    print(f"  |psi| at t=0: {np.abs(psi0).min():.6f} .. {np.abs(psi0).max():.6f}")
    print(f"  |psi| now:    {np.abs(psi).min():.6f} .. {np.abs(psi).max():.6f}")
