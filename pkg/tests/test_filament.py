import numpy as np
import pytest
import sympy as sp

from geohydro.errors import ArclengthDrift, NonzeroTotalTorsion, VanishingCurvature
from geohydro.filament import (
    FilamentCurve,
    arclength_variation,
    curvature_torsion,
    hasimoto_transform,
    step_filament,
)
from geohydro.grid import nodes
from geohydro.verify import saddle_curve


def generic(x):
    return np.stack(
        [np.cos(x) + 0.1 * np.cos(2 * x), np.sin(x) + 0.05 * np.sin(2 * x), 0.2 * np.cos(2 * x) + 0.1 * np.sin(3 * x)],
        axis=1,
    )


def test_rejects_invalid_curves():
    x = nodes(32)
    with pytest.raises(ValueError):
        FilamentCurve(np.stack([x, 0 * x, 0 * x], axis=1))  # straight segment, not closed
    with pytest.raises(ValueError):
        FilamentCurve(np.zeros((32, 2)))
    with pytest.raises(ValueError):
        FilamentCurve(np.stack([2 * np.cos(x), np.sin(x), 0 * x], axis=1))  # ellipse sampled off arclength


def test_from_parametric_reaches_arclength():
    curve = FilamentCurve.from_parametric(generic, 128)
    assert arclength_variation(curve.gamma) <= 1e-6


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 7.0])
def test_circle_invariants(r):
    c = FilamentCurve.circle(64, r)
    k, tau = curvature_torsion(c)
    assert np.max(np.abs(k * r - 1)) < 1e-12
    assert np.max(np.abs(tau)) < 1e-12
    assert np.max(np.abs(hasimoto_transform(c) * r - 1)) < 1e-12


def test_circle_translates_along_binormal():
    c = FilamentCurve.circle(64)
    start = c.gamma.copy()
    # explicit RK4 on a third-order operator: dt must stay below ~2.7e-3 at n = 64
    for _ in range(500):
        c = step_filament(c, 0.002)
    shift = c.gamma - start
    assert np.max(np.abs(shift - np.array([0.0, 0.0, 1.0]))) < 1e-13
    assert arclength_variation(c.gamma) <= 1e-6


def test_planar_curve_rigid_at_first_order():
    # a planar non-circular closed curve: curvature profile is unchanged to O(dt^2)
    curve = FilamentCurve.from_parametric(
        lambda x: np.stack([np.cos(x) + 0.1 * np.cos(2 * x), np.sin(x) - 0.1 * np.sin(2 * x), 0 * x], axis=1), 128
    )
    k0, _ = curvature_torsion(curve)
    changes = []
    for dt in (4e-4, 2e-4):
        k1, _ = curvature_torsion(step_filament(curve, dt))
        changes.append(np.max(np.abs(k1 - k0)))
    assert changes[0] / changes[1] > 3.5


def _symbolic_frenet(params):
    """Curvature and torsion from exact symbolic derivatives of the parametrization."""
    t = sp.symbols("t")
    r = sp.Matrix(
        [sp.cos(t) + sp.cos(2 * t) / 10, sp.sin(t) + sp.sin(2 * t) / 20, sp.cos(2 * t) / 5 + sp.sin(3 * t) / 10]
    )
    d1, d2, d3 = r.diff(t), r.diff(t, 2), r.diff(t, 3)
    cross = d1.cross(d2)
    k = sp.sqrt(cross.dot(cross)) / sp.sqrt(d1.dot(d1)) ** 3
    tau = cross.dot(d3) / cross.dot(cross)
    fk, ftau = sp.lambdify(t, k, "numpy"), sp.lambdify(t, tau, "numpy")
    return fk(params), ftau(params)


def test_frenet_against_symbolic_oracle():
    n = 128
    curve = FilamentCurve.from_parametric(generic, n)
    # recover the parameter of each sample by matching it on a fine parametric grid
    fine = np.linspace(0, 2 * np.pi, 200_001)
    pts = generic(fine)
    params = np.array([fine[np.argmin(np.sum((pts - g) ** 2, axis=1))] for g in curve.gamma])
    k_ref, tau_ref = _symbolic_frenet(params)
    k, tau = curvature_torsion(curve)
    assert np.max(np.abs(k - k_ref)) < 1e-3
    assert np.max(np.abs(tau - tau_ref)) < 1e-3 * np.max(np.abs(tau_ref)) + 1e-3


def test_nonzero_total_torsion():
    with pytest.raises(NonzeroTotalTorsion):
        hasimoto_transform(FilamentCurve.from_parametric(generic, 128))


def test_saddle_has_zero_total_torsion():
    psi = hasimoto_transform(saddle_curve(64, 0.1))
    assert np.all(np.abs(psi) > 0)


def test_vanishing_curvature():
    # figure eight: by symmetry its inflection point at the crossing lands on node 0
    eight = lambda s: np.stack([np.sin(s), np.sin(s) * np.cos(s), 0 * s], axis=1)  # noqa: E731
    with pytest.raises(VanishingCurvature):
        curvature_torsion(FilamentCurve.from_parametric(eight, 256))


def test_arclength_drift_guard():
    curve = saddle_curve(64, 0.3)
    with pytest.raises(ArclengthDrift):
        for _ in range(50):
            curve = step_filament(curve, 0.05)
