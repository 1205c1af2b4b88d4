"""Oracles that pin every entry of the conventions table."""

import numpy as np
import pytest
import sympy as sp

from geohydro.conventions import CONVENTIONS, schrodinger_potential
from geohydro.densities import PolynomialNonlinearity, normalize_density
from geohydro.grid import nodes
from geohydro.verify import NeumannFisherConfig, check_correspondence, much_residual


def _madelung_substitution():
    """Insert psi = R exp(i theta / 2) into i psi_t = -psi'' + V psi + f psi.

    Hydrodynamic side: rho_t = -(rho theta')', theta_t = -theta'^2/2 - dU/drho with
    dU/drho = cV V + cF f - (cq/2) R''/R. Returns the coupling constants that make
    the substitution vanish identically.
    """
    R, R1, R2, th1, th2, V, f = sp.symbols("R R1 R2 th1 th2 V f", real=True)
    cV, cF, cq = sp.symbols("cV cF cq", real=True)
    theta_t = -th1**2 / 2 - cV * V - cF * f + cq / 2 * R2 / R
    R_t = -R1 * th1 - R * th2 / 2  # from rho_t = 2 R R_t = -(R^2 th1)'
    # everything divided by the common factor exp(i theta / 2)
    lhs = sp.I * (R_t + sp.I * R * theta_t / 2)
    psi_xx = R2 + sp.I * R1 * th1 + sp.I * R * th2 / 2 - R * th1**2 / 4
    residual = sp.expand(lhs - (-psi_xx + V * R + f * R))
    eqs = [sp.re(residual).coeff(s) for s in (V, f, R2)] + [sp.im(residual)]
    return sp.solve([e for e in eqs if e != 0], [cV, cF, cq], dict=True)


def test_schrodinger_couplings_from_substitution():
    (solution,) = _madelung_substitution()
    cV, cF, cq = (solution[sp.Symbol(s, real=True)] for s in ("cV", "cF", "cq"))
    assert (cV, cF, cq) == (2, 2, 4)
    assert CONVENTIONS["coupling_V"] == float(cV)
    assert CONVENTIONS["coupling_F"] == float(cF)
    assert CONVENTIONS["quantum_coefficient"] == float(cq)


def test_symplectic_factor_from_expansion():
    R, rv, rw, tv, tw = sp.symbols("R rv rw tv tw", real=True)
    a = rv / (2 * R) + sp.I * R * tv / 2
    b = rw / (2 * R) + sp.I * R * tw / 2
    pointwise = sp.im(sp.expand(sp.conjugate(a) * b))
    canonical = tw * rv - tv * rw
    assert sp.simplify(pointwise / canonical) == sp.Rational(1, 4)
    assert CONVENTIONS["symplectic_factor"] == 0.25


def test_schrodinger_potential_terms():
    V = np.cos(nodes(16))
    spec = schrodinger_potential(V, PolynomialNonlinearity((0.0, 1.0)))
    kinds = [type(t).__name__ for t in spec.terms]
    assert kinds == ["Quantum", "Classical", "IntegralF"]
    assert len(schrodinger_potential(V).terms) == 2


def test_transport_sign_oracle():
    x = nodes(128)
    rho0 = normalize_density(1 + 0.3 * np.cos(x))
    rho1 = normalize_density(1 + 0.3 * np.sin(2 * x))
    residual = {s: np.max(np.abs(much_residual(rho0, rho1, 0.05, 1e-3, transport_sign=s)[0])) for s in (1, -1)}
    assert residual[CONVENTIONS["transport_sign"]] < 1e-8
    assert residual[-CONVENTIONS["transport_sign"]] > 1e-2


@pytest.mark.parametrize("scale, passes", [(1.0, True), (0.25, False)])
def test_fisher_newton_scale(scale, passes):
    # perturb multiplies the tabulated scale: 0.25 turns 4 I into the naive I
    report = check_correspondence("neumann_fisher", NeumannFisherConfig(perturb=scale))
    assert report.passed is passes
    assert CONVENTIONS["fisher_newton_scale"] == 4.0
