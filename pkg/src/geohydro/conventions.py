"""Normalization constants shared by every check and embedded in run manifests.

Each value is pinned by an oracle in the test suite (symbolic substitution or
a small numerical experiment), not chosen by hand.
"""

from .densities import Classical, IntegralF, PolynomialNonlinearity, PotentialSpec, Quantum

CONVENTIONS = {
    # psi = sqrt(rho) * exp(i theta / 2)
    "phase": "half-angle",
    # Schrodinger i psi_t = -psi'' + V psi + f(|psi|^2) psi corresponds to the hydro
    # potential  quantum_coefficient * I + coupling_V * int V rho + coupling_F * int F(rho)
    "quantum_coefficient": 4.0,
    "coupling_V": 2.0,
    "coupling_F": 2.0,
    # projective symplectic form pulled back by Madelung = factor * canonical form
    "symplectic_factor": 0.25,
    # Newton equation rho'' - rho'^2/(2 rho) + (dU/drho) rho = lambda rho carries no 1/4
    # metric prefactor, so a potential U of the Fisher-Rao Lagrangian enters it as 4 U
    "fisher_newton_scale": 4.0,
    # +1: density is the pullback rho = phi_x (right coset projection)
    "transport_sign": 1,
}


def schrodinger_potential(V, nonlinearity=None):
    """Hydrodynamic potential whose Hamiltonian flow is conjugate to Schrodinger."""
    nonlinearity = nonlinearity or PolynomialNonlinearity()
    terms = [Quantum(CONVENTIONS["quantum_coefficient"]), Classical(V, CONVENTIONS["coupling_V"])]
    if not nonlinearity.is_zero:
        terms.append(IntegralF(nonlinearity, CONVENTIONS["coupling_F"]))
    return PotentialSpec(tuple(terms))
