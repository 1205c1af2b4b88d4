"""Madelung transform as a Kahler map, checked on one random point.

Run: python3 demos/madelung_geometry.py
"""

import numpy as np

from geohydro.conventions import CONVENTIONS
from geohydro.madelung import (
    canonical_symplectic,
    fubini_study_metric,
    madelung_differential,
    madelung_forward,
    madelung_inverse,
    projective_symplectic,
    sasaki_fr_metric,
)
from geohydro.verify import random_cotangent_sample

rng = np.random.default_rng(0)
p, v, w = random_cotangent_sample(rng, 64)
psi = madelung_forward(p)
a, b = madelung_differential(p, v), madelung_differential(p, w)

print("Sasaki-Fisher-Rao g(v, w)   ", sasaki_fr_metric(p, v, w))
print("Fubini-Study    g(dM v, dM w)", fubini_study_metric(psi, a, b))
print("projective form             ", projective_symplectic(psi, a, b))
print("factor * canonical form     ", CONVENTIONS["symplectic_factor"] * canonical_symplectic(v, w))

back = madelung_inverse(psi)
print("inverse round trip, rho and theta:", np.max(np.abs(back.rho - p.rho)), np.max(np.abs(back.theta - p.theta)))
