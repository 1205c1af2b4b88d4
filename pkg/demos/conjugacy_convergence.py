"""Schrodinger vs. quantum hydrodynamics: the gap shrinks like dt^2.

Both sides start from the same (rho, theta). The Schrodinger side uses Strang
splitting, the hydro side RK4, so the gap is dominated by the splitting error
and should drop by about 4 per halving of dt.

Run: python3 demos/conjugacy_convergence.py
"""

from geohydro.verify import ConjugacyConfig, conjugacy_difference

cfg = ConjugacyConfig()
previous = None
for dt in (4e-4, 2e-4, 1e-4, 5e-5):
    sup, l2 = conjugacy_difference(cfg, dt)
    ratio = f"{previous / sup:6.3f}" if previous else "     -"
    print(f"dt={dt:.0e}  sup gap={sup:.3e}  L2 gap={l2:.3e}  ratio={ratio}")
    previous = sup
