"""Theta-function degeneration and the genus-1 Fay identity.

The (N+1)-dimensional theta sum with the synthetic pinched period matrix
factorizes, at the half-period phase tuning, into the Fredholm determinant
times the background theta.  The residual decays like eps^(2 pi) as the
bands shrink; the Fay determinant identity underpinning the factorization
holds at machine precision for random point configurations.
"""

import numpy as np

from cnoidal_kdv import (
    DegenerationSpec,
    JacobianPoint,
    degeneration_residual,
    fay_residual,
    half_periods,
    spectrum_from_points,
)

curve = half_periods(2.0, 1.0, -3.0)
hot = JacobianPoint(0.30 + 0j, 0)
cool = JacobianPoint(0.24 + curve.tau / 2, 1)
sp = spectrum_from_points(curve, [(hot, 0.0), (cool, 0.0)])

rng = np.random.default_rng(7)
x_phase = np.array([0.2j, -0.15j, 0.37])
print("degeneration residual |Theta - det(1+G) theta3(beta - A)|, N = 2:")
for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
    r = degeneration_residual(x_phase, DegenerationSpec(eps, sp), radius=6)
    print(f"  eps = {eps:7.0e}:  residual = {r:.3e}")
print("  (rate: eps^(2 pi) ~ eps^6.28 per the first excluded lattice shell)")

print("\nFay identity residuals at random points:")
for n in (1, 2, 3, 4):
    xs = rng.uniform(0, 1, n) + 1j * rng.uniform(0, 0.3, n)
    xh = rng.uniform(0, 1, n) + 1j * rng.uniform(0, 0.3, n)
    e_pt = rng.uniform(0, 1) + 0.15j
    print(f"  n = {n}: {fay_residual(n, xs, xh, e_pt, curve):.3e}")
