"""
Eigenvalues from an entire function
===================================

On the whole line, the zeros of ``phi(z)`` in ``Re z > 0`` give the
eigenvalues ``lambda = -z^2``. Here ``V(x) = -3 exp(-x^2)``.
"""

#%%
import math

from resonances import phi
from resonances.potentials import WHOLE_LINE, gaussian_sum, l1_norm
from resonances.problem import Problem

prob = Problem(gaussian_sum([-3.0], [1.0]), domain=WHOLE_LINE, tol=1e-11)
N = l1_norm(prob.potential, domain=WHOLE_LINE)
print(f"||V||_1 = {N:.6f}, so |lambda| <= {N * N / 4:.4f}")

#%%
# Scan a rectangle that holds every admissible z.
found = phi.eigenvalues(prob, (0.005, N / 2 + 0.1, -0.5, 0.5))
for r in sorted(found, key=lambda r: r.lam.real):
    print(f"lambda = {r.lam.real:+.10f}   |phi| = {r.residual_abs:.1e}")

#%%
# A contour count confirms nothing is left outside.
outer = phi.half_annulus(N / 2, 1.5 * N, 1e-3)
print("zeros with N/2 < |z| < 3N/2:", phi.count_zeros_polygon(prob, outer, n_min=4))
print("sup |f~| at z = 8:", phi.phi(prob, 8.0).f_tilde_sup, "<=", 8 / (8 - N))
