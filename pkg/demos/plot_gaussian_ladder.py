"""
Resonances of the Gaussian well
===============================

Follow the resonance ladder of ``V(x) = -exp(-x^2)`` on the half-line,
alternating Dirichlet and Neumann conditions, and check it with the
second residual.
"""

#%%
# Build the problem and follow the ladder from two rough seeds.
from resonances import locator, method_one, method_two
from resonances.potentials import gaussian_well
from resonances.problem import DIRICHLET, NEUMANN, Problem

base = Problem(gaussian_well(), tol=1e-10)


def residual_for(n):
    p = base.with_(bc=DIRICHLET if n % 2 == 0 else NEUMANN)
    return lambda z: method_one.residual(p, z)


rows = locator.ladder(residual_for, (-0.53, -1.24 - 3.48j), 8, lam_of=base.lam, z_of=base.z_of)
for n, r in enumerate(rows):
    print(f"{n:2d}  lambda = {r.lam.real:+.8f} {r.lam.imag:+.8f}i   |r| = {r.residual_abs:.1e}")

#%%
# The second residual vanishes at the same points.
for n, r in enumerate(rows[:4]):
    p = base.with_(bc=DIRICHLET if n % 2 == 0 else NEUMANN)
    r2 = locator.refine(lambda z: method_two.residual(p, z), r.z)
    print(f"{n:2d}  |lambda_one - lambda_two| = {abs(r.lam - r2.lam):.1e}")

#%%
# The lambda values sit on a slowly bending line in the lower half-plane.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.plot([r.lam.real for r in rows], [r.lam.imag for r in rows], "o")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    fig.savefig("gaussian_ladder.png", dpi=120)
except ImportError:
    pass
