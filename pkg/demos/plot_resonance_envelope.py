"""
Where resonances can live
=========================

For the barrier ``V(x) = x^2 exp(-x^2/100)`` the half-planes
``x sin(t) + y cos(t) <= a(t)`` enclose every resonance. Their boundary
touches the real axis at ``a1 = max(V + x V'/2)``.
"""

#%%
from resonances import bounds
from resonances.potentials import modified_gaussian

p = modified_gaussian(10.0)
env = bounds.envelope_S(p, n=48)
print(f"M = max V = {env.M:.6f}, a1 = {env.a1:.6f}, a1/M = {env.a1 / env.M:.6f}")
print("convex boundary:", bounds.polyline_convex(env.x, env.y))

#%%
# Sample points and their margins (negative means excluded).
for lam in (40.0 - 0.5j, 50.0 - 0.1j, 60.0 - 30.0j):
    print(f"lambda = {lam}: margin {env.margin(lam):+.4f}")

#%%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.plot(env.x, env.y, "-")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    fig.savefig("resonance_envelope.png", dpi=120)
except ImportError:
    pass
