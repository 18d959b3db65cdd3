"""Resonance residual from alpha_- alone.

With ``u_-(x) = exp(-z x) gamma(x)``, ``gamma(x) = exp(-int_x^inf alpha_-)``,
the solution ``f = u_- (c1 + 2z int_0^x u_-^{-2})`` behaves like ``exp(z x)``
at infinity when

    c1 = 1/u_-(0) + int_0^inf exp(2 z x) (gamma (2z - alpha_-) - 2z) / gamma^2 dx.

The integrand is rewritten as ``-exp(2 z x + B) (2z expm1(B) + alpha_-)``
with ``B = int_x^inf alpha_-`` so that the ``O(V)`` cancellation happens
analytically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import ode
from .errors import RiccatiPoleError
from .ode import Functional, choose_path, mul_exp


def cexpm1(w):
    """``exp(w) - 1`` without cancellation for small ``|w|``."""
    w = complex(w)
    if abs(w) > 0.5:
        return cmath.exp(w) - 1.0
    x, y = w.real, w.imag
    em1 = math.expm1(x)
    s = math.sin(0.5 * y)
    return complex(em1 * math.cos(y) - 2.0 * s * s, math.exp(x) * math.sin(y))


@dataclass(frozen=True)
class Method2State:
    z: complex
    u_minus_0: complex
    alpha_minus_0: complex
    c1: complex
    f0: complex
    f0_prime: complex
    solution: ode.RiccatiSolution

    @property
    def u_minus_prime_0(self):
        return (self.alpha_minus_0 - self.z) * self.u_minus_0

    def gamma_of(self, s):
        """``gamma`` at path coordinate *s* (normalised so gamma -> 1 at infinity)."""
        import numpy as np

        return np.exp(-np.asarray(self.solution.int_alpha_to_inf(s)))


def _c1_functional(z):
    two_z = 2 * z

    def integrand(x, a, B, v):
        return -mul_exp(two_z * cexpm1(B) + a, two_z * x + B)

    return Functional(integrand)


def boundary_values(problem, z, *, tol=None, path=None) -> Method2State:
    """u_-(0), c1, f(0) and f'(0) for decay parameter *z*."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("method two requires Re z > 0")
    tol = problem.tol if tol is None else tol
    if path is None:
        path = choose_path(problem, z)
    funcs = {"c1_integral": _c1_functional(z)}
    try:
        sol = ode.solve_alpha_minus(problem, z, tol=tol, path=path, functionals=funcs)
    except RiccatiPoleError:
        if not problem.potential.analytic or problem.path_angle is not None:
            raise
        sol = None
        for d in (0.05, -0.05, 0.1, -0.1):
            try:
                sol = ode.solve_alpha_minus(
                    problem, z, tol=tol, path=choose_path(problem, z, angle=path.angle + d), functionals=funcs
                )
                break
            except RiccatiPoleError:
                continue
        if sol is None:
            raise
    B0 = sol.values["int_alpha"]
    a_m0 = sol.values["alpha0"]
    u0 = cmath.exp(-B0)
    c1 = cmath.exp(B0) + sol.values["c1_integral"]
    f0 = c1 * u0
    u0p = (a_m0 - z) * u0
    f0p = c1 * u0p + 2 * z / u0
    return Method2State(z, u0, a_m0, c1, f0, f0p, sol)


def residual(problem, z, **opts) -> complex:
    """``a f(0) + b f'(0)`` for the solution normalised as ``f ~ exp(z x)``."""
    st = boundary_values(problem, z, **opts)
    return problem.bc.a * st.f0 + problem.bc.b * st.f0_prime
