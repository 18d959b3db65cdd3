"""Resonance residual from both Riccati solutions and the integrals I_+/I_-.

For decay parameter ``z`` (``lambda = V_inf - z^2``) the solution
``f = exp(z x) + g`` with ``g = o(exp(-z x))`` has boundary data

    g(0)  = (I_- - I_+ E) / (alpha0 - alpha_-(0) + 2z)
    g'(0) = (I_- (alpha_-(0) - z) - I_+ (alpha0 + z) E) / (alpha0 - alpha_-(0) + 2z)

with ``E = exp(int_0^inf alpha_-)``,
``I_+ = int_0^inf V exp(-int_t^inf alpha_-) dt`` and
``I_- = int_0^inf V exp(2 z t + int_0^t alpha_+) dt``. The residual is
``a (1 + g(0)) + b (z + g'(0))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import ode
from .errors import RiccatiPoleError, SmallDenominatorError
from .ode import Functional, choose_path, mul_exp, tail_integral

ADMISSIBILITY = 1e-6


@dataclass(frozen=True)
class Method1State:
    z: complex
    alpha0: complex
    I_plus_0: complex
    I_minus_0: complex
    exp_int_alpha_minus: complex
    alpha_minus_0: complex
    g0: complex
    g0_prime: complex
    wronskian_denominator: complex
    path: ode.PathChoice

    @property
    def f0(self):
        return 1.0 + self.g0

    @property
    def f0_prime(self):
        return self.z + self.g0_prime


def _i_plus_scaled():
    # J(x) = exp(B(x)) int_x^inf V exp(-B) obeys J' = -V - alpha_- J, so
    # J(0) = I_+ E is accumulated without forming exp(+-B)
    return Functional(lambda x, a, b, v, J: v + a * J, coupled=True)


def _i_minus(z):
    two_z = 2 * z

    def integrand(x, a, A, v):
        return mul_exp(v, two_z * x + A)

    return Functional(integrand)


def _alpha0_candidates(z, alpha_minus_0, requested):
    if requested is not None:
        yield complex(requested)
        return
    for c in (z, 2 * z, 0.5 * z, z + 1.0, 3 * z, -0.5 * z):
        yield complex(c)


def boundary_values(problem, z, *, alpha0=None, tol=None, path=None) -> Method1State:
    """g(0), g'(0) and the intermediate quantities for decay parameter *z*."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("method one requires Re z > 0")
    tol = problem.tol if tol is None else tol
    if path is None:
        path = choose_path(problem, z)
    minus = _solve_minus(problem, z, tol, path)
    path = minus[1]
    minus = minus[0]
    a_m0 = minus.values["alpha0"]
    B0 = minus.values["int_alpha"]
    IE = minus.values["I_plus_E"]
    try:
        E = cmath.exp(B0)
    except OverflowError:
        E = complex(math.inf, 0.0)
    I_plus = mul_exp(IE, -B0)
    vt = problem.potential.tilde_scalar()
    two_z = 2 * z

    def i_minus_tail(X, omega, alpha_end, int_alpha):
        return tail_integral(lambda x: mul_exp(vt(x), two_z * x + int_alpha), X, omega)

    last_error = None
    for a0 in _alpha0_candidates(z, a_m0, alpha0):
        den = a0 - a_m0 + two_z
        if abs(den) < ADMISSIBILITY * abs(z):
            last_error = SmallDenominatorError(f"alpha0={a0} is inadmissible (alpha0 - alpha_-(0) + 2z ~ 0)")
            continue
        try:
            plus = ode.solve_alpha_plus(
                problem, z, a0, tol=tol, path=path, functionals={"I_minus": _i_minus(z)._replace(tail=i_minus_tail)}
            )
        except RiccatiPoleError as exc:
            last_error = exc
            continue
        I_minus = plus.values["I_minus"]
        g0 = (I_minus - IE) / den
        g0p = (I_minus * (a_m0 - z) - IE * (a0 + z)) / den
        return Method1State(z, a0, I_plus, I_minus, E, a_m0, g0, g0p, den, path)
    raise last_error


def _solve_minus(problem, z, tol, path):
    funcs = {"I_plus_E": _i_plus_scaled()}
    try:
        return ode.solve_alpha_minus(problem, z, tol=tol, path=path, functionals=funcs), path
    except RiccatiPoleError:
        # a zero of u_- near the ray: nudge the ray when the potential allows it
        if not problem.potential.analytic or problem.path_angle is not None:
            raise
    last = None
    for d in (0.05, -0.05, 0.1, -0.1):
        alt = choose_path(problem, z, angle=path.angle + d)
        try:
            return ode.solve_alpha_minus(problem, z, tol=tol, path=alt, functionals=funcs), alt
        except RiccatiPoleError as exc:
            last = exc
    raise last


def residual(problem, z, **opts) -> complex:
    """``a (1 + g(0; z)) + b (z + g'(0; z))``; zeros with Re z > 0 are resonances."""
    st = boundary_values(problem, z, **opts)
    bc = problem.bc
    return bc.a * st.f0 + bc.b * st.f0_prime


def bound_state_residual(problem, z, *, tol=None, path=None) -> complex:
    """``a + b u_-'(0)/u_-(0)`` for the decaying solution ``u_- ~ exp(-z x)``.

    ``u_-'/u_- = alpha_- - z``, so zeros with ``Re z > 0`` are eigenvalues
    ``lambda = V_inf - z^2`` with square-integrable eigenfunctions.
    """
    z = complex(z)
    if z.real <= 0:
        raise ValueError("bound_state_residual requires Re z > 0")
    tol = problem.tol if tol is None else tol
    if path is None:
        path = choose_path(problem, z)
    sol, _ = _solve_minus(problem, z, tol, path)
    bc = problem.bc
    return bc.a + bc.b * (sol.values["alpha0"] - z)
