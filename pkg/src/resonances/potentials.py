"""Potentials: built-in families, user expressions, norms and ray suprema.

A :class:`Potential` carries two evaluators of the same analytic function:
``scalar`` (cmath, used inside ODE right-hand sides) and ``vector`` (numpy,
used for sampling). Values along rotated rays ``w = exp(i*theta/2) * v`` are
analytic continuations; :func:`evaluate` checks that ``w`` stays inside the
declared sector of analyticity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
from scipy import integrate, optimize

from . import expression
from .errors import DomainError, NonAnalyticError, NonConvergenceError, UnboundedError

HALF_LINE = "half-line"
WHOLE_LINE = "whole-line"


@dataclass(frozen=True, eq=False)
class Potential:
    """An evaluable potential with decay and analyticity metadata.

    ``analytic_sector_alpha`` is the largest angle for which
    ``V(exp(i*theta/2) x)`` is defined for ``0 <= theta <= alpha``; rays with
    ``|arg w| <= alpha/2`` are accepted (real potentials are symmetric under
    conjugation). ``support`` is the right end of the support of
    ``V - v_infinity`` when that is compact; ``exp_sum`` records the
    ``(weight, rate, r)`` triples of ``sum w exp(-s |x|^r)`` when the potential
    was declared in that form.
    """

    name: str
    scalar: Callable[[complex], complex]
    vector: Callable[[np.ndarray], np.ndarray]
    params: Mapping[str, float] = field(default_factory=dict)
    v_infinity: complex = 0.0
    analytic_sector_alpha: float = math.pi
    analytic: bool = True
    domain_hint: str = HALF_LINE
    support: float | None = None
    breakpoints: tuple = ()
    even: bool = False
    real: bool = True
    tree: expression.Node | None = None
    exp_sum: tuple | None = None
    scalar_tilde: Callable[[complex], complex] | None = None
    vector_tilde: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not 0.0 < self.analytic_sector_alpha <= math.pi:
            raise ValueError("analytic_sector_alpha must lie in (0, pi]")
        if self.domain_hint not in (HALF_LINE, WHOLE_LINE):
            raise ValueError(f"unknown domain {self.domain_hint!r}")

    @property
    def kind(self):
        return self.tree if self.tree is not None else self.name

    def __call__(self, w):
        return evaluate(self, w)

    def shifted(self, w):
        """``V(w) - V_inf`` without sector checks (hot path)."""
        if self.scalar_tilde is not None:
            return self.scalar_tilde(w)
        return self.scalar(w) - self.v_infinity

    def shifted_vector(self, w):
        if self.vector_tilde is not None:
            return self.vector_tilde(w)
        return self.vector(w) - self.v_infinity

    def tilde_scalar(self):
        """Fast callable for ``V - V_inf``."""
        if self.scalar_tilde is not None:
            return self.scalar_tilde
        if self.v_infinity == 0:
            return self.scalar
        vs, vinf = self.scalar, self.v_infinity
        return lambda w: vs(w) - vinf

    def __add__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return combine(self, other, 1.0, 1.0)

    def __neg__(self):
        return scale(-1.0, self)

    def __sub__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return combine(self, other, 1.0, -1.0)

    def __mul__(self, c):
        if isinstance(c, (int, float, complex)):
            return scale(c, self)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        extra = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"Potential({self.name}{', ' + extra if extra else ''})"


def _sector_ok(p, w, slack=1e-12):
    w = complex(w)
    if w.imag == 0.0:
        return True
    if w.real < 0:
        w = -w
    return 2.0 * abs(cmath.phase(w)) <= p.analytic_sector_alpha + slack


def evaluate(p: Potential, w) -> complex:
    """Value of the analytic continuation of *p* at ``w``.

    Raises :class:`DomainError` outside the sector ``|2 arg w| <= alpha`` and
    :class:`NonAnalyticError` for non-analytic potentials off the real axis.
    """
    w = complex(w)
    if w.imag != 0.0 and not p.analytic:
        raise NonAnalyticError(f"{p.name} is not analytic; cannot evaluate at {w}")
    if not _sector_ok(p, w):
        raise DomainError(f"{w} lies outside the sector of analyticity of {p.name}")
    return complex(p.scalar(w))


def combine(p, q, cp, cq):
    vs, vq = p.scalar, q.scalar
    ws, wq = p.vector, q.vector
    exp_sum = None
    if p.exp_sum is not None and q.exp_sum is not None:
        exp_sum = tuple((cp * w, s, r) for w, s, r in p.exp_sum) + tuple(
            (cq * w, s, r) for w, s, r in q.exp_sum
        )
    supports = [p.support, q.support]
    tilde = {}
    if p.v_infinity != 0 or q.v_infinity != 0:
        pt, qt = p.tilde_scalar(), q.tilde_scalar()
        tilde = dict(
            scalar_tilde=lambda w: cp * pt(w) + cq * qt(w),
            vector_tilde=lambda w: cp * p.shifted_vector(w) + cq * q.shifted_vector(w),
        )
    return Potential(
        name=f"({p.name}{'+' if cq == 1 else '-' if cq == -1 else f'+{cq}*'}{q.name})",
        scalar=lambda w: cp * vs(w) + cq * vq(w),
        vector=lambda w: cp * ws(w) + cq * wq(w),
        params={**{f"{k}": v for k, v in p.params.items()}, **q.params},
        v_infinity=cp * p.v_infinity + cq * q.v_infinity,
        analytic_sector_alpha=min(p.analytic_sector_alpha, q.analytic_sector_alpha),
        analytic=p.analytic and q.analytic,
        domain_hint=p.domain_hint,
        support=None if None in supports else max(supports),
        breakpoints=tuple(sorted(set(p.breakpoints) | set(q.breakpoints))),
        even=p.even and q.even,
        real=p.real and q.real and complex(cp).imag == 0 and complex(cq).imag == 0,
        exp_sum=exp_sum,
        **tilde,
    )


def scale(c, p):
    vs, ws = p.scalar, p.vector
    return replace(
        p,
        name=f"{c:g}*{p.name}",
        scalar=lambda w: c * vs(w),
        vector=lambda w: c * ws(w),
        v_infinity=c * p.v_infinity,
        real=p.real and complex(c).imag == 0,
        tree=None,
        scalar_tilde=None if p.scalar_tilde is None else (lambda w, f=p.scalar_tilde: c * f(w)),
        vector_tilde=None if p.vector_tilde is None else (lambda w, f=p.vector_tilde: c * f(w)),
        exp_sum=None if p.exp_sum is None else tuple((c * w, s, r) for w, s, r in p.exp_sum),
    )


# --------------------------------------------------------------------------
# built-in families


def zero(domain=HALF_LINE):
    return Potential(
        "zero",
        lambda w: 0j,
        lambda w: np.zeros(np.shape(w), dtype=complex),
        domain_hint=domain,
        support=0.0,
        even=True,
        exp_sum=(),
    )


def gaussian_well(depth=1.0, domain=HALF_LINE):
    """``V(x) = -depth * exp(-x^2)``; analytic for ``|arg x| <= pi/4``."""
    exp = cmath.exp
    return Potential(
        "gaussian",
        lambda w: -depth * exp(-w * w),
        lambda w: -depth * np.exp(-np.asarray(w, dtype=complex) ** 2),
        params={"depth": depth},
        analytic_sector_alpha=math.pi / 2,
        domain_hint=domain,
        even=True,
        exp_sum=((-depth, 1.0, 2),),
    )


def modified_gaussian(b=10.0, domain=HALF_LINE):
    """``V(x) = x^2 exp(-x^2/b^2)``."""
    exp = cmath.exp
    inv = 1.0 / (b * b)
    return Potential(
        "modified_gaussian",
        lambda w: w * w * exp(-w * w * inv),
        lambda w: np.asarray(w, dtype=complex) ** 2 * np.exp(-np.asarray(w, dtype=complex) ** 2 * inv),
        params={"b": b},
        analytic_sector_alpha=math.pi / 2,
        domain_hint=domain,
        even=True,
    )


def rittby(J=1.6, domain=HALF_LINE):
    """``V(x) = (x^2 - J) exp(-0.1 x^2) + J``, tending to ``J`` at infinity."""
    exp = cmath.exp
    def vtilde(w):
        w = np.asarray(w, dtype=complex)
        return (w * w - J) * np.exp(-0.1 * w * w)

    return Potential(
        "rittby",
        lambda w: (w * w - J) * exp(-0.1 * w * w) + J,
        lambda w: vtilde(w) + J,
        params={"J": J},
        v_infinity=J,
        scalar_tilde=lambda w: (w * w - J) * exp(-0.1 * w * w),
        vector_tilde=vtilde,
        analytic_sector_alpha=math.pi / 2,
        domain_hint=domain,
        even=True,
    )


def perturbed_gaussian(eps, domain=HALF_LINE):
    """``V_eps(x) = -exp((1 - sqrt(1 + 2 eps x^2)) / eps)``; ``eps = 0`` is the Gaussian well."""
    if eps == 0:
        return gaussian_well(1.0, domain)
    exp, sqrt = cmath.exp, cmath.sqrt

    def scalar(w):
        q = 2.0 * eps * w * w
        # 1 - sqrt(1+q) == -q / (1 + sqrt(1+q)) without cancellation
        return -exp(-q / (1.0 + sqrt(1.0 + q)) / eps)

    def vector(w):
        q = 2.0 * eps * np.asarray(w, dtype=complex) ** 2
        return -np.exp(-q / (1.0 + np.sqrt(1.0 + q)) / eps)

    return Potential(
        "perturbed_gaussian",
        scalar,
        vector,
        params={"eps": eps},
        analytic_sector_alpha=math.pi,
        domain_hint=domain,
        even=True,
    )


def gaussian_quartic(domain=HALF_LINE):
    """``-(x^4/2) exp(-x^2)``: first-order term of :func:`perturbed_gaussian` in eps."""
    exp = cmath.exp
    return Potential(
        "gaussian_quartic",
        lambda w: -0.5 * w ** 4 * exp(-w * w),
        lambda w: -0.5 * np.asarray(w, dtype=complex) ** 4 * np.exp(-np.asarray(w, dtype=complex) ** 2),
        analytic_sector_alpha=math.pi / 2,
        domain_hint=domain,
        even=True,
    )


def square_well(depth=1.0, width=1.0, domain=HALF_LINE):
    """``V(x) = -depth`` on ``[0, width]`` and zero beyond (not analytic)."""

    def scalar(w):
        w = complex(w)
        return complex(-depth) if abs(w.real) <= width else 0j

    def vector(w):
        w = np.asarray(w)
        return np.where(np.abs(w.real) <= width, -depth, 0.0).astype(complex)

    return Potential(
        "square_well",
        scalar,
        vector,
        params={"depth": depth, "width": width},
        analytic=False,
        domain_hint=domain,
        support=width,
        breakpoints=(width,),
        even=True,
    )


def gaussian_sum(weights, rates, centers=None, domain=WHOLE_LINE):
    """``sum_i w_i exp(-s_i (x - c_i)^2)`` with possibly complex weights."""
    weights = tuple(complex(w) if complex(w).imag else float(complex(w).real) for w in weights)
    rates = tuple(float(s) for s in rates)
    if len(weights) != len(rates) or any(s <= 0 for s in rates):
        raise ValueError("need one positive rate per weight")
    centers = tuple(float(c) for c in (centers if centers is not None else [0.0] * len(weights)))
    terms = list(zip(weights, rates, centers))
    exp = cmath.exp

    def scalar(w):
        total = 0j
        for a, s, c in terms:
            d = w - c
            total += a * exp(-s * d * d)
        return total

    def vector(w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape, dtype=complex)
        for a, s, c in terms:
            out += a * np.exp(-s * (w - c) ** 2)
        return out

    centred = all(c == 0.0 for c in centers)
    return Potential(
        "gaussian_sum",
        scalar,
        vector,
        params={f"w{i}": abs(a) for i, a in enumerate(weights)},
        analytic_sector_alpha=math.pi / 2,
        domain_hint=domain,
        even=centred,
        real=all(isinstance(a, float) for a in weights),
        exp_sum=tuple((a, s, 2) for a, s, _ in terms) if centred else None,
    )


def exponential_sum(weights, rates, domain=HALF_LINE):
    """``sum_i w_i exp(-s_i |x|)``; analytic continuation uses ``exp(-s w)`` for Re w > 0."""
    terms = list(zip(tuple(float(w) for w in weights), tuple(float(s) for s in rates)))
    exp = cmath.exp

    def scalar(w):
        w = complex(w)
        if w.real < 0:
            w = -w
        return sum(a * exp(-s * w) for a, s in terms) + 0j

    def vector(w):
        w = np.asarray(w, dtype=complex)
        w = np.where(w.real < 0, -w, w)
        out = np.zeros(w.shape, dtype=complex)
        for a, s in terms:
            out += a * np.exp(-s * w)
        return out

    return Potential(
        "exponential_sum",
        scalar,
        vector,
        analytic_sector_alpha=math.pi * (1 - 1e-9),
        domain_hint=domain,
        even=True,
        exp_sum=tuple((a, s, 1) for a, s in terms),
    )


BUILTINS = {
    "zero": zero,
    "gaussian": gaussian_well,
    "modified_gaussian": modified_gaussian,
    "rittby": rittby,
    "perturbed_gaussian": perturbed_gaussian,
    "gaussian_quartic": gaussian_quartic,
    "square_well": square_well,
    "gaussian_sum": gaussian_sum,
    "exponential_sum": exponential_sum,
}


def builtin(name: str, **params) -> Potential:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin potential {name!r}; known: {sorted(BUILTINS)}") from None
    return factory(**params)


def parse_expression(
    src: str,
    params=None,
    *,
    v_infinity=0.0,
    analytic_sector_alpha=math.pi,
    domain=HALF_LINE,
) -> Potential:
    """Build a :class:`Potential` from expression text such as ``"-exp(-x^2)"``.

    Extra identifiers are resolved from *params*. Expressions containing
    ``abs`` are flagged non-analytic.
    """
    params = dict(params or {})
    tree = expression.parse(src, params)
    return Potential(
        name=str(tree),
        scalar=expression.compile_scalar(tree, params),
        vector=expression.compile_vector(tree, params),
        params=params,
        v_infinity=v_infinity,
        analytic_sector_alpha=analytic_sector_alpha,
        analytic=not expression.uses(tree, "call", "abs"),
        domain_hint=domain,
        tree=tree,
    )


# --------------------------------------------------------------------------
# norms and suprema


def _decay_cutoff(p, omega, target, cap, start=1.0, both_sides=False):
    """Smallest X (on a 1.25-geometric ladder) past which |V - V_inf| < target."""
    xs = [start]
    while xs[-1] < cap:
        xs.append(min(xs[-1] * 1.25, cap))
    xs = np.array(xs)
    pts = np.concatenate([xs * omega, -xs * omega]) if both_sides else xs * omega
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(p.shifted_vector(pts))
    vals = np.where(np.isfinite(vals), vals, np.inf)
    if both_sides:
        vals = np.maximum(vals[: len(xs)], vals[len(xs):])
    # require the bound to hold from here on along the ladder
    bad = np.nonzero(vals >= target)[0]
    if len(bad) == 0:
        return float(xs[0]), True
    idx = bad[-1] + 1
    if idx >= len(xs):
        return float(cap), False
    return float(xs[idx]), True


def l1_norm(p: Potential, tol: float = 1e-12, domain: str | None = None) -> float:
    """Adaptive-quadrature value of the integral of ``|V - V_inf|`` over the domain."""
    domain = domain or p.domain_hint
    vt = p.tilde_scalar()
    f = lambda x: abs(vt(x))  # noqa: E731
    if p.support is not None:
        hi = float(p.support)
        if hi == 0.0:
            return 0.0
    else:
        hi, _ = _decay_cutoff(p, 1.0, tol * 1e-3, 1e4, both_sides=domain == WHOLE_LINE)
    pieces = [(0.0, hi)]
    if domain == WHOLE_LINE:
        pieces.append((-hi, 0.0))
    total = 0.0
    budget = tol / (2 * len(pieces))
    for lo, up in pieces:
        inner = [b for b in p.breakpoints if lo < b < up] + [-b for b in p.breakpoints if lo < -b < up]
        val, err = integrate.quad(f, lo, up, points=inner or None, epsabs=budget, epsrel=0.0, limit=1000)
        if not err <= budget:
            raise NonConvergenceError(f"l1_norm: quadrature error {err:.2e} exceeds {budget:.2e}")
        total += val
    if p.support is None:
        for lo, up in [(hi, np.inf)] + ([(-np.inf, -hi)] if domain == WHOLE_LINE else []):
            val, err = integrate.quad(f, lo, up, epsabs=budget, epsrel=0.0, limit=200)
            if not err <= budget:
                raise NonConvergenceError(f"l1_norm: tail quadrature error {err:.2e}")
            total += val
    return float(total)


def _ray_sup(p, theta, tol, fn, limit_value, x_cap, n_grid, domain):
    if not 0.0 <= theta <= p.analytic_sector_alpha + 1e-12:
        raise DomainError(f"theta={theta} outside [0, {p.analytic_sector_alpha}]")
    if theta != 0.0 and not p.analytic:
        raise NonAnalyticError(f"{p.name} cannot be continued off the real axis")
    omega = cmath.exp(0.5j * theta)
    whole = domain == WHOLE_LINE
    if p.support is not None:
        X, decayed = max(float(p.support), 1e-9), True
    else:
        X, decayed = _decay_cutoff(p, omega, tol / 10, x_cap, both_sides=whole)

    def values(v):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(p.vector(np.asarray(v) * omega))

    n = max(n_grid, int(200 * X))
    v = np.linspace(-X if whole else 0.0, X, 2 * n + 1 if whole else n + 1)
    if p.breakpoints:
        bps = np.array([b for b in p.breakpoints] + [-b for b in p.breakpoints if whole])
        v = np.unique(np.concatenate([v, bps, np.nextafter(bps, np.inf), np.nextafter(bps, -np.inf)]))
    vals = values(v)
    if not np.all(np.isfinite(vals)):
        raise UnboundedError(f"V overflows along the ray theta={theta:.4g}")
    # no decay up to the cap: the tail quarter must not dominate the rest
    tail = np.abs(v) >= 0.75 * X
    head_max = vals[~tail].max() if np.any(~tail) else -np.inf
    tail_max = vals[tail].max()
    if not decayed and tail_max > head_max + max(tol, 1e-6 * abs(head_max)):
        raise UnboundedError(
            f"sup along the ray theta={theta:.4g} keeps growing up to v={X:.4g} ({tail_max:.4g})"
        )
    best = float(vals.max())
    # local refinement around the leading grid maxima
    order = np.argsort(vals)[::-1][:8]
    dv = v[1] - v[0] if len(v) > 1 else 1.0
    for i in order:
        lo, hi = v[max(i - 1, 0)], v[min(i + 1, len(v) - 1)]
        if hi <= lo:
            continue
        res = optimize.minimize_scalar(
            lambda t: -float(values(np.array([t]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": min(tol, dv * 1e-6) + 1e-14},
        )
        best = max(best, -float(res.fun))
    if limit_value is not None:
        best = max(best, limit_value)
    return best


def ray_sup_a(p: Potential, theta: float, tol: float = 1e-10, *, x_cap=500.0, n_grid=20000, domain=None) -> float:
    """``sup_v Im(exp(i theta) V(exp(i theta/2) v))`` including the value at infinity."""
    rot = cmath.exp(1j * theta)
    return _ray_sup(
        p,
        theta,
        tol,
        lambda vals: (rot * vals).imag,
        (rot * p.v_infinity).imag,
        x_cap,
        n_grid,
        domain or p.domain_hint,
    )


def sup_norm_rotated(p: Potential, theta: float, tol: float = 1e-10, *, x_cap=500.0, n_grid=20000, domain=None) -> float:
    """``sup_v |V(exp(i theta/2) v)|``."""
    return _ray_sup(p, theta, tol, np.abs, abs(p.v_infinity), x_cap, n_grid, domain or p.domain_hint)
