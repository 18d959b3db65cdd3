"""Enclosure regions for eigenvalues and resonances.

* numerical-range sets ``e^{-i theta} R+ + B(0, c(theta))`` with
  ``c(theta) = sup |V(e^{i theta/2} v)|``;
* half-plane families ``x sin(theta) + y cos(theta) <= a(theta)`` with
  ``a(theta) = sup Im(e^{i theta} V(e^{i theta/2} v))``; for resonances
  their intersection ``S`` has boundary
  ``x = a sin + a' cos``, ``y = a cos - a' sin``;
* sector-plus-ball sets from user-supplied relative bounds (gamma, beta);
* norm bounds ``|lambda| <= ||V||_1^2 / 4`` and ``(9/4) ||V||_1^2`` on the whole line;
* thresholds ``Re lambda <= gamma``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DerivativeNoiseError, DomainError, UnboundedError, UnsupportedProblemError
from .potentials import WHOLE_LINE, _decay_cutoff, l1_norm, ray_sup_a, sup_norm_rotated


@dataclass(frozen=True)
class RegionBound:
    """Sampled data of one enclosure.

    ``provenance`` is one of ``thm1`` (c table), ``thm2`` (a table),
    ``thm3`` (gamma/beta pairs), ``thm4``/``thm5`` (a radius),
    ``thm6-envelope`` (a table for resonances) or ``threshold``.
    """

    provenance: str
    data: tuple
    theta_grid: tuple = ()

    def contains(self, lam, tol=1e-10):
        lam = complex(lam)
        if self.provenance == "thm1":
            return all(_dist_to_ray(lam, t) <= c + tol for t, c in zip(self.theta_grid, self.data))
        if self.provenance in ("thm2", "thm6-envelope"):
            return half_plane_margin(self, lam) >= -tol
        if self.provenance == "thm3":
            return _thm3_member(self.data, lam, tol)
        if self.provenance in ("thm4", "thm5"):
            return abs(lam) <= self.data[0] + tol
        if self.provenance == "threshold":
            return lam.real <= self.data[0] + tol
        raise ValueError(self.provenance)


def theta_grid(alpha, n, include_end=True):
    k = np.arange(n + 1 if include_end else n)
    return tuple(float(t) for t in alpha * k / n)


def _dist_to_ray(lam, theta):
    """Distance from *lam* to the ray ``e^{-i theta} R+``."""
    mu = lam * cmath.exp(1j * theta)
    return abs(mu.imag) if mu.real >= 0 else abs(mu)


def _in_excluded_sector(lam, alpha):
    if lam == 0:
        return False
    arg = cmath.phase(lam)
    return -alpha <= arg <= 0.0


# --------------------------------------------------------------------------
# enclosure regions


def c_table(p, n_theta=32, tol=1e-10):
    grid = theta_grid(p.analytic_sector_alpha, n_theta)
    vals, kept = [], []
    for t in grid:
        try:
            vals.append(sup_norm_rotated(p, t, tol))
            kept.append(t)
        except UnboundedError:
            continue
    return RegionBound("thm1", tuple(vals), tuple(kept))


def a_table(p, n_theta=32, tol=1e-10, *, provenance="thm2", include_end=True):
    grid = theta_grid(p.analytic_sector_alpha, n_theta, include_end)
    vals = []
    kept = []
    for t in grid:
        try:
            vals.append(ray_sup_a(p, t, tol))
            kept.append(t)
        except UnboundedError:
            # a(theta) = +inf imposes no constraint
            continue
    return RegionBound(provenance, tuple(vals), tuple(kept))


def region_thm1(p, lam, tol=1e-10, *, n_theta=32, bound=None) -> bool:
    """``lam`` in the intersection of ``e^{-i theta} R+ + B(0, c(theta))`` over the theta grid.

    Eigenvalues with ``-alpha <= arg(lam) <= 0`` are outside the scope of
    the bound and raise :class:`DomainError`.
    """
    lam = complex(lam)
    if _in_excluded_sector(lam, p.analytic_sector_alpha):
        raise DomainError("lambda lies in the sector -alpha <= arg <= 0 where the bound does not apply")
    bound = bound or c_table(p, n_theta, tol)
    return bound.contains(lam, tol)


def half_plane_margin(bound, lam):
    """``min_theta a(theta) - (x sin(theta) + y cos(theta))`` (negative means outside)."""
    lam = complex(lam)
    t = np.asarray(bound.theta_grid)
    a = np.asarray(bound.data)
    if len(t) == 0:
        return math.inf
    return float(np.min(a - (lam.real * np.sin(t) + lam.imag * np.cos(t))))


def region_thm2(p, lam, tol=1e-10, *, n_theta=32, bound=None) -> bool:
    """Half-plane test ``x sin(theta) + y cos(theta) <= a(theta)`` for ``Im lam > 0``."""
    lam = complex(lam)
    if lam.imag <= 0:
        raise DomainError("the half-plane family applies to eigenvalues with Im lambda > 0")
    bound = bound or a_table(p, n_theta, tol)
    return bound.contains(lam, tol)


def _dist_to_sector(mu, psi):
    """Distance from *mu* to ``{|arg| <= psi}`` (``0 <= psi < pi/2``)."""
    if mu == 0:
        return 0.0
    arg = cmath.phase(mu)
    if abs(arg) <= psi:
        return 0.0
    diff = abs(arg) - psi
    return abs(mu) * math.sin(diff) if diff < math.pi / 2 else abs(mu)


def _thm3_member(params, lam, tol):
    for theta, gamma, beta in params:
        mu = lam * cmath.exp(1j * theta)
        if _dist_to_sector(mu, math.asin(gamma)) > beta + tol:
            return False
    return True


def region_thm3(params, lam, tol=1e-10) -> bool:
    """Membership in the intersection of ``C_theta + B(0, beta)`` for supplied ``(theta, gamma, beta)``."""
    params = tuple((float(t), float(g), float(b)) for t, g, b in params)
    for _, g, b in params:
        if not 0.0 <= g < 1.0 or b < 0:
            raise ValueError("need 0 <= gamma < 1 and beta >= 0")
    return _thm3_member(params, complex(lam), tol)


# --------------------------------------------------------------------------
# resonance envelope


@dataclass(frozen=True)
class EnvelopePolyline:
    """Boundary samples ``(theta, a, x, y)`` of ``S`` and the tip coefficients."""

    samples: tuple
    a1: float
    a2: float
    M: float
    bound: RegionBound = None
    tip: tuple | None = None  # (a1, a2) when a tip parabola is meaningful

    @property
    def theta(self):
        return np.array([s[0] for s in self.samples])

    @property
    def a(self):
        return np.array([s[1] for s in self.samples])

    @property
    def x(self):
        return np.array([s[2] for s in self.samples])

    @property
    def y(self):
        return np.array([s[3] for s in self.samples])

    def margin(self, lam):
        return half_plane_margin(self.bound, lam)

    def contains(self, lam, tol=1e-10):
        return self.margin(lam) >= -tol

    def tip_parabola(self, x):
        """``y = -(x - a1)^2 / (4 a2)``; only defined when ``a2 > 0``."""
        if self.tip is None:
            raise ValueError("no tip parabola: a2 is not positive")
        a1, a2 = self.tip
        return -((np.asarray(x) - a1) ** 2) / (4 * a2)


def _real_domain_max(p, fn, tol, whole):
    """Global max of ``fn(x)`` over the real domain (grid plus bounded Brent)."""
    if p.support is not None:
        X = max(float(p.support), 1e-9)
    else:
        X, _ = _decay_cutoff(p, 1.0, tol / 10, 1e4, both_sides=whole)
    x = np.linspace(-X if whole else 0.0, X, 40001)
    vals = fn(x)
    best = float(np.max(vals))
    dx = x[1] - x[0]
    for i in np.argsort(vals)[::-1][:6]:
        lo, hi = max(x[i] - dx, x[0]), min(x[i] + dx, x[-1])
        res = optimize.minimize_scalar(lambda t: -float(fn(np.array([t]))[0]), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def a1_coefficient(p, tol=1e-10, domain=None):
    """``max {V(x) + x V'(x)/2}`` over the real domain, ``V'`` by Richardson central differences."""
    whole = (domain or p.domain_hint) == WHOLE_LINE

    def g(x):
        x = np.asarray(x, dtype=float)
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        d1 = (p.vector(x + h) - p.vector(x - h)) / (2 * h)
        d2 = (p.vector(x + h / 2) - p.vector(x - h / 2)) / h
        dv = (4 * d2 - d1) / 3
        return np.real(p.vector(x) + 0.5 * x * dv)

    return _real_domain_max(p, g, tol, whole)


def max_potential(p, tol=1e-10, domain=None):
    """``M = max V`` over the real domain (including the limit at infinity)."""
    whole = (domain or p.domain_hint) == WHOLE_LINE
    return max(_real_domain_max(p, lambda x: np.real(p.vector(np.asarray(x, dtype=float))), tol, whole),
               float(np.real(p.v_infinity)))


def _a_prime(p, theta, h, tol, alpha):
    if theta - h < 0:
        # one-sided second-order difference at the left end
        f0, f1, f2 = (ray_sup_a(p, theta + k * h, tol) for k in range(3))
        return (-3 * f0 + 4 * f1 - f2) / (2 * h)
    if theta + h > alpha:
        f0, f1, f2 = (ray_sup_a(p, theta - k * h, tol) for k in range(3))
        return (3 * f0 - 4 * f1 + f2) / (2 * h)
    return (ray_sup_a(p, theta + h, tol) - ray_sup_a(p, theta - h, tol)) / (2 * h)


def fit_a2(p, a1, tol=1e-10, theta_max=0.1, n=20):
    """Least-squares ``a2`` from ``a(theta) - a1 theta ~ a2 theta^2`` on ``(0, theta_max]``."""
    th = np.linspace(theta_max / n, theta_max, n)
    r = np.array([ray_sup_a(p, t, tol) for t in th]) - a1 * th
    # allow an O(theta^3) term so a2 is not biased by the next order
    A = np.column_stack([th**2, th**3])
    coef, *_ = np.linalg.lstsq(A, r, rcond=None)
    return float(coef[0])


def check_convex(theta, a, tol):
    """Raise :class:`DerivativeNoiseError` if the samples are not convex within *tol*."""
    t, a = np.asarray(theta), np.asarray(a)
    for i in range(1, len(t) - 1):
        w = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1])
        interp = (1 - w) * a[i - 1] + w * a[i + 1]
        if a[i] > interp + tol * max(1.0, abs(a[i])):
            raise DerivativeNoiseError(
                f"a(theta) is not convex at theta={t[i]:.6g}: {a[i]:.12g} > {interp:.12g}"
            )


def envelope_S(p, n=64, tol=1e-10, *, theta_max=None) -> EnvelopePolyline:
    """Boundary of ``S`` sampled at ``theta_k = theta_max k / n``, ``k < n``.

    ``theta_max`` defaults to the sector angle. ``a'`` uses central
    differences with step ``h = tol^(1/3)`` (one-sided at the ends).
    """
    alpha = p.analytic_sector_alpha
    theta_max = alpha if theta_max is None else min(theta_max, alpha)
    grid = [theta_max * k / n for k in range(n)]
    h = max(tol, 1e-15) ** (1 / 3)
    a_vals = []
    kept = []
    for t in grid:
        try:
            a_vals.append(ray_sup_a(p, t, tol))
            kept.append(t)
        except UnboundedError:
            break
    check_convex(kept, a_vals, 1e3 * tol + 1e-9)
    samples = []
    for t, a in zip(kept, a_vals):
        try:
            ap = _a_prime(p, t, h, tol, alpha)
        except UnboundedError:
            break
        s, c = math.sin(t), math.cos(t)
        samples.append((t, a, a * s + ap * c, a * c - ap * s))
    bound = RegionBound("thm6-envelope", tuple(a_vals), tuple(kept))
    if not p.real:
        raise UnsupportedProblemError("the resonance envelope needs a real potential")
    a1 = a1_coefficient(p, tol)
    M = max_potential(p, tol)
    a2 = fit_a2(p, a1, tol, theta_max=min(0.1, theta_max))
    # a2 is at noise level when the envelope is flat at the tip
    tip = (a1, a2) if a2 > 1e-6 * max(1.0, abs(a1)) else None
    return EnvelopePolyline(tuple(samples), a1, a2, M, bound, tip)


def polyline_convex(xs, ys, tol=1e-9):
    """True when consecutive turns of the polyline all have the same orientation."""
    x, y = np.asarray(xs), np.asarray(ys)
    if len(x) < 3:
        return True
    dx1, dy1 = np.diff(x)[:-1], np.diff(y)[:-1]
    dx2, dy2 = np.diff(x)[1:], np.diff(y)[1:]
    cross = dx1 * dy2 - dy1 * dx2
    scale = tol * max(1.0, float(np.max(np.hypot(x, y)))) ** 2
    return bool(np.all(cross >= -scale) or np.all(cross <= scale))


# --------------------------------------------------------------------------
# thresholds and norm bounds


@dataclass(frozen=True)
class ThresholdReport:
    """``value`` is the smallest finite threshold among ``routes`` (``None`` if none)."""

    value: float | None
    provenance: str | None
    routes: dict = field(default_factory=dict)

    def __float__(self):
        return math.inf if self.value is None else float(self.value)

    @property
    def finite(self):
        return self.value is not None


def threshold(p, tol=1e-10) -> ThresholdReport:
    """Thresholds ``Re lambda <= gamma`` from ``a(pi/2)`` and from exponential-sum weights."""
    routes = {}
    if p.analytic and p.analytic_sector_alpha >= math.pi / 2 - 1e-12:
        try:
            routes["a(pi/2)"] = ray_sup_a(p, math.pi / 2, tol)
        except UnboundedError:
            routes["a(pi/2)"] = None
    if p.exp_sum is not None and np.real(p.v_infinity) == 0:
        routes["measure"] = float(sum(abs(w) for w, _, r in p.exp_sum if r in (1, 2)))
    finite = {k: v for k, v in routes.items() if v is not None}
    if not finite:
        return ThresholdReport(None, None, routes)
    key = min(finite, key=finite.get)
    return ThresholdReport(finite[key], key, routes)


@dataclass(frozen=True)
class NormBoundCheck:
    thm4: bool | None
    thm5: bool
    norm: float
    bound4: float
    bound5: float


def check_norm_bounds(p, lam, *, tol=1e-9, norm=None, domain=None) -> NormBoundCheck:
    """``|lam| <= ||V||_1^2/4`` and ``|lam| <= (9/4) ||V||_1^2`` for whole-line problems.

    The first verdict is ``None`` for ``lam`` on the positive real axis.
    """
    domain = domain or p.domain_hint
    if domain != WHOLE_LINE:
        raise UnsupportedProblemError("norm bounds are only available with whole-line constants")
    lam = complex(lam)
    n1 = l1_norm(p, domain=WHOLE_LINE) if norm is None else float(norm)
    b4, b5 = n1 * n1 / 4, 9 * n1 * n1 / 4
    slack = tol * max(1.0, b5)
    on_pos_axis = lam.imag == 0 and lam.real > 0
    thm4 = None if on_pos_axis else abs(lam) <= b4 + slack
    return NormBoundCheck(thm4, abs(lam) <= b5 + slack, n1, b4, b5)
