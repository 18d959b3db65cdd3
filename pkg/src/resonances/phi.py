"""The entire function phi(z) of a whole-line problem.

The solution with ``f ~ exp(z x)`` as ``x -> -inf`` is written as
``f = exp(z x) f~``. Then ``f~' = p`` and ``p' = V f~ - 2 z p`` with
``f~ = 1, p = 0`` at the left end, and

    phi(z) = lim 2 z f~(x) = 2 z f~(X) + p(X)      (V = 0 beyond X).

Expanding ``f = C1 sinh(z x)/z + C2 cosh(z x)`` gives ``phi = C1 + z C2`` at
``+inf``. Zeros with ``Re z > 0`` are eigenvalues ``lambda = -z^2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import locator
from .errors import DecayViolationError, DomainError, UnboundedError
from .ode import integrate
from .potentials import WHOLE_LINE, _decay_cutoff

OVERFLOW_EXPONENT = 600.0


@dataclass(frozen=True)
class PhiEvaluation:
    z: complex
    C1_inf: complex
    C2_inf: complex
    phi: complex
    f_tilde_sup: float
    xmax: float = math.nan


def _check(prob):
    if prob.domain != WHOLE_LINE:
        raise DomainError("phi is defined for whole-line problems")


def cutoff(prob):
    """Symmetric truncation ``X`` with ``|V(x)| <= tol_decay`` for ``|x| >= X``."""
    p = prob.potential
    if p.support is not None:
        return max(float(p.support), 1e-12)
    X, ok = _decay_cutoff(p, 1.0, prob.tol_decay, prob.xmax_cap, both_sides=True)
    if not ok:
        raise DecayViolationError(
            f"|V| does not fall below {prob.tol_decay:g} for |x| <= {prob.xmax_cap:g}"
        )
    return X


def phi(prob, z, tol=None, *, xmax=None) -> PhiEvaluation:
    """Evaluate phi at *z* (``Re z > 0``) by integrating over ``[-X, X]``."""
    _check(prob)
    z = complex(z)
    if z.real <= 0:
        raise DomainError("phi requires Re z > 0")
    tol = prob.tol if tol is None else tol
    X = cutoff(prob) if xmax is None else float(xmax)
    if 2 * z.real * X > OVERFLOW_EXPONENT:
        raise UnboundedError(f"exp(2 z X) overflows (Re z = {z.real:.4g}, X = {X:.4g})")
    vt = prob.potential.tilde_scalar()
    two_z = 2 * z
    exp = cmath.exp

    def rhs(x, y):
        v = vt(x)
        vf = v * y[0]
        # q tracks int V f~ exp(2 z t), used only to split phi into C1 and C2
        return [y[1], vf - two_z * y[1], vf * exp(two_z * x)]

    bps = tuple(b for b in prob.potential.breakpoints if -X < b < X)
    traj = integrate(rhs, (-X, X), [1.0, 0.0, 0.0], tol, breakpoints=bps)
    ft, p, q = traj.y_end
    value = two_z * ft + p
    # C1 = (q + p + 2 z f~)/2 with q = exp(2zX) p; C1 and z C2 can each be
    # huge and nearly cancel, so phi is formed from (f~, p) and C2 from phi
    C1 = 0.5 * (q + p + two_z * ft)
    C2 = (value - C1) / z
    nodes = traj.breakpoints
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    samples = np.abs(traj(np.concatenate([nodes, mids]))[:, 0])
    sup = float(np.max(samples))
    if not math.isfinite(sup):
        raise UnboundedError(f"f~ overflowed at z={z}")
    return PhiEvaluation(z, C1, C2, value, sup, X)


def phi_value(prob, tol=None):
    """``z -> phi(z)`` as a plain callable (for the locator)."""
    return lambda z: phi(prob, z, tol).phi


def count_zeros(prob, rectangle, tol=None) -> int:
    """Winding number of phi around ``(re_min, re_max, im_min, im_max)``.

    Raises :class:`ZeroOnContourError` when a zero sits on the contour; the
    caller should perturb the rectangle.
    """
    _check(prob)
    x0, x1, y0, y1 = map(float, rectangle)
    if x0 <= 0:
        raise DomainError("rectangle must lie in Re z > 0")
    tol = prob.tol if tol is None else tol
    return locator.winding_number(phi_value(prob, tol), locator._rect_vertices((x0, x1, y0, y1)), min_len=10 * tol)


def half_annulus(r_inner, r_outer, re_min, n_arc=64):
    """Vertices of a polygon enclosing ``{r_inner < |z| < r_outer, Re z > re_min}``.

    Arc vertices are pushed outward (inner arc inward) by the chord sagitta so
    the polygon contains the curved region.
    """
    if not 0 < re_min < r_inner < r_outer:
        raise ValueError("need 0 < re_min < r_inner < r_outer")
    def arc(r, n, outward):
        t_max = math.acos(re_min / r)
        t = np.linspace(-t_max, t_max, n + 1)
        grow = 1.0 / math.cos(t_max / n) if outward else 1.0
        pts = r * grow * np.exp(1j * t)
        pts[0], pts[-1] = complex(re_min, -r * math.sin(t_max)), complex(re_min, r * math.sin(t_max))
        return list(pts)

    outer = arc(r_outer, n_arc, True)
    inner = arc(r_inner, max(8, n_arc // 2), False)[::-1]
    return outer + inner


def count_zeros_polygon(prob, vertices, tol=None, *, n_min=16) -> int:
    """Winding number of phi along a closed polygon in ``Re z > 0``.

    *n_min* is the number of starting samples per edge; polygons with many
    short edges can use fewer.
    """
    _check(prob)
    if min(v.real for v in vertices) <= 0:
        raise DomainError("contour must lie in Re z > 0")
    tol = prob.tol if tol is None else tol
    return locator.winding_number(phi_value(prob, tol), list(vertices), n_min=n_min, min_len=10 * tol)


def eigenvalues(prob, rectangle, *, depth=8, tol=None, tol_res=None):
    """Zeros of phi in *rectangle*, refined, as :class:`locator.Resonance` records."""
    _check(prob)
    tol = prob.tol if tol is None else tol
    fn = phi_value(prob, tol)
    x0, x1, y0, y1 = map(float, rectangle)
    leaf = 1e-2 * max(1.0, abs(complex(x1 - x0, y1 - y0)))
    report = locator.scan(fn, rectangle, depth=depth, tol=10 * tol, leaf_size=leaf)
    out = []
    kw = dict(method="phi", lam_of=prob.lam)
    if tol_res is not None:
        kw["tol_res"] = tol_res
    for c in report.candidates:
        out.append(locator.refine(fn, c, **kw))
    for rect, w in report.clusters:
        if w == 2:
            c = complex(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3]))
            out.extend(locator.deflate_pair(fn, c, 0.5 * abs(complex(rect[1] - rect[0], rect[3] - rect[2])), **kw))
    return out
