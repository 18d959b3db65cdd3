"""Complex root finding for residual functions: Muller refinement,
argument-principle scanning, and resolution of close root pairs."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CollapseError, EscapeError, NonConvergenceError, ZeroOnContourError

DEFAULT_TOL = 1e-10
DEFAULT_TOL_RES = 1e-9


@dataclass
class Resonance:
    """A located zero ``z`` of a residual, with ``lam = V_inf - z^2``."""

    lam: complex
    z: complex
    residual_abs: float
    method: str = ""
    iterations: int = 0
    refinement_history: list = field(default_factory=list)
    status: str = "ok"

    @property
    def lambda_(self):
        return self.lam


def _default_lam(z):
    return -z * z


def refine(
    residual_fn: Callable[[complex], complex],
    z_guess: complex,
    tol: float = DEFAULT_TOL,
    max_iter: int = 60,
    *,
    tol_res: float = DEFAULT_TOL_RES,
    method: str = "",
    lam_of: Callable = _default_lam,
    step: float | None = None,
    right_half_plane: bool = True,
) -> Resonance:
    """Muller iteration from *z_guess* (complex-secant fallback).

    Converged when ``|dz| <= tol (1 + |z|)`` and ``|r(z)| <= tol_res``.
    Raises :class:`EscapeError` if an iterate leaves ``Re z > 0`` and
    :class:`NonConvergenceError` after *max_iter* iterations.
    """
    z2 = complex(z_guess)
    if right_half_plane and z2.real <= 0:
        raise EscapeError(f"initial guess {z2} is not in Re z > 0")
    d = step if step is not None else 1e-3 * (1.0 + abs(z2))
    if right_half_plane:
        d = min(d, 0.5 * z2.real)
    zs = [z2 - d, z2 + 1j * d, z2]
    ws = [complex(residual_fn(z)) for z in zs]
    history = [(z, abs(w)) for z, w in zip(zs, ws)]
    if ws[2] == 0:
        return Resonance(lam_of(z2), z2, 0.0, method, 0, history)
    for it in range(1, max_iter + 1):
        z0, z1, z2 = zs
        w0, w1, w2 = ws
        h1, h2 = z1 - z0, z2 - z1
        dz = None
        try:
            d1, d2 = (w1 - w0) / h1, (w2 - w1) / h2
            a = (d2 - d1) / (h2 + h1)
            b = a * h2 + d2
            disc = cmath.sqrt(b * b - 4 * a * w2)
            den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
            if den != 0 and math.isfinite(abs(den)):
                dz = -2 * w2 / den
        except ZeroDivisionError:
            dz = None
        if dz is None or not math.isfinite(abs(dz)):
            # secant on the last two points
            if w2 == w1:
                raise NonConvergenceError("residual is flat; cannot continue", history)
            dz = -w2 * (z2 - z1) / (w2 - w1)
        z3 = z2 + dz
        if right_half_plane and z3.real <= 0:
            raise EscapeError(f"iterate {z3} left the half-plane Re z > 0", history)
        w3 = complex(residual_fn(z3))
        history.append((z3, abs(w3)))
        zs, ws = [z1, z2, z3], [w1, w2, w3]
        if abs(dz) <= tol * (1.0 + abs(z3)) and abs(w3) <= tol_res:
            return Resonance(lam_of(z3), z3, abs(w3), method, it, history)
        if w3 == 0:
            return Resonance(lam_of(z3), z3, 0.0, method, it, history)
    raise NonConvergenceError(
        f"no convergence after {max_iter} iterations (last z={zs[-1]}, |r|={abs(ws[-1]):.3e})", history
    )


# --------------------------------------------------------------------------
# argument principle


def _rect_vertices(rect):
    x0, x1, y0, y1 = rect
    return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]


class _Cached:
    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, z):
        key = (round(z.real, 15), round(z.imag, 15))
        try:
            return self.cache[key]
        except KeyError:
            v = complex(self.fn(z))
            self.cache[key] = v
            return v


def _segment_phase(fn, za, zb, fa, fb, max_dphase, min_len, depth=0):
    if fb == 0 or fa == 0:
        raise ZeroOnContourError(f"residual vanishes on the contour near {za if fa == 0 else zb}")
    dph = cmath.phase(fb / fa)
    if abs(dph) <= max_dphase:
        return dph
    if abs(zb - za) <= min_len or depth > 60:
        raise ZeroOnContourError(f"phase jump {dph:.3f} unresolved near {(za + zb) / 2}: zero on or near the contour")
    zm = 0.5 * (za + zb)
    fm = fn(zm)
    return _segment_phase(fn, za, zm, fa, fm, max_dphase, min_len, depth + 1) + _segment_phase(
        fn, zm, zb, fm, fb, max_dphase, min_len, depth + 1
    )


def winding_number(fn, vertices, *, n_min=16, max_dphase=math.pi / 4, min_len=1e-9, return_total=False):
    """Winding number of ``fn`` along the closed polygon through *vertices*.

    Each edge starts with *n_min* samples; an interval is bisected until the
    phase increment across it is at most *max_dphase*. Bisection below
    *min_len* means a zero sits on (or within ~min_len of) the contour.
    """
    fn = fn if isinstance(fn, _Cached) else _Cached(fn)
    total = 0.0
    verts = list(vertices)
    for za, zb in zip(verts, verts[1:] + verts[:1]):
        pts = [za + (zb - za) * k / n_min for k in range(n_min + 1)]
        vals = [fn(p) for p in pts]
        scale = max(1.0, abs(zb - za))
        for (p, q), (fp, fq) in zip(zip(pts, pts[1:]), zip(vals, vals[1:])):
            total += _segment_phase(fn, p, q, fp, fq, max_dphase, min_len * scale)
    w = total / (2 * math.pi)
    n = int(round(w))
    if abs(w - n) > 1e-6:
        raise ZeroOnContourError(f"non-integer winding {w:.6f}")
    return (n, total) if return_total else n


@dataclass
class ScanReport:
    rectangle: tuple
    winding: int
    subdivisions: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    clusters: list = field(default_factory=list)
    evaluations: int = 0


def _jitter(rect, k):
    x0, x1, y0, y1 = rect
    dx, dy = (x1 - x0), (y1 - y0)
    e = 1e-3 * (k + 1) * (1 + 0.37 * k)
    return (x0 - e * dx * 0.71, x1 + e * dx * 0.53, y0 - e * dy * 0.61, y1 + e * dy * 0.43)


def _winding_jittered(fn, rect, retries=3, **kw):
    for k in range(retries + 1):
        r = rect if k == 0 else _jitter(rect, k - 1)
        try:
            return winding_number(fn, _rect_vertices(r), **kw), r
        except ZeroOnContourError:
            if k == retries:
                raise
    raise AssertionError("unreachable")


def scan(residual_fn, rectangle, depth: int = 6, tol: float = 1e-9, *, n_min=16, retries=3, leaf_size=None) -> ScanReport:
    """Winding-number subdivision of *rectangle* ``(re_min, re_max, im_min, im_max)``.

    Rectangles are quartered while their winding exceeds 1 and depth remains.
    Leaves with winding 1 yield a candidate (the leaf centre); leaves still
    at winding >= 2 are reported as clusters. With *leaf_size*, winding-1
    rectangles keep being quartered until their diagonal is below it, so the
    candidate is a good starting point. A zero on a contour triggers up to
    *retries* small enlargements of that rectangle.
    """
    fn = _Cached(residual_fn)
    kw = dict(n_min=n_min, min_len=tol)
    total, rect = _winding_jittered(fn, tuple(map(float, rectangle)), retries, **kw)
    report = ScanReport(rect, total)

    def visit(r, w, level):
        report.subdivisions.append((r, w))
        if w == 0:
            return
        big = leaf_size is not None and abs(complex(r[1] - r[0], r[3] - r[2])) > leaf_size
        if (w == 1 and (not big or level >= depth + 24)) or (w > 1 and level >= depth):
            cz = complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3]))
            if w == 1:
                report.candidates.append(cz)
            else:
                report.clusters.append((r, w))
            return
        x0, x1, y0, y1 = r
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        # a small offset keeps the dividing lines away from zeros sitting on the midlines
        xm += 0.0123 * (x1 - x0)
        ym += 0.0171 * (y1 - y0)
        kids = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
        ws = [winding_number(fn, _rect_vertices(k), **kw) for k in kids]
        if sum(ws) != w:
            raise ZeroOnContourError(f"winding additivity failed on {r}: {w} != {ws}")
        for k, wk in zip(kids, ws):
            visit(k, wk, level + 1)

    visit(rect, total, 0)
    report.evaluations = len(fn.cache)
    return report


# --------------------------------------------------------------------------
# close pairs


def deflate_pair(residual_fn, cluster_center, radius, tol: float = DEFAULT_TOL, *, tol_res=DEFAULT_TOL_RES, n_fit=16,
                 method="", lam_of=_default_lam, rounds=4):
    """Resolve two zeros inside the disc ``|z - center| < radius``.

    A degree-4 least-squares model of the residual on a circle of radius
    ``radius/2`` seeds both roots; each is then refined against
    ``r(z) / (z - z_other)`` alternately. Raises :class:`CollapseError`
    when the refined roots coincide.
    """
    c = complex(cluster_center)
    ang = 2 * np.pi * np.arange(n_fit) / n_fit
    pts = c + 0.5 * radius * np.exp(1j * ang)
    vals = np.array([complex(residual_fn(p)) for p in pts])
    t = (pts - c) / radius
    V = np.vander(t, 5, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    roots = np.roots(coef[::-1])
    roots = sorted(roots, key=abs)[:2]
    z1, z2 = (c + radius * complex(r) for r in roots)
    if abs(z1 - z2) < 1e-3 * radius:
        z1, z2 = z1 - 0.05 * radius, z2 + 0.05 * radius
    kw = dict(tol=tol, tol_res=math.inf, method=method, lam_of=lam_of, step=0.02 * radius)
    for _ in range(rounds):
        r1 = refine(lambda z: residual_fn(z) / (z - z2), z1, **kw)
        r2 = refine(lambda z: residual_fn(z) / (z - r1.z), z2, **kw)
        moved = abs(r1.z - z1) + abs(r2.z - z2)
        z1, z2 = r1.z, r2.z
        if moved <= tol * (1 + abs(c)):
            break
    sep = abs(z1 - z2)
    if sep <= max(tol * (1 + abs(c)), 1e-6 * radius):
        raise CollapseError(f"the two roots coincide (|z1 - z2| = {sep:.3e})")
    out = []
    for z, r in ((z1, r1), (z2, r2)):
        res = abs(complex(residual_fn(z)))
        status = "ok" if res <= tol_res else "unconverged"
        out.append(Resonance(lam_of(z), z, res, method, r.iterations, r.refinement_history, status))
    return tuple(out)


def ladder(residual_for, seeds, count, *, tol=DEFAULT_TOL, tol_res=DEFAULT_TOL_RES, lam_of=_default_lam,
           z_of=None, method=""):
    """Follow a sequence of resonances whose ``lambda`` values are nearly equally spaced.

    ``residual_for(n)`` returns the residual for entry ``n`` (0-based) and
    *seeds* gives rough ``lambda`` values for the first two entries; later
    guesses are extrapolated linearly from the two previous results.
    Entries that fail are reported with status ``"failed"`` and the
    extrapolation continues from the guess.
    """
    z_of = z_of or (lambda lam: cmath.sqrt(-lam))
    found = []
    lams = []
    for n in range(count):
        if n < len(seeds):
            guess = complex(seeds[n])
        else:
            guess = 2 * lams[-1] - lams[-2]
        try:
            res = refine(residual_for(n), z_of(guess), tol, tol_res=tol_res, lam_of=lam_of, method=method)
            lams.append(res.lam)
        except (NonConvergenceError, ZeroOnContourError) as exc:
            z = z_of(guess)
            res = Resonance(guess, z, math.inf, method, 0, getattr(exc, "history", []), "failed")
            lams.append(guess)
        found.append(res)
    return found
