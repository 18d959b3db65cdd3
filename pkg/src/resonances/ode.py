"""Adaptive Dormand-Prince 5(4) integration and the Riccati solvers for alpha_-/alpha_+.

Riccati variables are ``alpha_pm = u_pm'/u_pm -/+ z`` where ``u_pm ~ exp(+/- z x)``;
they satisfy ``alpha' = -alpha^2 -/+ 2 alpha z + V`` (upper sign for alpha_+).
alpha_- is integrated from ``Xmax`` down to 0, alpha_+ from 0 up to ``Xmax``,
which is the stable direction for both.

Analytic potentials are integrated along a ray ``x = s * exp(i*phi)``; the
boundary values at ``x = 0`` do not depend on ``phi`` as long as the potential
decays along the ray and ``Re(z exp(i*phi)) > 0``, while the size of the
integrands ``V(x) exp(2 z x)`` does. :func:`choose_path` picks ``phi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .errors import DecayViolationError, MaxStepsError, RiccatiPoleError, StepUnderflowError

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
D1, D3, D4, D5 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072, 701980252875 / 199316789632
D6, D7 = -1453857185 / 822651844, 69997945 / 29380423

SAFETY = 0.9
FAC_MIN, FAC_MAX = 0.2, 5.0
# PI controller exponents (Gustafsson), for a 5th order error estimate
BETA1, BETA2 = 0.7 / 5, 0.4 / 5
POLE_GUARD = 1e6


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-polynomial (4th order Dormand-Prince) dense output.

    ``breakpoints`` are monotone in the integration direction; ``coeffs`` has
    shape ``(steps, 5, dim)``.
    """

    breakpoints: np.ndarray
    coeffs: np.ndarray
    functionals: Mapping[str, complex] = field(default_factory=dict)
    nfev: int = 0
    rejected: int = 0

    @property
    def n_steps(self):
        return len(self.breakpoints) - 1

    @property
    def y_start(self):
        return self.coeffs[0, 0] if self.n_steps else None

    @property
    def y_end(self):
        c = self.coeffs[-1]
        return c[0] + c[1]

    def _locate(self, s):
        bp = self.breakpoints
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if bp[-1] >= bp[0]:
            idx = np.searchsorted(bp, s, side="right") - 1
        else:
            idx = len(bp) - 1 - np.searchsorted(bp[::-1], s, side="left")
        idx = np.clip(idx, 0, self.n_steps - 1)
        h = bp[idx + 1] - bp[idx]
        theta = (s - bp[idx]) / h
        return idx, theta, h

    def __call__(self, s):
        """Dense-output state at path coordinate(s) *s*; shape ``(dim,)`` or ``(n, dim)``."""
        scalar = np.ndim(s) == 0
        idx, th, _ = self._locate(s)
        c = self.coeffs[idx]
        th = th[:, None]
        t1 = 1.0 - th
        y = c[:, 0] + th * (c[:, 1] + t1 * (c[:, 2] + th * (c[:, 3] + t1 * c[:, 4])))
        return y[0] if scalar else y

    def derivative(self, s):
        """d/ds of the dense output."""
        scalar = np.ndim(s) == 0
        idx, th, h = self._locate(s)
        c = self.coeffs[idx]
        th = th[:, None]
        t1 = 1.0 - th
        dy = (
            c[:, 1]
            + (1 - 2 * th) * c[:, 2]
            + (2 * th - 3 * th * th) * c[:, 3]
            + (2 * th * t1 * t1 - 2 * th * th * t1) * c[:, 4]
        ) / h[:, None]
        return dy[0] if scalar else dy


def _norm(err, y0, y1, tol):
    m = 0.0
    for e, a, b in zip(err, y0, y1):
        sc = abs(a)
        bb = abs(b)
        if bb > sc:
            sc = bb
        if sc < 1.0:
            sc = 1.0
        r = abs(e) / (tol * sc)
        if r > m:
            m = r
    return m


def _initial_step(f, s0, y0, f0, direction, tol, span_len):
    d0 = max(abs(v) for v in y0) if y0 else 0.0
    d1 = max(abs(v) for v in f0) if f0 else 0.0
    scale = tol * max(1.0, d0)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span_len)
    y1 = [a + direction * h0 * b for a, b in zip(y0, f0)]
    f1 = f(s0 + direction * h0, y1)
    d2 = max(abs(a - b) for a, b in zip(f1, f0)) / h0 / scale
    d1s = d1 / scale
    if max(d1s, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1s, d2)) ** (1 / 5)
    return min(100 * h0, h1, span_len)


def _integrate_segment(f, s0, s1, y0, tol, h, max_steps, guard, out, counters):
    direction = 1.0 if s1 >= s0 else -1.0
    span_len = abs(s1 - s0)
    if span_len == 0.0:
        return list(y0), h
    y = list(y0)
    s = s0
    k1 = f(s, y)
    counters[0] += 1
    if h is None:
        h = _initial_step(f, s, y, k1, direction, tol, span_len)
        counters[0] += 1
    h_min = 16 * np.finfo(float).eps * max(abs(s0), abs(s1), 1.0)
    err_old = 1e-4
    steps = 0
    bps, cfs = out
    while True:
        remaining = abs(s1 - s)
        if remaining <= h_min:
            break
        last = h >= remaining
        if last:
            h = remaining
        hs = direction * h
        k2 = f(s + C2 * hs, [a + hs * A21 * b1 for a, b1 in zip(y, k1)])
        k3 = f(s + C3 * hs, [a + hs * (A31 * b1 + A32 * b2) for a, b1, b2 in zip(y, k1, k2)])
        k4 = f(s + C4 * hs, [a + hs * (A41 * b1 + A42 * b2 + A43 * b3) for a, b1, b2, b3 in zip(y, k1, k2, k3)])
        k5 = f(
            s + C5 * hs,
            [a + hs * (A51 * b1 + A52 * b2 + A53 * b3 + A54 * b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)],
        )
        s_new = s1 if last else s + hs
        k6 = f(
            s_new,
            [
                a + hs * (A61 * b1 + A62 * b2 + A63 * b3 + A64 * b4 + A65 * b5)
                for a, b1, b2, b3, b4, b5 in zip(y, k1, k2, k3, k4, k5)
            ],
        )
        y_new = [
            a + hs * (B1 * b1 + B3 * b3 + B4 * b4 + B5 * b5 + B6 * b6)
            for a, b1, b3, b4, b5, b6 in zip(y, k1, k3, k4, k5, k6)
        ]
        k7 = f(s_new, y_new)
        counters[0] += 6
        err = [
            hs * (E1 * b1 + E3 * b3 + E4 * b4 + E5 * b5 + E6 * b6 + E7 * b7)
            for b1, b3, b4, b5, b6, b7 in zip(k1, k3, k4, k5, k6, k7)
        ]
        en = _norm(err, y, y_new, tol)
        if en <= 1.0 and all(map(math.isfinite, (abs(v) for v in y_new))):
            r2 = [b - a for a, b in zip(y, y_new)]
            r3 = [hs * b1 - d for b1, d in zip(k1, r2)]
            r4 = [d - hs * b7 - e for d, b7, e in zip(r2, k7, r3)]
            r5 = [
                hs * (D1 * b1 + D3 * b3 + D4 * b4 + D5 * b5 + D6 * b6 + D7 * b7)
                for b1, b3, b4, b5, b6, b7 in zip(k1, k3, k4, k5, k6, k7)
            ]
            bps.append(s_new)
            cfs.append((list(y), r2, r3, r4, r5))
            if guard is not None:
                guard(s_new, y_new)
            s, y, k1 = s_new, y_new, k7
            en = max(en, 1e-10)
            fac = SAFETY * en ** (-BETA1) * err_old ** BETA2
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            err_old = en
            h_next = h * fac
            steps += 1
            if last:
                h = h_next
                break
            h = h_next
            if steps > max_steps:
                raise MaxStepsError(f"more than {max_steps} steps on [{s0}, {s1}]")
        else:
            counters[1] += 1
            if not math.isfinite(en):
                fac = FAC_MIN
            else:
                fac = max(FAC_MIN, SAFETY * en ** (-1 / 5))
            h = h * fac
            if h < h_min:
                raise StepUnderflowError(f"step size underflow at s={s} (h={h:.3e})")
    return y, h


def integrate(
    f: Callable,
    span: tuple,
    y0,
    tol: float = 1e-10,
    *,
    breakpoints=(),
    max_steps: int = 200_000,
    guard: Callable | None = None,
    functionals: Mapping[str, int] | None = None,
) -> Trajectory:
    """Integrate ``y' = f(s, y)`` over ``span = (s_from, s_to)``.

    Dormand-Prince 5(4) with PI step-size control; the local error of every
    accepted step satisfies ``|err_i| <= tol * max(1, |y_i|)``. Points in
    *breakpoints* strictly inside the span are hit exactly (the step sequence
    restarts there). *functionals* maps names to state indices whose final
    values are reported on the trajectory. *guard(s, y)* may raise to abort.
    """
    s_from, s_to = float(span[0]), float(span[1])
    if tol <= 0:
        raise ValueError("tol must be positive")
    y0 = [complex(v) for v in y0]
    lo, hi = min(s_from, s_to), max(s_from, s_to)
    cuts = sorted(b for b in breakpoints if lo < b < hi)
    if s_to < s_from:
        cuts = cuts[::-1]
    nodes = [s_from] + cuts + [s_to]
    bps = [s_from]
    cfs = []
    counters = [0, 0]
    y, h = y0, None
    for a, b in zip(nodes[:-1], nodes[1:]):
        y, h = _integrate_segment(f, a, b, y, tol, h, max_steps, guard, (bps, cfs), counters)
    if cfs:
        coeffs = np.array(cfs, dtype=complex)
    else:
        # zero-length span: a single constant piece
        bps = [s_from, s_from + (1.0 if s_to >= s_from else -1.0)]
        coeffs = np.zeros((1, 5, len(y0)), dtype=complex)
        coeffs[0, 0] = y0
    traj = Trajectory(np.array(bps, dtype=float), coeffs, {}, counters[0], counters[1])
    if functionals:
        object.__setattr__(traj, "functionals", {k: complex(y[i]) for k, i in functionals.items()})
    return traj


# --------------------------------------------------------------------------
# integration path


class PathChoice(NamedTuple):
    angle: float
    smax: float
    peak: float  # max over s of log(|V~(s w)| exp(2 Re(z w) s))


PEAK_MAX = math.log(50.0)
_S_GRID = np.linspace(0.0, 1.0, 1601)[1:]


def _path_profile(potential, z, angle, cap, tol_decay):
    omega = cmath.exp(1j * angle)
    s = _S_GRID * cap
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        mag = np.abs(potential.shifted_vector(s * omega))
        g = np.log(mag) + 2.0 * (z * omega).real * s
    g = np.where(np.isnan(g), np.inf, g)
    above = np.nonzero(g > math.log(tol_decay))[0]
    peak = float(np.max(g)) if np.isfinite(np.max(g)) or np.max(g) == np.inf else -np.inf
    if len(above) == 0:
        return 0.0, peak
    idx = above[-1]
    if idx >= len(s) - 1:
        return math.inf, peak
    return float(s[idx + 1]), peak


def choose_path(problem, z, angle=None) -> PathChoice:
    """Pick the ray direction and truncation point for decay parameter *z*.

    The truncation ``smax`` is the first grid point beyond which
    ``|V~(s w)| exp(2 Re(z w) s) <= tol_decay``. Among admissible angles the
    one with the smallest ``smax`` whose peak integrand stays below
    ``exp(PEAK_MAX)`` wins; otherwise the one with the smallest peak.
    """
    p = problem.potential
    z = complex(z)
    if p.support is not None:
        return PathChoice(0.0, float(p.support), 0.0)
    cap = problem.xmax_cap
    if angle is None:
        angle = problem.path_angle
    if angle is not None or not p.analytic:
        angle = 0.0 if angle is None else float(angle)
        smax, peak = _path_profile(p, z, angle, cap, problem.tol_decay)
        if not math.isfinite(smax):
            raise DecayViolationError(
                f"|V(x)| exp(2 Re(z x)) does not fall below {problem.tol_decay:g} before x={cap:g} "
                f"(z={z:.6g}, angle={angle:.4g})"
            )
        return PathChoice(angle, max(smax, 1.0), peak)
    half = 0.49 * p.analytic_sector_alpha
    angles = np.unique(np.concatenate([np.linspace(-half, half, 33), [0.0]]))
    zarg = cmath.phase(z)
    options = []
    for phi in angles:
        if math.cos(zarg + phi) <= 0.0:
            continue
        smax, peak = _path_profile(p, z, float(phi), cap, problem.tol_decay)
        if math.isfinite(smax):
            options.append(PathChoice(float(phi), max(smax, 1.0), peak))
    if not options:
        raise DecayViolationError(
            f"no admissible integration ray for z={z:.6g}: the potential does not decay "
            f"against exp(2 z x) within x<={cap:g}"
        )
    good = [o for o in options if o.peak <= PEAK_MAX]
    if good:
        return min(good, key=lambda o: (o.smax, abs(o.angle)))
    return min(options, key=lambda o: (o.peak, o.smax))


# --------------------------------------------------------------------------
# Riccati solvers


class Functional(NamedTuple):
    """Extra quadrature accumulated alongside a Riccati solve.

    ``integrand(x, alpha, int_alpha, v)`` is integrated in ``x`` (``v`` is
    ``V - V_inf`` at ``x``). For the minus side ``int_alpha`` is
    ``int_x^inf alpha_-`` and the functional accumulates ``int_x^inf``; for the
    plus side it is ``int_0^x alpha_+`` and accumulation is ``int_0^x``.
    ``tail(X, omega, alpha_X, int_alpha_X)`` optionally estimates the
    contribution beyond the truncation point ``s = X`` (plus side only).
    With ``coupled=True`` the integrand takes the functional's own current
    value as a fifth argument, which allows rescaled (linear ODE) quantities.
    """

    integrand: Callable
    tail: Callable | None = None
    coupled: bool = False


@dataclass(frozen=True)
class RiccatiSolution:
    """Sampled alpha_- or alpha_+ along the ray ``x = s * omega``, ``0 <= s <= smax``.

    Path coordinates ``s`` coincide with ``x`` when the ray is the real axis.
    """

    side: str
    z: complex
    omega: complex
    smax: float
    trajectory: Trajectory
    values: Mapping[str, complex]

    @property
    def alpha0(self):
        return self.values["alpha0"]

    def alpha_at(self, s):
        return self.trajectory(s)[..., 0]

    def int_alpha_0_to(self, s):
        """``int_0^x alpha`` with ``x = s * omega``."""
        if self.side == "plus":
            return self.trajectory(s)[..., 1]
        return self.values["int_alpha"] - self.trajectory(s)[..., 1]

    def int_alpha_to_inf(self, s):
        """``int_x^inf alpha_-`` including the tail beyond ``smax`` (minus side)."""
        if self.side != "minus":
            raise AttributeError("int_alpha_to_inf is defined for alpha_- only")
        return self.trajectory(s)[..., 1]

    def riccati_residual(self, s, potential):
        """``alpha' + alpha^2 -/+ 2 alpha z - V~`` from the dense output at *s*."""
        s = np.asarray(s, dtype=float)
        a = self.alpha_at(s)
        da = self.trajectory.derivative(s)[..., 0] / self.omega
        sign = 1.0 if self.side == "plus" else -1.0
        return da + a * a + sign * 2.0 * a * self.z - potential.shifted_vector(s * self.omega)


def mul_exp(v, w):
    """``v * exp(w)`` that survives ``exp(w)`` overflowing while the product is finite."""
    try:
        return v * cmath.exp(w)
    except OverflowError:
        if v == 0:
            return 0j
        return cmath.exp(w + cmath.log(v))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def tail_integral(fn, X_s, omega, length=None):
    """``int`` of *fn(x)* along the ray from ``s = X_s`` to ``s = X_s + length`` (32-point Gauss)."""
    length = X_s if length is None else length
    s = X_s + 0.5 * length * (_GL_X + 1.0)
    x = s * omega
    vals = np.array([fn(complex(xi)) for xi in x])
    return complex(0.5 * length * omega * np.dot(_GL_W, vals))


def _make_guard(limit=POLE_GUARD):
    def guard(s, y):
        if abs(y[0]) > limit:
            raise RiccatiPoleError(f"|alpha| exceeded {limit:g} at s={s:.6g}")

    return guard


def solve_alpha_minus(problem, z, xmax=None, tol=None, *, path=None, functionals=None) -> RiccatiSolution:
    """Integrate ``alpha' = -alpha^2 + 2 alpha z + V~`` from ``Xmax`` down to 0.

    Seeded with ``alpha_-(Xmax) = -V~(Xmax)/(2z)``; ``int_x^inf alpha_-`` is
    accumulated with the tail ``-int V~/(2z)`` beyond ``Xmax``.
    """
    z = complex(z)
    if z.real <= 0:
        raise ValueError("solve_alpha_minus requires Re z > 0")
    tol = problem.tol if tol is None else tol
    if path is None:
        path = choose_path(problem, z)
    if xmax is not None:
        path = path._replace(smax=float(xmax))
    omega = cmath.exp(1j * path.angle)
    vt = problem.potential.tilde_scalar()
    compact = problem.potential.support is not None
    X = path.smax
    xX = X * omega
    if compact:
        a_seed, b_seed = 0j, 0j
    else:
        a_seed = -vt(xX) / (2 * z)
        b_seed = tail_integral(lambda x: -vt(x) / (2 * z), X, omega)
    funcs = dict(functionals or {})
    names = list(funcs)
    integrands = [(funcs[k].integrand, funcs[k].coupled, i + 2) for i, k in enumerate(names)]
    two_z = 2 * z
    mo = -omega

    def rhs(s, y):
        x = s * omega
        v = vt(x)
        a = y[0]
        out = [omega * (-a * a + two_z * a + v), mo * a]
        for fn, coupled, i in integrands:
            out.append(mo * (fn(x, a, y[1], v, y[i]) if coupled else fn(x, a, y[1], v)))
        return out

    y0 = [a_seed, b_seed]
    for k in names:
        if compact:
            y0.append(0j)
        else:
            fn = funcs[k].integrand
            if funcs[k].coupled:
                # own value is small in the tail; first-order estimate
                g = lambda x, fn=fn: fn(x, -vt(x) / two_z, 0j, vt(x), 0j)  # noqa: E731
            else:
                g = lambda x, fn=fn: fn(x, -vt(x) / two_z, 0j, vt(x))  # noqa: E731
            y0.append(tail_integral(g, X, omega))
    bps = tuple(b for b in problem.potential.breakpoints if 0 < b < X) if path.angle == 0 else ()
    traj = integrate(
        rhs,
        (X, 0.0),
        y0,
        tol,
        breakpoints=bps,
        guard=_make_guard(),
        functionals={"alpha0": 0, "int_alpha": 1, **{k: i + 2 for i, k in enumerate(names)}},
    )
    return RiccatiSolution("minus", z, omega, X, traj, dict(traj.functionals))


def solve_alpha_plus(problem, z, alpha0, xmax=None, tol=None, *, path=None, functionals=None) -> RiccatiSolution:
    """Integrate ``alpha' = -alpha^2 - 2 alpha z + V~`` from 0 (``alpha(0) = alpha0``) to ``Xmax``."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("solve_alpha_plus requires Re z > 0")
    tol = problem.tol if tol is None else tol
    if path is None:
        path = choose_path(problem, z)
    if xmax is not None:
        path = path._replace(smax=float(xmax))
    omega = cmath.exp(1j * path.angle)
    vt = problem.potential.tilde_scalar()
    X = path.smax
    funcs = dict(functionals or {})
    names = list(funcs)
    integrands = [(funcs[k].integrand, funcs[k].coupled, i + 2) for i, k in enumerate(names)]
    two_z = 2 * z

    def rhs(s, y):
        x = s * omega
        v = vt(x)
        a = y[0]
        out = [omega * (-a * a - two_z * a + v), omega * a]
        for fn, coupled, i in integrands:
            out.append(omega * (fn(x, a, y[1], v, y[i]) if coupled else fn(x, a, y[1], v)))
        return out

    y0 = [complex(alpha0), 0j] + [0j] * len(names)
    bps = tuple(b for b in problem.potential.breakpoints if 0 < b < X) if path.angle == 0 else ()
    traj = integrate(
        rhs,
        (0.0, X),
        y0,
        tol,
        breakpoints=bps,
        guard=_make_guard(),
        functionals={"alpha_end": 0, "int_alpha": 1, **{k: i + 2 for i, k in enumerate(names)}},
    )
    values = dict(traj.functionals)
    values["alpha0"] = complex(alpha0)
    if problem.potential.support is None:
        for k in names:
            tail = funcs[k].tail
            if tail is not None:
                values[k] += tail(X, omega, values["alpha_end"], values["int_alpha"])
    return RiccatiSolution("plus", z, omega, X, traj, values)
