"""First-order resonance shifts from a Nystrom discretisation of

    A(z) g = g + s X G(z) X g,      X = |V|^{1/2},  s = sign V,

whose null vectors at ``z0`` correspond to resonances ``lambda0 = -z0^2``.
``G`` is the outgoing Green's function of ``-d^2/dx^2 + z^2``: it grows
like ``exp(z |x - y|)``, matching resonance solutions ``f ~ exp(z x)``.

For ``V -> V + eps V1`` the resonance moves as ``z = z0 + eps nu`` with

    nu = -(B g0, g0) / (A'(z0) g0, g0),

``(u, v) = sum u_i v_i w_i`` (bilinear), ``A' = s X dG/dz X`` and
``B = dA/deps = (V1 / 2X) G X + X G (V1 / 2X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import locator, method_one
from .errors import KappaPoleError, SmallDenominatorError, UnsupportedProblemError
from .potentials import HALF_LINE, WHOLE_LINE, combine

DEFAULT_NODES = 200


def _bc_pair(bc):
    if hasattr(bc, "a"):
        return float(bc.a), float(bc.b)
    a, b = bc
    return float(a), float(b)


def kappa(bc, z):
    """Image coefficient ``(b z - a)/(b z + a)``."""
    a, b = _bc_pair(bc)
    den = b * z + a
    if abs(den) <= 1e-14 * (abs(a) + abs(b * z)):
        raise KappaPoleError(f"b z + a = 0 at z={z}: the free half-line problem has a resonance there")
    return (b * z - a) / den


def greens_function(bc, x, y, z, *, domain=HALF_LINE):
    """Outgoing kernel ``-[exp(z|x-y|) + kappa exp(z(x+y))] / (2z)``.

    With ``bc=None`` or ``domain="whole-line"`` the image term is dropped.
    Satisfies ``(-d^2/dx^2 + z^2) G = delta(x - y)`` and ``a G + b dG/dx = 0`` at ``x = 0``.
    """
    z = complex(z)
    if z.real <= 0:
        raise ValueError("greens_function requires Re z > 0")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    g = np.exp(z * np.abs(x - y))
    if domain == HALF_LINE and bc is not None:
        g = g + kappa(bc, z) * np.exp(z * (x + y))
    return -g / (2 * z)


def greens_dz(bc, x, y, z, *, domain=HALF_LINE):
    """``dG/dz`` in closed form."""
    z = complex(z)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    d = np.abs(x - y)
    e = np.exp(z * d)
    num = e
    dnum = d * e
    if domain == HALF_LINE and bc is not None:
        a, b = _bc_pair(bc)
        k = kappa(bc, z)
        dk = 2 * a * b / (b * z + a) ** 2
        s = x + y
        es = np.exp(z * s)
        num = num + k * es
        dnum = dnum + dk * es + k * s * es
    return num / (2 * z * z) - dnum / (2 * z)


def _sign(prob, x):
    v = prob.potential.shifted_vector(x)
    if np.max(np.abs(v.imag)) > 1e-12 * max(1.0, np.max(np.abs(v))):
        raise UnsupportedProblemError("the Nystrom machinery needs a real potential")
    r = v.real
    big = np.abs(r) > 1e-14 * max(np.max(np.abs(r)), 1e-300)
    if np.all(r[big] >= 0):
        return 1.0, r
    if np.all(r[big] <= 0):
        return -1.0, r
    raise UnsupportedProblemError("the potential changes sign on the domain")


def nystrom_cutoff(prob, z, tol=1e-14, cap=60.0):
    """Right end ``X`` with ``|V|^{1/2} exp(Re z x) <= tol`` beyond it."""
    p = prob.potential
    if p.support is not None:
        return float(p.support)
    xs = np.linspace(0.0, cap, 6001)[1:]
    f = np.sqrt(np.abs(p.shifted_vector(xs))) * np.exp(complex(z).real * xs)
    above = np.nonzero(f > tol)[0]
    if len(above) == 0:
        return 1.0
    return float(xs[min(above[-1] + 1, len(xs) - 1)])


@dataclass(frozen=True)
class NystromOperator:
    """``A = I + sign * K`` with symmetric ``K_ij = sqrt(w_i) X_i G_ij X_j sqrt(w_j)``."""

    z: complex
    nodes: np.ndarray
    weights: np.ndarray
    X: np.ndarray
    sign: float
    kappa: complex | None
    K: np.ndarray
    domain: str
    bc: tuple | None

    @property
    def matrix(self):
        return np.eye(len(self.nodes)) + self.sign * self.K

    def derivative(self):
        """``A'(z)`` in the same symmetric scaling."""
        sw = np.sqrt(self.weights)
        xi, xj = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        dG = greens_dz(self.bc, xi, xj, self.z, domain=self.domain)
        c = sw * self.X
        return self.sign * c[:, None] * dG * c[None, :]

    def green(self):
        xi, xj = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        return greens_function(self.bc, xi, xj, self.z, domain=self.domain)

    def null_vector(self):
        """``(sigma_min, h)``: smallest singular value and its right singular vector.

        ``h = sqrt(w) g`` is the symmetric-scaled null vector; ``g = h / sqrt(w)``.
        """
        _, s, vh = np.linalg.svd(self.matrix)
        return float(s[-1]), vh[-1].conj()

    def pairing(self, M, h):
        """Bilinear ``h^T M h`` (equals ``(M g, g)`` with quadrature weights)."""
        return complex(h @ (M @ h))


def build_A(prob, z, n=DEFAULT_NODES, *, xmax=None) -> NystromOperator:
    """Gauss-Legendre Nystrom matrix on ``[0, X]`` (``[-X, X]`` on the whole line)."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("build_A requires Re z > 0")
    X = nystrom_cutoff(prob, z) if xmax is None else float(xmax)
    t, w = np.polynomial.legendre.leggauss(n)
    if prob.domain == WHOLE_LINE:
        nodes, weights = X * t, X * w
        bc = None
        k = None
    else:
        nodes, weights = 0.5 * X * (t + 1), 0.5 * X * w
        bc = _bc_pair(prob.bc)
        k = kappa(bc, z)
    sign, v = _sign(prob, nodes)
    Xv = np.sqrt(np.abs(v))
    xi, xj = np.meshgrid(nodes, nodes, indexing="ij")
    G = greens_function(bc, xi, xj, z, domain=prob.domain)
    c = np.sqrt(weights) * Xv
    K = c[:, None] * G * c[None, :]
    return NystromOperator(z, nodes, weights, Xv, sign, k, K, prob.domain, bc)


def b_operator(op: NystromOperator, V1) -> np.ndarray:
    """``(V1/2X) G X + X G (V1/2X)`` in symmetric scaling."""
    v1 = np.real_if_close(V1.vector(op.nodes))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(op.X > 0, v1 / (2 * op.X), 0.0)
    sw = np.sqrt(op.weights)
    G = op.green()
    u, x = sw * r, sw * op.X
    return u[:, None] * G * x[None, :] + x[:, None] * G * u[None, :]


def nu_correction(prob, V1, z0, g0=None, n=DEFAULT_NODES, *, op=None, min_denominator=1e-10) -> complex:
    """``nu = -(B g0, g0)/(A'(z0) g0, g0)``; the shift is ``z = z0 + eps nu``.

    *g0* is the symmetric-scaled null vector; computed by SVD when omitted.
    """
    op = op or build_A(prob, z0, n)
    if g0 is None:
        _, g0 = op.null_vector()
    g0 = np.asarray(g0)
    den = op.pairing(op.derivative(), g0)
    if abs(den) <= min_denominator * float(np.vdot(g0, g0).real):
        raise SmallDenominatorError(f"(A' g0, g0) = {den:.3e} is too small")
    return -op.pairing(b_operator(op, V1), g0) / den


def predicted_shift(z0, nu, eps):
    """``lambda - lambda0 = -2 z0 nu eps`` (first order)."""
    return -2.0 * complex(z0) * complex(nu) * eps


def ma_block(op: NystromOperator) -> np.ndarray:
    """Real symmetric block ``[[-A2, A1], [A1, A2]]`` acting on ``(g2, g1)``."""
    A = op.matrix
    A1, A2 = A.real, A.imag
    return np.block([[-A2, A1], [A1, A2]])


def ma_null_vector(op: NystromOperator):
    """Null vector of :func:`ma_block` mapped back to ``g = g1 + i g2``."""
    M = ma_block(op)
    w, v = np.linalg.eigh(M)
    k = int(np.argmin(np.abs(w)))
    n = len(op.nodes)
    g2, g1 = v[:n, k], v[n:, k]
    return float(abs(w[k])), g1 + 1j * g2


def shift_fd(prob, V1, eps_list, z0, *, family=None, residual=method_one.residual, tol=1e-12, tol_res=1e-10):
    """``[(eps, lambda(eps) - lambda0)]`` from recomputed resonances.

    The perturbed potential is ``V + eps V1`` unless *family(eps)* supplies
    the exact perturbed potential. ``eps = 0`` yields exactly 0.
    """
    z0 = complex(z0)
    base = locator.refine(lambda z: residual(prob, z), z0, tol, tol_res=tol_res, lam_of=prob.lam)
    out = []
    for eps in eps_list:
        if eps == 0:
            out.append((eps, 0j))
            continue
        pot = family(eps) if family is not None else combine(prob.potential, V1, 1.0, eps)
        pe = prob.with_(potential=pot)
        r = locator.refine(lambda z: residual(pe, z), base.z, tol, tol_res=tol_res, lam_of=pe.lam)
        out.append((eps, r.lam - base.lam))
    return out


def nu_fd(prob, V1, z0, eps=1e-4, *, residual=method_one.residual, tol=1e-13, tol_res=1e-11):
    """Richardson-extrapolated slope ``dz/deps`` from ``eps`` and ``eps/10``."""
    base = locator.refine(lambda z: residual(prob, z), complex(z0), tol, tol_res=tol_res, lam_of=prob.lam)
    slopes = []
    for e in (eps, eps / 10):
        pe = prob.with_(potential=combine(prob.potential, V1, 1.0, e))
        r = locator.refine(lambda z: residual(pe, z), base.z, tol, tol_res=tol_res, lam_of=pe.lam)
        slopes.append((r.z - base.z) / e)
    d1, d2 = slopes
    return (10 * d2 - d1) / 9, base
