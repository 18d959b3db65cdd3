"""Problem description: potential, domain, boundary condition, tolerances."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

from .potentials import HALF_LINE, WHOLE_LINE, Potential


@dataclass(frozen=True)
class BoundaryCondition:
    """``a f(0) + b f'(0) = 0``."""

    a: float
    b: float

    def __post_init__(self):
        if abs(self.a) + abs(self.b) == 0:
            raise ValueError("boundary condition needs |a| + |b| > 0")

    @property
    def label(self):
        if self.b == 0:
            return "D"
        if self.a == 0:
            return "N"
        return "R"


DIRICHLET = BoundaryCondition(1.0, 0.0)
NEUMANN = BoundaryCondition(0.0, 1.0)


def boundary_condition(spec) -> BoundaryCondition:
    """Accept a :class:`BoundaryCondition`, a name, a one-letter label or ``(a, b)``."""
    if isinstance(spec, BoundaryCondition):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key in ("d", "dirichlet"):
            return DIRICHLET
        if key in ("n", "neumann"):
            return NEUMANN
        raise ValueError(f"unknown boundary condition {spec!r}")
    a, b = spec
    return BoundaryCondition(float(a), float(b))


@dataclass(frozen=True)
class Problem:
    """Everything a residual evaluation needs.

    ``path_angle`` fixes the direction ``exp(i*phi)`` of the integration ray;
    ``None`` lets the solver pick one per ``z`` (real axis for non-analytic
    potentials).
    """

    potential: Potential
    domain: str = HALF_LINE
    bc: BoundaryCondition = DIRICHLET
    tol: float = 1e-11
    tol_decay: float = 1e-13
    xmax_cap: float = 400.0
    path_angle: float | None = None

    def __post_init__(self):
        if self.domain not in (HALF_LINE, WHOLE_LINE):
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "bc", boundary_condition(self.bc))

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def v_infinity(self):
        return self.potential.v_infinity

    def lam(self, z):
        """Spectral parameter for the decay parameter ``z`` of the shifted problem."""
        return self.potential.v_infinity - z * z

    def z_of(self, lam):
        """Principal ``z = sqrt(V_inf - lambda)`` with ``Re z >= 0``."""
        return cmath.sqrt(self.potential.v_infinity - lam)
