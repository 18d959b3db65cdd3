"""Eigenvalues and resonances of one-dimensional Schroedinger operators
``-d^2/dx^2 + V`` with decaying, possibly complex, potentials.

Resonances ``lambda = V_inf - z^2`` (``Re z > 0``) are zeros of boundary
residuals built from Riccati shooting (:mod:`method_one`,
:mod:`method_two`); whole-line eigenvalues are zeros of the entire
function in :mod:`phi`. :mod:`bounds` gives enclosure regions and
:mod:`perturbation` first-order shifts.
"""

from . import bounds, locator, method_one, method_two, ode, perturbation, phi, potentials
from .errors import *  # noqa: F401,F403
from .locator import Resonance, deflate_pair, refine, scan, winding_number
from .potentials import HALF_LINE, WHOLE_LINE, Potential, builtin, parse_expression
from .problem import DIRICHLET, NEUMANN, BoundaryCondition, Problem

__all__ = [
    "bounds", "locator", "method_one", "method_two", "ode", "perturbation", "phi", "potentials",
    "Resonance", "deflate_pair", "refine", "scan", "winding_number",
    "HALF_LINE", "WHOLE_LINE", "Potential", "builtin", "parse_expression",
    "DIRICHLET", "NEUMANN", "BoundaryCondition", "Problem",
]
__version__ = "0.1.0"
