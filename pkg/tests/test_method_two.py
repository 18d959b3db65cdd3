import numpy as np
import pytest

import oracles as O
from resonances import locator, method_one, method_two
from resonances.potentials import gaussian_well, square_well, zero
from resonances.problem import DIRICHLET, NEUMANN, BoundaryCondition, Problem

GAUSS = Problem(gaussian_well())


def test_free_problem():
    prob = Problem(zero(), bc=BoundaryCondition(1.0, 2.0))
    assert method_two.residual(prob, 0.9 + 0.2j) == pytest.approx(1.0 + 2.0 * (0.9 + 0.2j))


def test_cexpm1_small_argument():
    w = 1e-12 + 1e-13j
    assert method_two.cexpm1(w) == pytest.approx(w + w * w / 2, rel=1e-12)


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_agrees_with_method_one(n):
    p = GAUSS.with_(bc=DIRICHLET if n % 2 == 0 else NEUMANN)
    z0 = GAUSS.z_of(O.TABLE1_FROZEN[n])
    r1 = locator.refine(lambda z: method_one.residual(p, z), z0)
    r2 = locator.refine(lambda z: method_two.residual(p, z), z0)
    assert abs(r1.lam - r2.lam) <= 1e-8


def test_same_zero_structure():
    p = GAUSS.with_(bc=NEUMANN)
    z0 = GAUSS.z_of(O.TABLE1_FROZEN[1])
    rect = (z0.real - 0.2, z0.real + 0.2, z0.imag - 0.2, z0.imag + 0.2)
    verts = locator._rect_vertices(rect)
    w1 = locator.winding_number(lambda z: method_one.residual(p, z), verts)
    w2 = locator.winding_number(lambda z: method_two.residual(p, z), verts)
    assert w1 == w2 == 1


def test_c1_independent_of_cutoff():
    prob = Problem(square_well(3.0))
    a = method_two.residual(prob, 1.2 + 2j)
    b = method_two.residual(prob.with_(xmax_cap=800.0), 1.2 + 2j)
    assert a == pytest.approx(b, rel=1e-10)
