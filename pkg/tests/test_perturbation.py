import numpy as np
import pytest

import oracles as O
from resonances import locator, method_one, perturbation
from resonances.errors import KappaPoleError, UnsupportedProblemError
from resonances.potentials import WHOLE_LINE, gaussian_quartic, gaussian_sum, gaussian_well, perturbed_gaussian
from resonances.problem import DIRICHLET, BoundaryCondition, Problem

BC = BoundaryCondition(0.6, 0.8)
Z = 0.9 + 1.7j
PROB = Problem(gaussian_well(), bc=DIRICHLET)


@pytest.fixture(scope="module")
def z0():
    return locator.refine(lambda z: method_one.residual(PROB, z), PROB.z_of(O.TABLE1_FROZEN[0])).z


def test_kappa():
    assert perturbation.kappa((1.0, 0.0), Z) == pytest.approx(-1.0)
    assert perturbation.kappa((0.0, 1.0), Z) == pytest.approx(1.0)
    with pytest.raises(KappaPoleError):
        perturbation.kappa((1.0, 1.0), -1.0)


def test_greens_function_equation_and_boundary():
    G = lambda x, y=1.3: perturbation.greens_function(BC, x, y, Z)  # noqa: E731
    h = 1e-4
    for x in (0.4, 2.2):
        lap = (G(x + h) - 2 * G(x) + G(x - h)) / h**2
        assert abs(-lap + Z * Z * G(x)) < 1e-5 * abs(G(x))
    # jump of dG/dx across x = y is -1
    e = 1e-7
    jump = (G(1.3 + 2 * e) - G(1.3 + e)) / e - (G(1.3 - e) - G(1.3 - 2 * e)) / e
    assert jump == pytest.approx(-1.0, abs=1e-4)
    dG0 = (-3 * G(0.0) + 4 * G(h) - G(2 * h)) / (2 * h)
    assert abs(BC.a * G(0.0) + BC.b * dG0) < 1e-6


def test_greens_dz():
    h = 1e-6
    for dom in ("half-line", WHOLE_LINE):
        fd = (perturbation.greens_function(BC, 0.7, 1.9, Z + h, domain=dom)
              - perturbation.greens_function(BC, 0.7, 1.9, Z - h, domain=dom)) / (2 * h)
        assert perturbation.greens_dz(BC, 0.7, 1.9, Z, domain=dom) == pytest.approx(fd, rel=1e-7)


def test_pairing_is_bilinear():
    op = perturbation.build_A(PROB, Z, 8, xmax=4.0)
    h = np.arange(8) * (1 + 1j)
    M = np.eye(8)
    assert op.pairing(M, h) == pytest.approx(np.sum(h * h))


def test_ma_block_symmetric_and_null(z0):
    sig = []
    for n in (100, 200):
        op = perturbation.build_A(PROB, z0, n)
        M = perturbation.ma_block(op)
        assert np.allclose(M, M.T)
        s_svd, _ = op.null_vector()
        s_ma, g = perturbation.ma_null_vector(op)
        assert s_ma == pytest.approx(s_svd, rel=1e-8)
        assert np.linalg.norm(op.matrix @ g) <= 1.01 * s_svd * np.linalg.norm(g)
        sig.append(s_svd)
    # the kink of G on the diagonal limits the quadrature to second order
    assert 3.5 < sig[0] / sig[1] < 4.5 and sig[1] < 1e-4


def test_nu_matches_finite_differences(z0):
    nu = perturbation.nu_correction(PROB, gaussian_quartic(), z0)
    assert abs(nu.real - O.NU_ROW1) < 1e-6
    fd = perturbation.shift_fd(PROB, None, [1e-4], z0, family=perturbed_gaussian)
    pred = perturbation.predicted_shift(z0, nu, 1e-4)
    assert abs(fd[0][1] - pred) < 1e-2 * abs(pred)


def test_sign_changing_potential_rejected():
    prob = Problem(gaussian_sum([1.0, -2.0], [1.0, 3.0], domain="half-line"))
    with pytest.raises(UnsupportedProblemError):
        perturbation.build_A(prob, Z, 10)
