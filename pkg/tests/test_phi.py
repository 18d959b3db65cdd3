import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

import oracles as O
from resonances import locator, phi
from resonances.errors import DomainError, UnboundedError
from resonances.potentials import WHOLE_LINE, gaussian_sum, l1_norm, zero
from resonances.problem import Problem

WELL = Problem(gaussian_sum([-3.0], [1.0]), domain=WHOLE_LINE, tol=1e-11)


def test_free_phi():
    prob = Problem(zero(WHOLE_LINE), domain=WHOLE_LINE)
    for z in (0.5, 1 + 2j, 3 - 1j):
        assert phi.phi(prob, z).phi == pytest.approx(2 * z)
    assert phi.count_zeros(prob, (0.2, 3, -3, 3)) == 0


def _fd_ground(h, L=12.0):
    x = np.arange(-L, L + h / 2, h)[1:-1]
    main = 2 / h**2 - 3 * np.exp(-(x**2))
    off = -np.ones(len(x) - 1) / h**2
    A = sp.diags([main, off, off], [0, 1, -1]).tocsc()
    return float(spla.eigsh(A, k=1, sigma=-2.0)[0][0])


def test_ground_state_against_finite_differences():
    fn = phi.phi_value(WELL)
    r = locator.refine(fn, WELL.z_of(-1.6), lam_of=WELL.lam)
    assert abs(r.lam - O.PHI_GROUND) < 1e-9
    e1, e2 = _fd_ground(0.02), _fd_ground(0.01)
    assert abs((4 * e2 - e1) / 3 - r.lam.real) < 1e-6


def test_count_zeros_around_ground_state():
    z = WELL.z_of(O.PHI_GROUND).real
    assert phi.count_zeros(WELL, (z - 0.1, z + 0.1, -0.1, 0.1)) == 1


def test_eigenvalues_scan():
    found = sorted(r.lam.real for r in phi.eigenvalues(WELL, (0.05, 2.0, -0.5, 0.5)))
    assert found == pytest.approx([O.PHI_GROUND, O.PHI_SECOND], abs=1e-8)


@pytest.mark.parametrize("z", [6.0 + 2.0j, 7.0 - 3.0j, 10.0])
def test_f_tilde_bound(z):
    N = l1_norm(WELL.potential, domain=WHOLE_LINE)
    ev = phi.phi(WELL, z)
    assert ev.f_tilde_sup <= abs(z) / (abs(z) - N) * (1 + 1e-8)


def test_overflow_and_domain_errors():
    with pytest.raises(UnboundedError):
        phi.phi(WELL, 100.0, xmax=10.0)
    with pytest.raises(DomainError):
        phi.phi(WELL, -1.0)
    with pytest.raises(DomainError):
        phi.phi(Problem(gaussian_sum([-1.0], [1.0], domain="half-line")), 1.0)
