import cmath
import math

import numpy as np
import pytest

from resonances import ode
from resonances.errors import MaxStepsError
from resonances.potentials import gaussian_well, square_well
from resonances.problem import Problem


def test_exponential_accuracy():
    traj = ode.integrate(lambda s, y: [(-1 + 2j) * y[0]], (0.0, 3.0), [1.0], 1e-11)
    assert traj.y_end[0] == pytest.approx(cmath.exp(3 * (-1 + 2j)), rel=1e-9)


def test_backward_and_dense_output():
    traj = ode.integrate(lambda s, y: [y[1], -y[0]], (2.0, 0.0), [math.sin(2), math.cos(2)], 1e-12)
    s = np.linspace(0.0, 2.0, 17)
    np.testing.assert_allclose(traj(s)[:, 0].real, np.sin(s), atol=1e-8)
    np.testing.assert_allclose(traj.derivative(s)[:, 0].real, np.cos(s), atol=1e-6)


def test_breakpoints_are_hit():
    traj = ode.integrate(lambda s, y: [1.0 if s < 1 else 0.0], (0.0, 2.0), [0.0], 1e-10, breakpoints=(1.0,))
    assert 1.0 in list(traj.breakpoints)
    assert traj.y_end[0] == pytest.approx(1.0, abs=1e-8)


def test_order_check():
    f = lambda s, y: [-y[0] * s]  # noqa: E731
    exact = math.exp(-8.0)
    errs = [abs(ode.integrate(f, (0.0, 4.0), [1.0], tol).y_end[0] - exact) for tol in (1e-6, 5e-7)]
    ref = abs(ode.integrate(f, (0.0, 4.0), [1.0], 1e-10).y_end[0] - exact)
    assert ref < errs[1] <= errs[0] / 2 or errs[1] < 1e-12


def test_max_steps():
    with pytest.raises(MaxStepsError):
        ode.integrate(lambda s, y: [cmath.exp(50j * s) * y[0]], (0.0, 50.0), [1.0], 1e-12, max_steps=20)


def test_mul_exp():
    assert ode.mul_exp(2.0, 1.0) == pytest.approx(2 * math.e)
    big = ode.mul_exp(1e-300, 700.0 + 20.0)
    assert big == pytest.approx(cmath.exp(720 + cmath.log(1e-300)))
    assert ode.mul_exp(0.0, 1000.0) == 0


def test_alpha_real_for_real_data():
    prob = Problem(square_well(2.0), tol=1e-11)
    sol = ode.solve_alpha_minus(prob, 1.3)
    s = np.linspace(0, sol.smax, 41)
    assert np.max(np.abs(sol.alpha_at(s).imag)) < 1e-13
    plus = ode.solve_alpha_plus(prob, 1.3, 1.3)
    assert np.max(np.abs(plus.alpha_at(np.linspace(0, plus.smax, 41)).imag)) < 1e-13


@pytest.mark.parametrize("z", [0.8, 1.5 + 2j, 2.0 + 5j])
def test_riccati_consistency(z):
    prob = Problem(gaussian_well(), tol=1e-10)
    for sol in (ode.solve_alpha_minus(prob, z), ode.solve_alpha_plus(prob, z, z)):
        bp = sol.trajectory.breakpoints
        mids = 0.5 * (bp[1:] + bp[:-1])
        res = sol.riccati_residual(np.sort(mids), prob.potential)
        scale = np.maximum(1.0, np.abs(sol.alpha_at(np.sort(mids))) ** 2)
        assert np.max(np.abs(res) / scale) <= 10 * 1e-10 * 1e3


def test_path_choice_rotates_for_large_z():
    prob = Problem(gaussian_well())
    pc = ode.choose_path(prob, 2.5 + 8j)
    assert pc.angle != 0.0 and pc.peak <= ode.PEAK_MAX
    assert ode.choose_path(Problem(square_well(1.0)), 1 + 1j).angle == 0.0


def test_boundary_values_path_independent():
    from resonances import method_one

    prob = Problem(gaussian_well())
    z = 1.6 + 3.0j
    vals = [method_one.residual(prob, z, path=ode.choose_path(prob, z, angle=a)) for a in (0.5, 0.6, 0.7)]
    assert max(abs(v - vals[0]) for v in vals) < 1e-9
