"""Property tests (hypothesis, 100 examples each)."""

import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import properties as P

SETTINGS = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def fl(lo, hi):
    return st.floats(lo, hi, allow_nan=False, allow_infinity=False)


@SETTINGS
@given(fl(0.3, 3.0), fl(-6, 6), fl(0, math.pi), fl(0.2, 2.0), fl(-1, 1))
def test_alpha0_independence(zr, zi, angle, sr, si):
    ok, detail = P.check_alpha0_independence(zr, zi, angle, complex(sr, si))
    assert ok, detail


@SETTINGS
@given(st.lists(st.tuples(fl(-1, 1), fl(-1, 1)), min_size=1, max_size=4), fl(0.2, 0.8))
def test_winding_additivity(zeros, cut):
    ok, detail = P.check_winding_additivity(zeros, (-1.3, 1.2, -1.1, 1.4), cut)
    assert ok, detail


@SETTINGS
@given(st.integers(0, 2), fl(0.2, 1.0), fl(0, 1), fl(0, 1), fl(0, 1))
def test_a_theta_convex(kind, param, t1, t2, t3):
    ok, detail = P.check_a_convex(kind, param, t1, t2, t3)
    assert ok, detail


@SETTINGS
@given(fl(-3, 1), fl(-1, 1), fl(0.5, 3), fl(0.2, 3), fl(-3, 3))
def test_phi_cauchy_riemann(w1, w2, s2, zr, zi):
    ok, detail = P.check_cauchy_riemann_phi(w1, w2, s2, zr, zi)
    assert ok, detail


@SETTINGS
@given(fl(0.3, 3), fl(-5, 5), st.sampled_from(["D", "N"]))
def test_residual_cauchy_riemann(zr, zi, label):
    ok, detail = P.check_cauchy_riemann_residual(zr, zi, label)
    assert ok, detail


@SETTINGS
@given(fl(0.3, 2), fl(-2, 2), st.integers(0, 23), st.integers(0, 23))
def test_nystrom_cauchy_riemann(zr, zi, i, j):
    ok, detail = P.check_cauchy_riemann_nystrom(zr, zi, i, j)
    assert ok, detail


@SETTINGS
@given(fl(0.3, 3), fl(0.1, 6), fl(0, math.pi))
def test_residual_conjugate_symmetry(zr, zi, angle):
    ok, detail = P.check_conjugate_symmetry(zr, zi, angle)
    assert ok, detail


@SETTINGS
@given(st.integers(0, 2), fl(0.2, 1.0), fl(0.1, 5), fl(-1, 1))
def test_potential_conjugate_symmetry(kind, param, r, u):
    ok, detail = P.check_conjugate_potential(kind, param, r, u)
    assert ok, detail
