import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herglotz_flow.errors import DomainError
from herglotz_flow.sl2 import (BOOST, IDENTITY, ROTATION, UNIPOTENT, CaseTag, GroupElement,
                               LieElement, MobiusClass, classify_case, classify_mobius, compose,
                               exponential, flow_apply, group_law_check, mobius_apply,
                               ode_oracle, parameter_window, theta, theta_limit, trajectory_map)


def test_unipotent_exponential():
    assert np.allclose(exponential(UNIPOTENT, 2.5).matrix(), [[1, 0], [2.5, 1]], atol=1e-15)


def test_quarter_turn_of_the_rotation():
    assert np.allclose(exponential(ROTATION, math.pi / 2).matrix(), [[0, -1], [1, 0]], atol=1e-15)


def test_boost_at_unit_time():
    ch, sh = math.cosh(1.0), math.sinh(1.0)
    assert np.allclose(exponential(BOOST, 1.0).matrix(), [[ch, sh], [sh, ch]], atol=1e-14)
    assert ch == pytest.approx(1.54308, abs=1e-5) and sh == pytest.approx(1.17520, abs=1e-5)


def test_ode_oracle_examples():
    assert np.allclose(ode_oracle(UNIPOTENT, 1.0).matrix(), [[1, 0], [1, 1]], atol=1e-12)
    assert np.allclose(ode_oracle(ROTATION, math.pi).matrix(), -np.eye(2), atol=1e-10)
    assert np.allclose(ode_oracle(BOOST, 0.0).matrix(), np.eye(2), atol=0)


def test_mobius_examples():
    z = np.array([0.3 + 0.7j])
    assert mobius_apply(IDENTITY, z) == pytest.approx(z)
    assert mobius_apply(exponential(UNIPOTENT, 2.0), z) == pytest.approx(z / (2 * z + 1))
    assert complex(mobius_apply(GroupElement(0.0, -1.0, 1.0, 0.0), np.array([1j]))[0]) == pytest.approx(1j)
    with pytest.raises(DomainError):
        mobius_apply(IDENTITY, np.array([0.5]))


def test_non_unimodular_matrix_is_rejected():
    with pytest.raises(ValueError):
        GroupElement(2.0, 0.0, 0.0, 1.0)


def test_unipotent_compositions():
    s, t = 0.7, -1.9
    z = np.array([0.2 + 1.1j])
    g = compose(exponential(UNIPOTENT, t), exponential(UNIPOTENT, s))
    assert mobius_apply(g, z) == pytest.approx(z / ((t + s) * z + 1), rel=1e-14)
    inverse = compose(exponential(BOOST, 1.3), exponential(BOOST, -1.3))
    assert np.allclose(inverse.matrix(), np.eye(2), atol=1e-12)


def test_case_and_mobius_classes():
    assert classify_case(UNIPOTENT) is CaseTag.CASE_II
    assert classify_mobius(exponential(UNIPOTENT, 0.4)) is MobiusClass.PARABOLIC
    assert classify_case(ROTATION) is CaseTag.CASE_I
    assert classify_mobius(exponential(ROTATION, math.pi / 2)) is MobiusClass.ELLIPTIC
    assert classify_case(BOOST) is CaseTag.CASE_III
    g = exponential(BOOST, 1.0)
    assert float(g.trace) == pytest.approx(2 * math.cosh(1.0))
    assert classify_mobius(g) is MobiusClass.HYPERBOLIC
    assert classify_mobius(IDENTITY) is MobiusClass.IDENTITY


def test_theta_per_case():
    assert theta(UNIPOTENT, 3.2) == 3.2
    assert theta(ROTATION, math.pi / 4) == pytest.approx(1.0, abs=1e-15)
    assert theta(BOOST, 40.0) == pytest.approx(1.0, abs=1e-15)
    assert theta_limit(BOOST, 1) == 1.0 and theta_limit(BOOST, -1) == -1.0
    with pytest.raises(DomainError):
        theta(ROTATION, 2.0)


def test_parameter_windows():
    assert parameter_window(ROTATION) == pytest.approx((-math.pi / 2, math.pi / 2))
    assert parameter_window(UNIPOTENT) == (-math.inf, math.inf)
    assert parameter_window(LieElement(-2.0, 1.0, 1.0)) == pytest.approx((-math.pi / 2, math.pi / 2))


def test_flow_stays_accurate_far_out_in_case_three():
    # Im g_t(i) = 1/cosh(2t) for the boost; the naive entries overflow long before
    t = np.array([10.0, 200.0])
    im = flow_apply(BOOST, t, 1j).imag
    assert im == pytest.approx(1 / np.cosh(2 * t), rel=1e-12)


coeff = st.floats(-2.0, 2.0)
times = st.floats(-3.0, 3.0)


@given(coeff, coeff, coeff, times, times)
def test_group_law_in_extended_precision(alpha, beta, gamma, s, t):
    assert group_law_check(LieElement(alpha, beta, gamma), s, t, dps=40) <= 1e-12


@given(coeff, coeff, coeff, times)
def test_closed_form_matches_series_oracle(alpha, beta, gamma, t):
    X = LieElement(alpha, beta, gamma)
    assert np.max(np.abs(exponential(X, t).matrix() - ode_oracle(X, t).matrix())) <= 1e-10


@given(coeff, coeff, coeff, st.floats(-5.0, 5.0))
def test_unit_determinant(alpha, beta, gamma, t):
    g = exponential(LieElement(alpha, beta, gamma), t)
    assert abs(float(g.a * g.d - g.b * g.c) - 1.0) <= 1e-12 * max(1.0, float(abs(g.a * g.d)))


@given(st.floats(-2, 2).filter(lambda g: abs(g) > 1e-3), coeff, coeff,
       st.floats(-3, 3).filter(lambda t: abs(t) > 1e-6))
def test_lower_left_entry_vanishes_only_at_period_multiples(gamma, alpha, beta, t):
    X = LieElement(alpha, beta, gamma)
    c_t = float(exponential(X, t).c)
    if classify_case(X) is CaseTag.CASE_I:
        periods = t * X.omega / math.pi
        if abs(periods - round(periods)) > 1e-6:
            assert c_t != 0
        # sin(wt)/w keeps the sign of t inside the first half period
        if abs(periods) < 1:
            assert math.copysign(1, c_t) == math.copysign(1, gamma * t)
    else:
        assert c_t != 0 and math.copysign(1, c_t) == math.copysign(1, gamma * t)


@given(coeff, coeff, coeff, st.floats(-1.4, 1.4),
       st.tuples(st.floats(-3, 3), st.floats(0.05, 3)).map(lambda p: complex(*p)))
def test_trajectory_is_a_moebius_map_of_theta(alpha, beta, gamma, t, z):
    X = LieElement(alpha, beta, gamma)
    lo, hi = parameter_window(X)
    if not lo < t < hi:
        return
    g = exponential(X, t)
    direct = complex(mobius_apply(g, np.array([z]))[0])
    assert complex(trajectory_map(X, theta(X, t), z)) == pytest.approx(direct, rel=1e-10, abs=1e-12)
