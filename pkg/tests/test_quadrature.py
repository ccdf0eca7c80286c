import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herglotz_flow.errors import QuadratureError, TailFitError
from herglotz_flow.quadrature import (adaptive_gl, fit_power_tail, gl_panels, invert_on_contour,
                                      log_spaced_edges)


def test_composite_rule_is_exact_on_polynomials():
    nodes, weights = gl_panels([0.0, 0.5, 2.0], order=8)
    assert weights @ nodes**7 == pytest.approx(2.0**8 / 8, rel=1e-14)


def test_adaptive_rule_on_lorentzian_spike():
    eps = 1e-6
    val = adaptive_gl(lambda x: eps / (x * x + eps * eps), -1.0, 1.0, breakpoints=(0.0,), tol=1e-12)
    assert val == pytest.approx(2 * math.atan(1 / eps), abs=1e-10)


def test_unlisted_jump_still_converges():
    val = adaptive_gl(lambda x: (x > 0.3).astype(float), 0.0, 1.0, tol=1e-10)
    assert val == pytest.approx(0.7, abs=1e-10)


def test_reversed_limits_flip_sign():
    f = lambda x: np.cos(x)
    assert adaptive_gl(f, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-13)
    assert adaptive_gl(f, 2.0, 2.0) == 0.0


def test_contour_inversion_recovers_point_mass_with_half_atoms():
    minus_inv = lambda z: -1.0 / z
    assert invert_on_contour(minus_inv, -1.0, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert invert_on_contour(minus_inv, 0.0, 1.0) == pytest.approx(0.5, abs=1e-9)


def test_log_spaced_edges_are_symmetric():
    edges = log_spaced_edges(1e4)
    assert edges[0] == -1e4 and edges[-1] == 1e4 and 0.0 in edges
    assert np.allclose(edges, -np.asarray(edges[::-1]))


def test_power_tail_fit():
    tail, p = fit_power_tail(lambda s: 3.0 / s**2, 1e4)
    assert p == pytest.approx(2.0, abs=1e-10)
    assert tail == pytest.approx(3e-4, rel=1e-10)
    assert fit_power_tail(lambda s: 0.0 * s, 1e4) == (0.0, pytest.approx(math.nan, nan_ok=True))
    with pytest.raises(TailFitError):
        fit_power_tail(lambda s: 1.0 / s, 1e4)


def test_minimum_panel_width_is_reported():
    with pytest.raises(QuadratureError), np.errstate(divide="ignore"):
        adaptive_gl(lambda x: np.abs(x - 1 / 3) ** -1.5, 0.0, 1.0, max_rounds=200)


@given(st.floats(-3, 3), st.floats(0.1, 4), st.integers(0, 12))
def test_adaptive_rule_matches_monomial_antiderivative(a, width, k):
    b = a + width
    exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert adaptive_gl(lambda x: x**k, a, b) == pytest.approx(exact, rel=1e-11, abs=1e-11)
