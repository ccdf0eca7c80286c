import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herglotz_flow.measures import (Atom, CantorComponent, MeasureSpec, cantor_cdf,
                                    fat_cantor_density, fat_cantor_gaps, fat_cantor_k_point,
                                    measure_of_interval, uniform, weight_integral)

DELTA0 = MeasureSpec(atoms=(Atom(0.0, 1.0),))
UNIFORM = MeasureSpec(ac=(uniform(0.0, 1.0),))
CANTOR = MeasureSpec(cantor=(CantorComponent(0.0, 1.0),))


def test_weight_integral_of_point_mass_at_origin():
    assert weight_integral(DELTA0) == pytest.approx(1.0, abs=1e-15)


def test_weight_integral_of_uniform_is_arctan_one():
    assert weight_integral(UNIFORM) == pytest.approx(math.pi / 4, abs=1e-13)


def test_weight_integral_of_cantor_is_reproducible_and_bounded():
    first = weight_integral(CANTOR)
    assert 0.5 < first < 1.0
    assert weight_integral(MeasureSpec(cantor=(CantorComponent(0.0, 1.0),))) == first


def test_cantor_interval_masses():
    # float(1/3) lies just left of the endpoint, where F drops like delta**0.63
    assert measure_of_interval(CANTOR, 0.0, 1 / 3) == pytest.approx(0.5, abs=1e-10)
    assert measure_of_interval(CANTOR, 0.0, 0.34) == pytest.approx(0.5, abs=1e-12)
    assert measure_of_interval(CANTOR, 0.34, 0.66) == pytest.approx(0.0, abs=1e-12)
    assert cantor_cdf(CANTOR.cantor[0], 0.5) == pytest.approx(0.5, abs=1e-12)


def test_half_atom_convention_at_endpoint():
    assert measure_of_interval(DELTA0, 0.0, 1.0) == 0.0
    assert measure_of_interval(DELTA0, 0.0, 1.0, "half_atom") == 0.5


def test_fat_cantor_removes_half_and_is_dense_in_gap():
    piece = fat_cantor_density(0.5)
    assert piece.mass == pytest.approx(0.5, abs=1e-12)
    assert piece.density_at(0.5) == 1.0
    assert fat_cantor_gaps(0.5, 1) == [(0.375, 0.625)]


def test_fat_cantor_k_points_avoid_gaps():
    piece = fat_cantor_density(0.5)
    for path in ("L", "RR", "LRLLR"):
        assert piece.density_at(fat_cantor_k_point(0.5, path)) == 0.0
    with pytest.raises(ValueError):
        fat_cantor_k_point(0.5, "LX")


def test_rejects_bad_components():
    with pytest.raises(ValueError):
        Atom(0.0, 0.0)
    with pytest.raises(ValueError):
        uniform(1.0, 0.0)


def test_json_round_trip():
    mu = MeasureSpec(atoms=(Atom(2.0, 0.3),), ac=(uniform(0.0, 1.0),),
                     cantor=(CantorComponent(3.0, 4.0),))
    assert MeasureSpec.from_json(mu.to_json()) == mu


cuts = st.floats(-2.0, 5.0, allow_nan=False)
MIXED = MeasureSpec(atoms=(Atom(2.0, 0.3), Atom(0.5, 0.1)), ac=(uniform(0.0, 1.0),),
                    cantor=(CantorComponent(3.0, 4.0),))


@given(cuts, cuts, cuts)
def test_interval_masses_add(a, b, c):
    lo, mid, hi = sorted((a, b, c))
    if not lo < mid < hi:
        return
    whole = measure_of_interval(MIXED, lo, hi, "half_atom")
    parts = (measure_of_interval(MIXED, lo, mid, "half_atom")
             + measure_of_interval(MIXED, mid, hi, "half_atom"))
    assert whole == pytest.approx(parts, abs=1e-12)


@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=20))
def test_cantor_cdf_is_monotone(xs):
    xs = np.sort(np.asarray(xs))
    vals = np.asarray(cantor_cdf(CANTOR.cantor[0], xs), dtype=float)
    assert np.all(np.diff(vals) >= -1e-15)


@given(st.floats(0.0, 1.0))
def test_cantor_cdf_is_symmetric(x):
    c = CANTOR.cantor[0]
    # rounding in 1 - x moves F by up to (1e-16)**0.63
    assert float(cantor_cdf(c, x)) + float(cantor_cdf(c, 1.0 - x)) == pytest.approx(1.0, abs=1e-9)
