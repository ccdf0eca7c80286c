import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herglotz_flow import fixtures as fx
from herglotz_flow.averaging import (FlowedHerglotz, InvariantSets, average_over_t, crossing_times,
                                     extension_average, extension_family, flow_state, global_average,
                                     integrate_xi_contour, integrate_xi_global, part_average, part_rows,
                                     printed_global_density, reparametrization_residual, verify_mz)
from herglotz_flow.errors import PreconditionError
from herglotz_flow.measures import measure_of_interval
from herglotz_flow.sl2 import BOOST, ROTATION, UNIPOTENT, CaseTag, LieElement

DELTA0 = fx.scalar_delta0()
CONST_I = fx.constant_i()
INF = math.inf


def test_point_mass_is_carried_along_by_the_unipotent_flow():
    state = flow_state(UNIPOTENT, DELTA0, 1.5, [(1.0, 2.0), (-1.0, 1.0)])
    assert state.mass((1.0, 2.0)) == pytest.approx(1.0, abs=1e-8)
    assert state.mass((-1.0, 1.0)) == pytest.approx(0.0, abs=1e-8)
    assert state.A_t == 0.0


def test_rotation_fixes_the_constant_i():
    state = flow_state(ROTATION, CONST_I, 0.8, [(0.0, 1.0)])
    assert state.mass((0.0, 1.0)) == pytest.approx(1 / math.pi, abs=1e-8)
    assert state.B_t == pytest.approx(0.0, abs=1e-15)


def test_rotation_of_the_identity_creates_an_atom():
    # (cos t z - sin t)/(sin t z + cos t) has a pole at -cot t with residue csc^2 t
    state = flow_state(ROTATION, fx.identity_z(), math.pi / 4, [(-1.5, -0.5), (0.0, 2.0)])
    assert state.mass((-1.5, -0.5)) == pytest.approx(2.0, abs=1e-8)
    assert state.mass((0.0, 2.0)) == pytest.approx(0.0, abs=1e-8)
    assert flow_state(ROTATION, fx.identity_z(), 0.0, [(0.0, 1.0)]).A_t == pytest.approx(1.0, abs=1e-8)


def test_average_examples():
    assert average_over_t(UNIPOTENT, DELTA0, (0.0, 3.0), 0.0, 2.0) == pytest.approx(2.0, abs=1e-8)
    assert average_over_t(ROTATION, CONST_I, (-1.0, 1.5), 0.2, 1.7) == pytest.approx(
        1.5 * 2.5 / math.pi, abs=1e-8)
    assert average_over_t(UNIPOTENT, DELTA0, (0.0, 3.0), 1.0, 1.0) == 0.0


def test_average_matches_xi_examples():
    res = verify_mz(ROTATION, CONST_I, (0.0, 2.0), -1.0, 1.0)
    assert res.lhs == pytest.approx(4 / math.pi, abs=1e-8) and res.residual <= 1e-8
    res = verify_mz(UNIPOTENT, DELTA0, (0.0, 3.0), -1.0, 2.0)
    assert res.lhs == pytest.approx(2.0, abs=1e-6) and res.residual <= 1e-6
    res = verify_mz(UNIPOTENT, fx.two_level(), (0.0, 3.0), 0.0, 2.0, method="pointwise")
    assert res.lhs == pytest.approx(math.sqrt(2), abs=1e-6) and res.passed
    with pytest.raises(ValueError):
        verify_mz(UNIPOTENT, DELTA0, (0.0, 1.0), 0.0, 1.0, method="nope")


def test_crossing_times_for_point_mass():
    # mu_t = delta_t, so the edge 1.5 is crossed at t = 1.5 and the atom at 0 at t = 0
    assert crossing_times(UNIPOTENT, DELTA0, (0.0, 1.5), -1.0, 2.0) == pytest.approx([0.0, 1.5])


def test_global_average_examples():
    res = global_average(UNIPOTENT, DELTA0, (0.0, 3.0))
    assert res.case is CaseTag.CASE_II
    assert res.value == pytest.approx(3.0, abs=1e-3)
    res = global_average(ROTATION, fx.identity_z(), (-2.0, 3.0))
    assert res.case is CaseTag.CASE_I and res.value == pytest.approx(5.0, abs=1e-6)
    res = global_average(BOOST, CONST_I, (0.0, 2.0))
    assert res.case is CaseTag.CASE_III and res.value == pytest.approx(1.0, abs=1e-6)
    assert integrate_xi_global(BOOST, CONST_I, (0.0, 2.0)) == pytest.approx(1.0, abs=1e-6)


def test_printed_boost_density_disagrees():
    printed = printed_global_density(BOOST, CONST_I, (0.0, 1.0))
    assert printed == pytest.approx(2 * math.atan(math.pi / 2) / math.pi, abs=1e-6)


def test_part_rows_for_declared_sets():
    rows = part_rows(ROTATION, fx.identity_z(), (-1.0, 2.0), None, None, fx.DECLARED_SETS["identity_z"])
    assert rows == pytest.approx({"ac": 0.0, "sc": 0.0, "pp": 3.0}, abs=1e-6)
    rows = part_rows(ROTATION, CONST_I, (-1.0, 2.0), 0.0, 1.0, fx.DECLARED_SETS["constant_i"])
    assert rows == pytest.approx({"ac": 3 / math.pi, "sc": 0.0, "pp": 0.0}, abs=1e-8)
    rows = part_rows(UNIPOTENT, fx.uniform_plus_atom(), (-3.0, 3.0), None, None,
                     fx.DECLARED_SETS["uniform_plus_atom"])
    assert rows["ac"] == pytest.approx(1.0, abs=1e-3)
    assert rows["pp"] == pytest.approx(5.0, abs=1e-3)
    assert rows["sc"] == 0.0
    with pytest.raises(PreconditionError):
        part_average(UNIPOTENT, DELTA0, (0.0, 1.0), 0.0, 1.0, "ac", None)
    with pytest.raises(ValueError):
        InvariantSets().pieces("xx", (0.0, 1.0))


def test_extension_family_examples():
    fam = extension_family(DELTA0)
    z = np.array([0.3 + 0.6j])
    assert fam.N(z) == pytest.approx(-1 / z, rel=1e-14)
    assert fam.nu.atoms[0].weight == 1.0
    for make in (fx.scalar_delta0, fx.two_level, fx.uniform01):
        assert float(extension_family(make()).N(np.array([1j]))[0].real) == pytest.approx(0.0, abs=1e-12)
    res = extension_average(extension_family(fx.two_level()), (0.0, 3.0))
    assert res.value == pytest.approx(3.0, abs=1e-3)
    assert res.printed_normalization == pytest.approx(3.0 / math.pi, abs=1e-3)
    assert reparametrization_residual(fam, [1j, 2 + 0.1j]) <= 1e-12
    with pytest.raises(PreconditionError):
        extension_family(fx.cantor())


def test_flow_needs_a_nonzero_lower_left_generator():
    with pytest.raises(PreconditionError):
        verify_mz(LieElement(1.0, 0.0, 0.0), DELTA0, (0.0, 1.0), 0.0, 1.0)


heavy = settings(max_examples=15)
edges = st.floats(-2.5, 3.5)


@heavy
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_flow_is_a_dynamical_system(s, t):
    intervals = [(-1.3, 0.4), (0.7, 2.9)]
    M0 = fx.two_level()
    direct = flow_state(UNIPOTENT, M0, s + t, intervals)
    stepped = flow_state(UNIPOTENT, FlowedHerglotz(UNIPOTENT, t, M0), s, intervals)
    for iv in intervals:
        assert direct.mass(iv) == pytest.approx(stepped.mass(iv), abs=1e-8)


@heavy
@given(edges, st.floats(0.1, 3.0), st.floats(-2.0, 0.0), st.floats(0.1, 2.0))
def test_averaged_measure_has_the_xi_density(lo, width, t1, t2):
    for X, M0 in ((UNIPOTENT, fx.two_level()), (ROTATION, CONST_I), (UNIPOTENT, fx.uniform01())):
        interval = (lo, lo + width)
        lhs = average_over_t(X, M0, interval, t1, t2)
        assert lhs == pytest.approx(integrate_xi_contour(X, M0, interval, t1, t2), abs=1e-6)


@heavy
@given(st.sampled_from([(0.1, 0.6), (-1.0, 0.5), (1.5, 2.5), (2.5, 3.5), (-0.5, 4.5)]),
       st.floats(1e-7, 1e-4))
def test_masses_are_continuous_at_zero(interval, t):
    M0 = fx.mixed()
    moved = flow_state(UNIPOTENT, M0, t, [interval]).mass(interval)
    assert moved == pytest.approx(measure_of_interval(M0.mu, *interval), abs=1e-3)


@heavy
@given(st.floats(-3.0, 0.5), st.floats(0.2, 3.0), st.floats(-1.0, 0.0), st.floats(0.2, 1.5))
def test_part_rows_add_up(lo, width, t1, t2):
    M0 = fx.uniform_plus_atom()
    interval = (lo, lo + width)
    rows = part_rows(UNIPOTENT, M0, interval, t1, t2, fx.DECLARED_SETS["uniform_plus_atom"])
    total = average_over_t(UNIPOTENT, M0, interval, t1, t2)
    assert sum(rows.values()) == pytest.approx(total, abs=1e-8)
