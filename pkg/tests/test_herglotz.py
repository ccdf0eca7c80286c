import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herglotz_flow import fixtures as fx
from herglotz_flow.errors import DomainError, PreconditionError
from herglotz_flow.herglotz import (ConstantHerglotz, EpsSchedule, HerglotzRep, atom_limits,
                                    atom_mass, boundary_value, coefficient_A, coefficient_B,
                                    herglotz_from_json, normal_derivative, stieltjes_invert,
                                    stieltjes_invert_direct)
from herglotz_flow.measures import MeasureSpec, measure_of_interval

DELTA0 = fx.scalar_delta0()
UNIFORM = fx.uniform01()


def test_point_mass_transform_at_i():
    assert complex(DELTA0(np.array([1j]))[0]) == pytest.approx(1j, abs=1e-15)


def test_linear_plus_constant_at_i():
    M = HerglotzRep(1.0, 2.0, MeasureSpec())
    assert complex(M(np.array([1j]))[0]) == pytest.approx(2 + 1j, abs=1e-15)


def test_uniform_transform_at_i():
    # the normalising shift cancels Re, leaving i * arctan(1)
    M = HerglotzRep(0.0, 0.0, UNIFORM.mu)
    assert complex(M(np.array([1j]))[0]) == pytest.approx(1j * math.pi / 4, abs=1e-13)


def test_evaluation_refuses_the_lower_half_plane():
    with pytest.raises(DomainError):
        DELTA0(np.array([1.0 - 1j]))


def test_boundary_value_inside_uniform_support():
    bv = boundary_value(HerglotzRep(0.0, 0.0, UNIFORM.mu), 0.5)
    assert bv.converged
    assert bv.value == pytest.approx(complex(-0.5 * math.log(2), math.pi), abs=1e-6)
    # the plain transform drops the shift: principal value 0 at the midpoint
    assert boundary_value(UNIFORM, 0.5).value == pytest.approx(1j * math.pi, abs=1e-6)


def test_boundary_value_of_point_mass():
    bv = boundary_value(DELTA0, 1.0)
    assert bv.converged and bv.value == pytest.approx(-1.0, abs=1e-8)
    assert not boundary_value(DELTA0, 0.0).converged


def test_stieltjes_inversion_examples():
    assert stieltjes_invert(DELTA0, 0.0, 1.0) == pytest.approx(0.5, abs=1e-8)
    assert stieltjes_invert(UNIFORM, 0.25, 0.75) == pytest.approx(0.5, abs=1e-8)
    assert stieltjes_invert(DELTA0, -1.0, 1.0) == pytest.approx(1.0, abs=1e-8)


def test_direct_inversion_route_agrees():
    M = fx.delta2()
    direct = stieltjes_invert_direct(M, 1.5, 2.5, 1e-7, atoms=(2.0,))
    assert direct == pytest.approx(stieltjes_invert(M, 1.5, 2.5), abs=1e-6)


def test_atom_masses():
    M = fx.delta2()
    assert atom_mass(M, 2.0) == pytest.approx(0.3, abs=1e-8)
    assert atom_mass(M, 0.5) == pytest.approx(0.0, abs=1e-8)
    assert atom_mass(DELTA0, 0.0) == pytest.approx(1.0, abs=1e-12)
    im_lim, re_lim = atom_limits(M, 2.0)
    assert abs(re_lim) < 1e-8


def test_normal_derivative_off_support():
    assert normal_derivative(DELTA0, 1.0) == pytest.approx((-1.0, 1.0), abs=1e-6)
    assert normal_derivative(DELTA0, 2.0) == pytest.approx((-0.5, 0.25), abs=1e-6)
    with pytest.raises(PreconditionError):
        normal_derivative(UNIFORM, 0.5)


def test_coefficients():
    assert coefficient_A(HerglotzRep(1.0, 2.0)) == pytest.approx(1.0, abs=1e-9)
    assert coefficient_B(HerglotzRep(1.0, 2.0)) == pytest.approx(2.0, abs=1e-15)
    assert coefficient_A(DELTA0) == pytest.approx(0.0, abs=1e-9)
    assert coefficient_B(DELTA0) == pytest.approx(0.0, abs=1e-15)
    assert coefficient_A(fx.constant_i()) == 0.0
    assert coefficient_B(fx.constant_i()) == 0.0


def test_schedule_grid_is_descending_geometric():
    grid = EpsSchedule().grid()
    assert grid[0] == 1e-2 and grid[-1] == pytest.approx(1e-8)
    assert np.allclose(grid[1:] / grid[:-1], 10 ** -0.125)
    with pytest.raises(ValueError):
        EpsSchedule(eps_min=1.0, eps_max=0.1)


def test_json_round_trips():
    M = fx.mixed()
    assert herglotz_from_json(M.to_json()) == M
    assert herglotz_from_json(ConstantHerglotz(2j).to_json()) == ConstantHerglotz(2j)


upper = st.tuples(st.floats(-20, 20), st.floats(1e-6, 20)).map(lambda p: complex(*p))


@pytest.mark.parametrize("name", ["scalar_delta0", "uniform01", "cantor", "delta2", "mixed",
                                  "identity_z", "constant_i"])
@given(z=upper)
def test_upper_half_plane_maps_into_itself(name, z):
    M = fx.FIXTURES[name]()
    assert complex(np.asarray(M(np.array([z])))[0]).imag > 0


@given(z=upper)
def test_reflection_symmetry_of_the_continuation(z):
    # M(conj z) = conj M(z): evaluate the Stieltjes sum at the reflected point directly
    mu = fx.mixed().mu
    assert complex(mu.stieltjes(np.array([z.conjugate()]))[0]) == pytest.approx(
        complex(mu.stieltjes(np.array([z]))[0]).conjugate(), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("lo, hi", [(-1.0, 2.0), (2.0, 3.0), (0.0, 0.5), (0.25, 1.0), (1.5, 3.5)])
def test_inversion_matches_half_atom_masses(lo, hi):
    M = fx.mixed()
    assert stieltjes_invert(M, lo, hi) == pytest.approx(
        measure_of_interval(M.mu, lo, hi, "half_atom"), abs=1e-6)
