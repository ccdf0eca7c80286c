import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herglotz_flow import fixtures as fx
from herglotz_flow.classify import (CANTOR_DIMENSION, ClassKind, Thresholds, cantor_typical_points,
                                    cdf_scaling_exponent, classify_point, fat_cantor_counterexample,
                                    invariance_check, kappa_continuity_check, random_group_element,
                                    scaling_exponent)
from herglotz_flow.errors import PreconditionError
from herglotz_flow.sl2 import IDENTITY, ROTATION, UNIPOTENT, GroupElement, exponential

UNIFORM = fx.uniform01()
DELTA2 = fx.delta2()
CANTOR = fx.cantor()


def test_example_points():
    assert classify_point(UNIFORM, 0.5).kind is ClassKind.AC
    atom = classify_point(DELTA2, 2.0)
    assert atom.kind is ClassKind.PP and atom.evidence["eps_im"] == pytest.approx(0.3, abs=1e-6)
    cantor = classify_point(CANTOR, 0.25)
    assert cantor.kind is ClassKind.SC
    assert cantor.evidence["kappa_hat"] == pytest.approx(0.63, abs=0.05)


def test_off_support_points_are_point_like():
    res = classify_point(UNIFORM, 3.0)
    assert res.kind is ClassKind.PP and res.evidence["normal_derivative"]


def test_point_report_json():
    doc = classify_point(UNIFORM, 0.5).to_json(0.5)
    assert doc["class"] == "ac" and doc["lambda"] == 0.5


def test_invariance_examples():
    assert invariance_check(DELTA2, GroupElement(1.0, 0.0, 1.0, 1.0), [2.0]).rows == ((2.0, "pp", "pp"),)
    assert invariance_check(UNIFORM, exponential(ROTATION, math.pi / 4), [0.5]).rows == ((0.5, "ac", "ac"),)
    rep = invariance_check(fx.mixed(), IDENTITY, [0.5, 2.0, 3.25])
    assert rep.passed and rep.agreements == 3


def test_scaling_examples():
    assert scaling_exponent(UNIFORM, 0.5).kappa_hat == pytest.approx(1.0, abs=0.02)
    assert scaling_exponent(DELTA2, 2.0).kappa_hat == pytest.approx(0.0, abs=0.02)
    with pytest.raises(PreconditionError):
        scaling_exponent(UNIFORM, 0.5, (1e-12, 1e-2))


def test_cantor_scaling_at_typical_points(rng):
    component = CANTOR.mu.cantor[0]
    for lam in cantor_typical_points(rng, 5):
        est = scaling_exponent(CANTOR, lam)
        assert est.fit_ok
        assert est.kappa_hat == pytest.approx(CANTOR_DIMENSION, abs=0.05)
        assert cdf_scaling_exponent(component, lam) == pytest.approx(CANTOR_DIMENSION, abs=0.05)


def test_kappa_continuity_examples():
    rows = kappa_continuity_check(UNIPOTENT, CANTOR, 1.0, [0.25], 0.63)
    assert all(r.passed for r in rows)
    with pytest.raises(PreconditionError):
        kappa_continuity_check(UNIPOTENT, CANTOR, 0.0, [0.25], 0.63)
    assert all(r.passed for r in kappa_continuity_check(UNIPOTENT, UNIFORM, 1.0, [0.3, 0.7], 1.0))


def test_fat_cantor_examples():
    rep = fat_cantor_counterexample(0.5)
    assert rep.passed
    assert rep.k_measure == pytest.approx(0.5, abs=1e-12)
    assert rep.gap_midpoint_class is ClassKind.AC
    # at the edge 3/8 of the first gap the density jumps from 0 to 1, so Im M
    # tends to pi/2 there; the decay to 0 holds at interior points of K
    im = float(np.asarray(fx.fat_cantor()(np.array([0.375 + 1e-6j])))[0].imag)
    assert im == pytest.approx(math.pi / 2, abs=1e-2)
    assert max(rep.im_values) < 1e-2
    with pytest.raises(PreconditionError):
        fat_cantor_counterexample(1.5)


def test_reflected_window_is_fractional():
    th = Thresholds()
    assert th.fractional(0.63) and th.fractional(2 - 0.63)
    assert not th.fractional(1.0) and not th.fractional(0.0)


def test_mixed_fixture_is_classified_without_mistakes():
    M = fx.mixed()
    wrong = [(lam, label) for lam, label in fx.MIXED_LABELS if classify_point(M, lam).kind.value != label]
    assert wrong == []


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1), st.sampled_from([lam for lam, _ in fx.MIXED_LABELS]))
def test_classes_survive_moebius_maps(seed, lam):
    G = random_group_element(np.random.default_rng(seed))
    assert invariance_check(fx.mixed(), G, [lam]).disagreements == 0


@settings(max_examples=10)
@given(st.floats(0.3, 2.0))
def test_flowed_uniform_has_only_one_atom_off_its_support(t):
    # M0 = log((lam - 1)/lam) off [0, 1]; 1 + t M0 vanishes once, at lam* > 1
    from herglotz_flow.averaging import flow_state
    lam_star = 1.0 / (1.0 - math.exp(-1.0 / t))
    weight = lam_star * (lam_star - 1.0) / t**2
    state = flow_state(UNIPOTENT, UNIFORM, t, [(-3.0, -0.01), (1.01, 10.0), (0.0, 1.0)])
    assert state.mass((-3.0, -0.01)) == pytest.approx(0.0, abs=1e-6)
    assert state.mass((1.01, 10.0)) == pytest.approx(weight, abs=1e-6)
    assert state.mass((0.0, 1.0)) == pytest.approx(1.0 - weight, abs=1e-6)
