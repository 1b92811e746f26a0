import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coilcontact.coefficients import (
    WORKING_RANGE,
    el_operator,
    make_custom,
    make_rod,
    make_rod_from_load,
    make_simple,
    validate_derivatives,
)
from coilcontact.errors import EvaluationRange, NonPositiveRadius

RUN_ALPHA = 1.0 / (2.0 * math.pi)


def test_simple_model_values():
    m = make_simple()
    assert m.a(0.0) == 0.5
    assert m.a(37.2) == 0.5
    assert m.da(1.5) == 0.0
    assert m.b(0.0) == 0.5
    assert m.b(1.0) == 2.0
    assert m.db(0.0) == 1.0
    assert m.db(-1.0) == 0.0
    assert m.a0 == 0.5


def test_simple_model_array_evaluation():
    m = make_simple()
    u = np.array([-1.0, 0.0, 2.0])
    assert np.array_equal(m.a(u), np.array([0.5, 0.5, 0.5]))
    assert np.array_equal(m.b(u), np.array([0.0, 0.5, 4.5]))
    assert np.array_equal(m.db(u), np.array([0.0, 1.0, 3.0]))


def test_rod_model_frozen_values_at_zero():
    m = make_rod(r=1.0, alpha=RUN_ALPHA)
    assert m.a(0.0) == pytest.approx(0.025330295910584444, abs=1e-15)
    assert m.da(0.0) == 0.0
    assert m.b(0.0) == pytest.approx(0.8408450569081046, abs=1e-15)
    assert m.db(0.0) == pytest.approx(0.15915494309189535, abs=1e-15)


def test_rod_model_frozen_values_off_axis():
    m = make_rod(r=1.0, alpha=RUN_ALPHA)
    assert m.a(0.7) == pytest.approx(0.009347050568057156, rel=1e-14)
    assert m.da(0.7) == pytest.approx(-0.021956159052483253, rel=1e-14)
    assert m.b(0.7) == pytest.approx(0.48193450457585707, rel=1e-14)
    assert m.db(0.7) == pytest.approx(-0.687407624275019, rel=1e-14)


def test_rod_coercivity_floor():
    m = make_rod(r=1.0, alpha=RUN_ALPHA)
    # floor sits at the edge of the working range since a decays in |u|
    assert m.a0 == pytest.approx(2.533029591052112e-32, rel=1e-13)
    assert m.a(WORKING_RANGE) == pytest.approx(m.a0, rel=1e-12)
    for u in (-1e6, -300.0, -10.0, 0.0, 5.0, 9.99, 1e5):
        assert m.a(u) >= m.a0


def test_rod_a_is_even_and_b_bounded_below():
    m = make_rod(r=1.0, alpha=RUN_ALPHA)
    u = np.linspace(-8, 8, 401)
    assert np.allclose(m.a(u), m.a(-u), rtol=0, atol=1e-18)
    # b(u) -> -alpha * 2u / ... no: as u -> -inf the (sqrt(1+u^2)-u) factor
    # grows like 2|u| while the 1/sqrt weight shrinks, so b -> -2 alpha ... check
    assert np.all(m.b(u) > -2.0 * RUN_ALPHA - 1e-12)
    # and b tends to -alpha * 2 = -1/pi from above far on the negative side
    assert m.b(-1e5) == pytest.approx(-2.0 * RUN_ALPHA, abs=1e-4)


def test_rod_from_load_matches_alpha():
    direct = make_rod(r=2.0, alpha=0.3)
    loaded = make_rod_from_load(r=2.0, M=0.3, B=1.0)
    u = np.linspace(-2, 2, 11)
    assert np.allclose(direct.b(u), loaded.b(u), atol=1e-15)
    assert np.allclose(direct.a(u), loaded.a(u), atol=1e-15)


def test_nonpositive_radius_rejected():
    with pytest.raises(NonPositiveRadius):
        make_rod(r=0.0, alpha=0.5)
    with pytest.raises(NonPositiveRadius):
        make_rod(r=-1.0, alpha=0.5)
    with pytest.raises(NonPositiveRadius):
        make_rod_from_load(r=1.0, M=1.0, B=0.0)


def test_working_range_guard():
    m = make_simple()
    with pytest.raises(EvaluationRange):
        m.a(2e6)
    with pytest.raises(EvaluationRange):
        m.b(np.array([0.0, -3e6]))


def test_el_operator_simple_model():
    m = make_simple()
    # -2*(1/2)*u'' - 0 + (u+1): at u=2, u''=1 -> -1 + 3 = 2
    assert el_operator(m, 2.0, 5.0, 1.0) == pytest.approx(2.0)
    u = np.array([0.0, 1.0])
    up = np.array([1.0, 1.0])
    upp = np.array([0.0, -1.0])
    assert np.allclose(el_operator(m, u, up, upp), np.array([1.0, 3.0]))


@given(
    u=st.floats(-3, 3),
    up=st.floats(-5, 5),
    upp=st.floats(-5, 5),
)
@settings(max_examples=100, deadline=None)
def test_el_operator_matches_componentwise_formula(u, up, upp):
    m = make_rod(r=1.0, alpha=RUN_ALPHA)
    got = el_operator(m, u, up, upp)
    want = -2.0 * m.a(u) * upp - m.da(u) * up * up + m.db(u)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize(
    "model",
    [make_simple(), make_rod(r=1.0, alpha=RUN_ALPHA), make_rod(r=0.7, alpha=1.3)],
    ids=["simple", "rod-run", "rod-steep"],
)
def test_derivative_validation_passes(model):
    grid = np.linspace(-4.0, 4.0, 81)
    report = validate_derivatives(model, grid)
    assert report.passed, report.worst()


def test_derivative_validation_catches_wrong_db():
    m = make_simple()
    broken = make_custom(
        a=m.a, da=m.da, b=m.b, db=lambda u: np.asarray(u) + 1.1, a0=0.5
    )
    report = validate_derivatives(broken, np.linspace(-2, 2, 41))
    assert not report.passed
    assert report.worst() > 1e-2


def test_custom_model_requires_positive_floor():
    with pytest.raises(ValueError):
        make_custom(
            a=lambda u: 1.0, da=lambda u: 0.0, b=lambda u: 0.0, db=lambda u: 0.0, a0=0.0
        )
