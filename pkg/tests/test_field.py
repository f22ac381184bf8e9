import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from thermal_ir import field
from thermal_ir.params import SchemeTag, ThermalParams

LAM = ThermalParams(lambda0=1e-6, lambda_w=1e-9)


@given(st.floats(1.0, 100.0))
def test_tree_synthesis(r):
    assert field.tree_synthesis(r) == pytest.approx(field.coulomb_tree(r), rel=1e-6)


@given(st.floats(0.05, 5.0), st.floats(1.0, 50.0))
def test_gaussian_sine_transform_is_erf(c, r):
    ratio = field.sine_ratio(lambda p: math.exp(-c * p * p), r)
    assert ratio == pytest.approx(special.erf(r / (2 * math.sqrt(c))), abs=1e-9)


def test_sine_ratio_rejects_bad_r():
    with pytest.raises(ValueError):
        field.sine_ratio(lambda p: 1.0, 0.0)


def test_source_model():
    src = field.SourceModel(0.01)
    assert src.normalization() == pytest.approx(1.0, rel=1e-10)
    assert src.form_factor(0.0) == 1.0
    assert src.form_factor(100.0) == pytest.approx(math.exp(-0.5))
    with pytest.raises(ValueError):
        field.SourceModel(-1.0)


def test_exponent_at_rest_matches_small_p():
    p = 1e-3
    ex = float(field.exponent_at_rest(p, LAM))
    c = field.small_p_coefficient(LAM)
    # the small-p form keeps only the singular logs, which moves it by
    # (gamma - ln 2 pi) / L ~ 6e-4
    assert ex == pytest.approx(-c * p * p, rel=1e-3)
    assert float(field.exponent_at_rest(0.0, LAM)) == pytest.approx(0.0, abs=1e-15)


def test_full_model_continuous_at_cut():
    S = field.suppression_factor(LAM, "full")
    h = 1e-7
    assert S(field.P_CUT - h) == pytest.approx(S(field.P_CUT + h), rel=1e-6)
    with pytest.raises(ValueError):
        field.suppression_factor(LAM, "other")


def test_suppression_ratio_frozen():
    par = ThermalParams(lambda0=1e-7, lambda_w=1e-10)
    sup = field.suppression_ratio(10.0, par)
    assert sup.ratio == pytest.approx(0.9276149937612, rel=1e-9)
    assert sup.ratio == pytest.approx(sup.closed_form, abs=1e-9)


def test_suppression_trend_in_lambda0():
    # smaller lambda0: stronger suppression, ln(1 - ratio) grows
    deficits = [field.suppression_ratio(100.0, ThermalParams(lambda0=x * 1e-3, lambda_w=x * 1e-6)).log_deficit for x in (1e-2, 1e-3, 1e-4)]
    assert deficits[0] < deficits[1] < deficits[2]
    assert deficits[2] == pytest.approx(-164.5, abs=0.1)


def test_effective_potential_epsilon_scheme_vanishes():
    for r in (1.0, 10.0, 100.0):
        assert field.effective_potential(r, SchemeTag.EPSILON, ThermalParams()) == 0.0


def test_effective_potential_lambda_scheme_below_tree():
    r = 10.0
    a0 = field.effective_potential(r, SchemeTag.LAMBDA, LAM)
    tree = field.coulomb_tree(r, LAM.e)
    assert 0 < a0 < tree


def test_source_width_insensitivity():
    a = field.effective_potential(10.0, "Lambda", LAM, field.SourceModel(0.01))
    b = field.effective_potential(10.0, "Lambda", LAM, field.SourceModel(0.005))
    assert abs(a / b - 1) < 1e-8


def test_effective_potential_guards():
    with pytest.raises(ValueError):
        field.effective_potential(0.5, SchemeTag.LAMBDA, LAM)
    assert field.effective_potential(10.0, SchemeTag.LAMBDA, LAM.with_(e=0.0)) == 0.0


def test_radial_profile_csv(tmp_path):
    prof = field.radial_profile([1.0, 10.0], SchemeTag.EPSILON, ThermalParams())
    path = prof.to_csv(tmp_path / "f.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "r_m,A0_over_em,scheme,lambda0_beta"
    assert lines[1].startswith("1,0.000000000000e+00,Epsilon,")
    with pytest.raises(ValueError):
        field.RadialProfile(np.array([-1.0]), np.array([0.0]), "Epsilon", 1e-3)
    with pytest.raises(ValueError):
        field.RadialProfile(np.array([1.0]), np.array([np.nan]), "Epsilon", 1e-3)
