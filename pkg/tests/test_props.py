import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermal_ir.diracalg import FourVector
from thermal_ir.props import (
    M_matrix,
    PropComponent,
    bose_n,
    bose_n_subtracted,
    electron_component_residual,
    electron_D,
    electron_from_M,
    photon_D,
)

C = PropComponent


def test_bose_values():
    assert np.isclose(bose_n(np.log(2.0), 1.0), 1.0)
    with pytest.raises(ValueError):
        bose_n(0.0, 1.0)
    with pytest.raises(ValueError):
        bose_n(1.0, -1.0)


@given(st.floats(1e-8, 30))
def test_bose_subtracted_matches_direct(x):
    direct = 1 / np.expm1(x) - 1 / x
    assert np.isclose(bose_n_subtracted(x, 1.0), direct, rtol=1e-6, atol=1e-9)


def test_bose_subtracted_small_argument_limit():
    assert np.isclose(bose_n_subtracted(1e-12, 1.0), -0.5)


@given(st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3), st.floats(0.05, 3))
def test_photon_components_sum_rule(k0, kmag):
    # D11 + D22 = D12 + D21 in the delta(k^2) sector, pole parts cancel
    k = FourVector(k0, 0, 0, kmag)
    d = {c: photon_D(c, k, 2.0) for c in C}
    assert d[C.C11].regular + d[C.C22].regular == 0
    lhs = d[C.C11].delta_coefficient() + d[C.C22].delta_coefficient()
    rhs = d[C.C12].delta_coefficient() + d[C.C21].delta_coefficient()
    assert np.isclose(lhs, rhs)


def test_photon_rejects_zero_energy():
    with pytest.raises(ValueError):
        photon_D(C.C21, FourVector(0.0, 0, 0, 1), 1.0)


def test_M_matrix_entries():
    assert np.array_equal(M_matrix(1.0), [[1, 0], [1, 1]])
    assert np.array_equal(M_matrix(-1.0), [[1, -1], [0, 1]])


@given(st.floats(0.2, 3), st.floats(-1, 1), st.sampled_from([1e-3, 1e-4]))
def test_electron_components_from_M(k0, kz, eps):
    k = FourVector(k0, 0.1, 0, kz)
    built = electron_from_M(k, eps)
    for c in (C.C11, C.C22):
        assert np.allclose(built[c], electron_D(c, k, eps))


@given(st.floats(0.01, 3), st.floats(-1, 1))
def test_component_sum_rule_exact_for_positive_energy(k0, kz):
    k = FourVector(k0, 0.3, 0, kz)
    scale = np.linalg.norm(electron_D(C.C11, k, 1e-4))
    assert np.linalg.norm(electron_component_residual(k, 1e-4)) <= 1e-12 * scale


def test_component_residual_linear_in_eps_off_shell():
    k = FourVector(-1.5, 0.2, 0, 0.4)
    eps = np.array([1e-3, 1e-4, 1e-5])
    res = [np.abs(electron_component_residual(k, e)).max() for e in eps]
    slope = np.polyfit(np.log(eps), np.log(res), 1)[0]
    assert abs(slope - 1) < 1e-3


def test_electron_requires_positive_eps():
    with pytest.raises(ValueError):
        electron_D(C.C11, FourVector(1.0), 0.0)
