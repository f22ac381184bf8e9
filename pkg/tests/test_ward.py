import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from thermal_ir import ward
from thermal_ir.diracalg import FourVector, slash
from thermal_ir.params import ThermalParams

Q = FourVector(1.2, 0.1, 0.0, 0.3)
P = FourVector(0.3, 0.2, -0.1, 0.1)
comp = st.floats(-0.5, 0.5)


@given(st.builds(FourVector, st.floats(0.1, 2), comp, comp, comp), st.builds(FourVector, comp, comp, comp, comp))
def test_tree_identity_exact_at_zero_eps(q, p):
    assume(abs(1 - q.sq()) > 0.05 and abs(1 - (q + p).sq()) > 0.05)
    res = ward.ward_111_tree(q, p, 0.0)
    # rounding is set by the size of each inverse propagator, not by pslash
    scale = np.linalg.norm(slash(q)) + np.linalg.norm(slash(p)) + 1
    assert np.linalg.norm(res.lhs - res.rhs) < 1e-13 * scale


def test_tree_identity_linear_in_eps():
    r6 = ward.ward_111_tree(Q, P, 1e-6).rel_residual
    r7 = ward.ward_111_tree(Q, P, 1e-7).rel_residual
    assert r6 < 1e-5
    assert r6 / r7 == pytest.approx(10, rel=0.01)
    with pytest.raises(ValueError):
        ward.ward_111_tree(Q, P, -1.0)


def test_inverse_feynman_singular():
    with pytest.raises(np.linalg.LinAlgError):
        ward.inverse_feynman(FourVector.on_shell([0, 0, 0]), 0.0)


def test_component_identity():
    q = FourVector(1.3, 0.2, 0, 0.1)
    r = ward.component_identity(q, 1e-5)
    assert r.rel_residual < 1e-12
    with pytest.raises(ValueError):
        ward.component_identity(FourVector(-1.0), 1e-5)


def test_one_loop_211():
    res = ward.ward_211_relation(ThermalParams(p3=(0, 0, 0.01)))
    # derived: 0.82 percent, set by ln(beta Lambda) vs ln(beta m)
    assert res.rel_residual == pytest.approx(0.0082, abs=5e-4)


def test_one_loop_211_positive_eps():
    par = ThermalParams(p3=(0, 0, 0.01))
    res = ward.ward_211_relation(par, continued=False)
    assert res.rel_residual < 1e-3


def test_zero_residual_for_zero_scale():
    z = np.zeros((4, 4))
    assert ward.WardResidual(z, z).rel_residual == 0.0
