import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermal_ir.diracalg import (
    GAMMA5,
    IDENTITY,
    MASS,
    METRIC,
    FourVector,
    OffShellError,
    check_on_shell,
    contract_gamma,
    gamma,
    sandwich,
    slash,
    spinor_u,
    tilde,
)

mom = st.floats(-3, 3, allow_nan=False)
p3s = st.tuples(mom, mom, mom)


def test_clifford_algebra():
    for mu in range(4):
        for nu in range(4):
            anti = gamma(mu) @ gamma(nu) + gamma(nu) @ gamma(mu)
            assert np.allclose(anti, 2 * METRIC[mu, nu] * IDENTITY)


def test_gamma5_anticommutes_and_squares_to_one():
    assert np.allclose(GAMMA5 @ GAMMA5, IDENTITY)
    for mu in range(4):
        assert np.allclose(GAMMA5 @ gamma(mu) + gamma(mu) @ GAMMA5, 0)


def test_gamma_index_checked():
    with pytest.raises(IndexError):
        gamma(4)


def test_gamma_returns_copy():
    g = gamma(0)
    g[0, 0] = 99
    assert gamma(0)[0, 0] == 1


@given(p3s)
def test_slash_squares_to_norm(p3):
    v = FourVector(0.7, *p3)
    assert np.allclose(slash(v) @ slash(v), v.sq() * IDENTITY, atol=1e-12)


def test_contract_gamma_identities(rng):
    assert np.allclose(contract_gamma(IDENTITY), 4 * IDENTITY)
    v = FourVector(*rng.normal(size=4))
    assert np.allclose(contract_gamma(slash(v)), -2 * slash(v))


def test_tilde_leaves_gammas_fixed_and_conjugates_numbers():
    for mu in range(4):
        assert np.allclose(tilde(gamma(mu)), gamma(mu))
    assert np.allclose(tilde((2 + 3j) * gamma(1)), (2 - 3j) * gamma(1))


@given(p3s, st.floats(-2, 2), st.floats(-2, 2))
def test_tilde_is_antilinear_involution(p3, a, b):
    m = slash(FourVector(1.1, *p3)) * complex(a, b) + 1j * IDENTITY
    assert np.allclose(tilde(tilde(m)), m)


@given(p3s, st.sampled_from([1, 2]))
def test_spinor_dirac_equation_and_norm(p3, sigma):
    q = FourVector.on_shell(p3)
    u = spinor_u(q, sigma)
    assert np.allclose((slash(q) - MASS * IDENTITY) @ u.components, 0, atol=1e-12)
    assert np.isclose(u.bar() @ u.components, 1.0)


def test_spinors_orthogonal():
    q = FourVector.on_shell([0.3, -0.2, 0.5])
    assert abs(sandwich(q, 1, IDENTITY, q, 2)) < 1e-14


def test_gordon_current_at_rest():
    q = FourVector.on_shell([0, 0, 0])
    assert np.isclose(sandwich(q, 1, gamma(0), q, 1), 1.0)


def test_off_shell_rejected():
    with pytest.raises(OffShellError):
        check_on_shell(FourVector(1.0, 0.5))
    with pytest.raises(OffShellError):
        spinor_u(FourVector(-1.0), 1)
    with pytest.raises(ValueError):
        spinor_u(FourVector.on_shell([0, 0, 0]), 3)


def test_fourvector_arithmetic():
    a, b = FourVector(1, 2, 3, 4), FourVector(0.5, 0, 1, 0)
    assert (a + b).arr.tolist() == [1.5, 2, 4, 4]
    assert (a - b).arr.tolist() == [0.5, 2, 2, 4]
    assert (2 * b).arr.tolist() == [1, 0, 2, 0]
    assert a.dot(b) == 0.5 - 3
    assert np.isclose(FourVector.on_shell([0.3, 0, 0]).sq(), 1.0)
