import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from thermal_ir import oneloop
from thermal_ir.diracalg import FourVector, slash
from thermal_ir.params import E_PHYSICAL, ThermalParams
from thermal_ir.quad import ScaleHierarchyError

DEFAULT = ThermalParams(beta=1e3)


# ---------------------------------------------------------------- self-energy


def test_sigma_coeffs_structure():
    s = oneloop.SigmaCoeffs.from_X(0.5)
    assert s.sigma2 == 1.0 and s.sigma1 == -0.5 and s.X == 0.5
    q = FourVector.on_shell([0.1, 0, 0])
    assert np.allclose(s.matrix(q), 1j * 0.5 * (2 * np.eye(4) - slash(q)))
    assert (s + s).X == 1.0 and s.scaled(3).X == 1.5


def test_log_eps_coefficients_cancel():
    vac, heat = oneloop.sigma_vac_asym(DEFAULT), oneloop.sigma_heat_asym(DEFAULT)
    assert vac.log_eps == -heat.log_eps != 0
    tot = oneloop.sigma_total_asym(DEFAULT)
    assert tot.log_eps == 0
    assert tot.X == pytest.approx((vac + heat).X, rel=1e-9)


def test_sigma_numeric_matches_asymptotic():
    num, asym = oneloop.sigma_numeric(DEFAULT), oneloop.sigma_total_asym(DEFAULT)
    # derived: residual -5.67e-6 set by eps ln(beta Lambda) vs eps ln(beta m)
    assert num.X / asym.X - 1 == pytest.approx(-5.67e-6, rel=0.01)


def test_sigma_numeric_parts_slopes():
    eps = np.array([1e-7, 1e-8, 1e-9])
    parts = [oneloop.sigma_numeric_parts(DEFAULT, eps=e) for e in eps]
    L = np.log(eps)
    vac = np.polyfit(L, [p.vac_coef for p in parts], 1)[0]
    heat = np.polyfit(L, [p.heat_eps_coef for p in parts], 1)[0]
    assert vac == pytest.approx(-0.25, rel=1e-3)
    assert heat == pytest.approx(0.25, rel=1e-3)


def test_sigma_heat_split_agrees_with_direct():
    split = oneloop.sigma_heat_split(DEFAULT)
    direct = oneloop.sigma_heat_asym(DEFAULT).X
    assert split == pytest.approx(direct, rel=1e-3)


def test_sigma_continuation_to_negative_eps_is_smooth():
    x = [oneloop.sigma_numeric(DEFAULT, eps=s * 1e-8).X for s in (-1, 0, 1)]
    assert x[1] == pytest.approx(0.5 * (x[0] + x[2]), rel=1e-6)


def test_sigma_rejects_bad_hierarchy():
    with pytest.raises(ScaleHierarchyError):
        oneloop.sigma_vac_asym(DEFAULT.with_(eps=1e-4))


# ---------------------------------------------------------------- fixed point


def test_E_physical_value():
    # oracle: bracketing root of F(E) - E, frozen
    F = lambda E: E_PHYSICAL**2 / (4 * math.pi**2) * (-E * math.log(1e3) + 2 * math.pi / 1e3) - E  # noqa: E731
    oracle = brentq(F, 1e-9, 1.0, xtol=1e-22, rtol=1e-15)
    assert oneloop.solve_E(1e3, E_PHYSICAL) == pytest.approx(oracle, rel=1e-13)
    assert oneloop.solve_E(1e3, E_PHYSICAL) == pytest.approx(1.4364224437682159e-05, rel=1e-13)


@given(st.floats(10, 1e6), st.floats(0.01, 1.0))
def test_iteration_matches_closed_form(beta, e2):
    e = math.sqrt(e2)
    assert oneloop.solve_E(beta, e) == pytest.approx(oneloop.E_closed(beta, e), rel=1e-12)


@given(st.floats(0.05, 0.95))
def test_fixed_point_independent_of_damping(w):
    assert oneloop.solve_E(1e3, 0.3, damping=w) == pytest.approx(oneloop.E_closed(1e3, 0.3), rel=1e-12)


def test_fixed_point_zero_charge_and_errors():
    assert oneloop.solve_E(1e3, 0.0) == 0.0
    with pytest.raises(ValueError):
        oneloop.solve_E(-1.0, 0.3)
    with pytest.raises(oneloop.FixedPointError):
        oneloop.solve_E(1e3, 0.3, damping=1.9, maxiter=50)


def test_J3_is_twice_the_charge():
    assert oneloop.J3_selfenergy(1e3, E_PHYSICAL) == pytest.approx(2 * E_PHYSICAL, rel=1e-14)
    assert oneloop.J3_selfenergy(1e3, 0.0) == 0.0


def test_J3_numeric_frozen():
    assert oneloop.J3_selfenergy_numeric(DEFAULT) / DEFAULT.e == pytest.approx(2.016562284414215, rel=1e-9)


# ---------------------------------------------------------------- cancellations


@given(st.tuples(*[st.floats(-0.5, 0.5)] * 3), st.tuples(*[st.floats(-0.5, 0.5)] * 3), st.floats(-2, 2))
def test_counterterm_sum_vanishes(q3, qp3, lc):
    q, qp = FourVector.on_shell(q3), FourVector.on_shell(qp3)
    assert oneloop.counterterm_sum(q, qp - q, complex(lc, 0.5), 1e-8).rel <= 1e-12


def test_norm_factor_loop_vanishes(rng):
    for _ in range(20):
        q = FourVector.on_shell(rng.normal(scale=0.3, size=3))
        sig = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert oneloop.norm_factor_loop(q, sig).rel <= 1e-12


def test_sigma_components_block_identity(rng):
    sig = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    s = oneloop.sigma_components(sig, 1.0)
    assert np.allclose(s["11"], sig)
    assert np.allclose(s["12"], 0)


# ---------------------------------------------------------------- vertex


def test_vertex_pole_integral_matches_quadrature():
    a, b, eps, beta, lam = 1.0, 1.02, 1e-8, 1e3, 0.1
    f = lambda k: 1 / ((2 * k * a - 1j * eps) * (2 * k * b + 1j * eps))  # noqa: E731
    mp.mp.dps = 30
    pts = [0] + [eps * 10**j for j in range(8)] + [lam]
    oracle = complex(mp.quad(f, pts)) * 2 / beta
    assert oneloop.vertex_pole_integral(a, b, eps, beta, lam) == pytest.approx(oracle, rel=1e-9)


@pytest.mark.parametrize("b", [1.0, 1.02])
def test_vertex_log_slopes_cancel(b):
    eps = np.array([1e-7, 1e-8, 1e-9])
    vac, th = [], []
    for x in eps:
        d = oneloop.vertex_kappa_integrals(1.0, b, x, 1e3, 0.1)
        vac.append(d["vac"].real)
        th.append((d["thermal"] - oneloop.vertex_pole_part(1.0, b, x, 1e3)).real)
    L = np.log(eps)
    s_vac, s_th = np.polyfit(L, vac, 1)[0], np.polyfit(L, th, 1)[0]
    assert s_vac == pytest.approx(-1 / (4 * b), rel=2e-3)
    assert abs(s_vac + s_th) < 1e-4 * abs(s_vac)


def test_vertex_log_parts_rejects_negative_eps():
    assert oneloop.VertexLogParts(1e-8, 1 + 2j, 3 - 1j).combined == 4 + 1j
    with pytest.raises(ValueError):
        oneloop.vertex_log_parts(DEFAULT, -1e-8)


def test_J2_numeric_frozen():
    assert oneloop.J2_vertex_numeric(DEFAULT).real / DEFAULT.e == pytest.approx(-1.0082811422071074, rel=1e-8)


def test_J2_asymptotic_leading_is_minus_e():
    p = DEFAULT.with_(p3=(0, 0, 0.05))
    assert oneloop.J2_vertex_asym(p, leading=True) == pytest.approx(-p.e, rel=1e-14)
    assert oneloop.J2_vertex_asym(p) == pytest.approx(-p.e, rel=2e-3)


def test_nullification_paths():
    asym = oneloop.coulomb_nullification(DEFAULT, "asymptotic")
    assert asym.rel(DEFAULT.e) < 1e-14
    num = oneloop.coulomb_nullification(DEFAULT, "numeric")
    assert num.rel(DEFAULT.e) < 0.05
    with pytest.raises(ValueError):
        oneloop.coulomb_nullification(DEFAULT, "other")


def test_zero_charge_gives_zero_everywhere():
    z = DEFAULT.with_(e=0.0)
    assert oneloop.J2_vertex_numeric(z) == 0
    assert oneloop.J2_vertex_asym(z) == 0
    assert oneloop.coulomb_nullification(z).total == 0


# ---------------------------------------------------------------- soft integrals


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (1.0, 1.05)])
def test_lorentz_integral_against_mpmath(a, b):
    eps, lam = 1e-9, 1e-5
    mp.mp.dps = 30
    f = lambda k: 1 / ((2 * k * a - 1j * eps) * (2 * k * b + 1j * eps))  # noqa: E731
    oracle = complex(mp.quad(f, [0] + [eps * 10**j for j in range(4)] + [lam]))
    assert oneloop.lorentz_integral_numeric(a, b, eps, lam) == pytest.approx(oracle, rel=1e-10)
    assert oneloop.lorentz_integral_closed(a, b, eps, lam) == pytest.approx(oracle, rel=10 * eps / lam)


def test_lorentz_closed_unequal_needs_log_term():
    eps, lam = 1e-9, 1e-5
    num = oneloop.lorentz_integral_numeric(1.0, 1.05, eps, lam)
    plain = oneloop.lorentz_integral_closed(1.0, 1.05, eps, lam, exact_ab=False)
    assert abs(plain / num - 1) > 1e-3


def test_bose_log_integral_against_mpmath():
    beta, lam = 1e3, 1e-6
    mp.mp.dps = 30
    oracle = float(mp.quad(lambda k: 2 / (k * mp.expm1(beta * k)), [lam, 1e-5, 1e-4, 1e-3, 1e-2, mp.inf]))
    assert oneloop.bose_log_integral_numeric(beta, lam) == pytest.approx(oracle, rel=1e-12)
    # derived: the next term of the small beta lam expansion is -beta lam / 6
    diff = oneloop.bose_log_integral_numeric(beta, lam) - oneloop.bose_log_integral_closed(beta, lam)
    assert diff == pytest.approx(-beta * lam / 6, rel=1e-2)
