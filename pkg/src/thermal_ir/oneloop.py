"""One-loop eps-regularized calculation: self-energy, thermal regulator E,
vertex integral and the nullification of the Coulomb term.

All returned vertex quantities are coefficients of gamma^0 in J(p, q); the
tree value is -e.

Notation: for a unit photon direction khat = (1, n), ``a = khat.q`` and
``b = khat.(q + p)``.  Self-energies are reported through their imaginary
("tilde-odd") part X, with Sigma_F = i X (2m - qslash) + real terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quad
from .diracalg import (
    IDENTITY,
    MASS,
    FourVector,
    check_on_shell,
    gamma,
    sandwich,
    slash,
    tilde,
)
from .params import SchemeTag, ThermalParams
from .props import bose_n_subtracted

N_ANGLE = 24


class FixedPointError(RuntimeError):
    pass


@dataclass(frozen=True)
class SigmaCoeffs:
    """Sigma = c_slash * qslash + c_m * m.

    ``log_eps`` is the coefficient of eps*ln(eps) in X = Im(c_m)/2 (only the
    asymptotic forms carry it).  Real parts are never computed.
    """

    c_m: complex
    c_slash: complex
    log_eps: float = 0.0
    real_dropped: bool = True

    @classmethod
    def from_X(cls, X: float, log_eps: float = 0.0) -> "SigmaCoeffs":
        return cls(2j * X, -1j * X, log_eps)

    @property
    def sigma1(self) -> float:
        return self.c_slash.imag

    @property
    def sigma2(self) -> float:
        return self.c_m.imag

    @property
    def X(self) -> float:
        """Im Sigma sandwiched on shell, divided by m: sigma1 + sigma2."""
        return self.sigma1 + self.sigma2

    def matrix(self, q: FourVector) -> np.ndarray:
        return self.c_slash * slash(q) + self.c_m * MASS * IDENTITY

    def __add__(self, other: "SigmaCoeffs") -> "SigmaCoeffs":
        return SigmaCoeffs(self.c_m + other.c_m, self.c_slash + other.c_slash, self.log_eps + other.log_eps)

    def scaled(self, c: float) -> "SigmaCoeffs":
        return SigmaCoeffs(c * self.c_m, c * self.c_slash, c * self.log_eps)


def _pref(e: float) -> float:
    return e**2 / (8 * np.pi**2)


def inverse_a(q: FourVector, tol: float = 1e-12) -> float:
    """<1/(khat q)> by sphere quadrature."""
    res = quad.angular_average(lambda c, ph: 1.0 / quad.khat_dot(q, c, ph), tol=tol)
    return res.value.real


def _axis_nodes(params: ThermalParams, n: int = N_ANGLE):
    """(a, b, weight) on Gauss-Legendre nodes when q and p are collinear,
    otherwise on a product grid."""
    q = params.q
    qp = params.q_out
    q3, p3 = np.array(params.q3), np.array(params.p3)
    if np.linalg.norm(np.cross(q3, p3)) < 1e-14 * (1 + np.linalg.norm(q3) * np.linalg.norm(p3)):
        axis = q3 if np.linalg.norm(q3) > 0 else p3
        u = axis / np.linalg.norm(axis) if np.linalg.norm(axis) > 0 else np.array([0.0, 0.0, 1.0])
        c, w = np.polynomial.legendre.leggauss(n)
        a = q.t - (q3 @ u) * c
        b = qp.t - ((q3 + p3) @ u) * c
        return a, b, w / 2
    c, ph, w = quad.angular_nodes(n, 2 * n)
    return quad.khat_dot(q, c, ph).ravel(), quad.khat_dot(qp, c, ph).ravel(), w.ravel()


# ---------------------------------------------------------------------------
# self-energy
# ---------------------------------------------------------------------------


def sigma_vac_asym(params: ThermalParams) -> SigmaCoeffs:
    """-i e^2/(8 pi^2) (2m - qslash) (eps/m^2) ln(eps/m^2)."""
    quad.scale_check(params, SchemeTag.EPSILON)
    eps = params.eps
    X = -_pref(params.e) * eps / MASS**2 * math.log(eps / MASS**2)
    return SigmaCoeffs.from_X(X, log_eps=-_pref(params.e) / MASS**2)


def sigma_heat_asym(params: ThermalParams) -> SigmaCoeffs:
    """i e^2/(8 pi^2) (2m - qslash) [(eps/m^2) ln(beta eps/m) + (2 pi/beta) <1/a>]."""
    quad.scale_check(params, SchemeTag.EPSILON)
    eps, beta = params.eps, params.beta
    X = _pref(params.e) * (eps / MASS**2 * math.log(beta * eps / MASS) + 2 * np.pi / beta * inverse_a(params.q))
    return SigmaCoeffs.from_X(X, log_eps=_pref(params.e) / MASS**2)


def sigma_total_asym(params: ThermalParams, eps: float | None = None, simplified: bool = True) -> SigmaCoeffs:
    """Vacuum + heat-bath imaginary part; the ln(eps) pieces cancel.

    With ``simplified`` the angular average is replaced by its |q| << m value
    1/m.  ``eps`` may be negative: the combined expression is analytic in eps.
    """
    if eps is None:
        vac, heat = sigma_vac_asym(params), sigma_heat_asym(params)
        if abs(vac.log_eps + heat.log_eps) > 1e-15 * abs(vac.log_eps):
            raise AssertionError("ln(eps) terms failed to cancel")
        eps = params.eps
    inv_a = 1.0 / MASS if simplified else inverse_a(params.q)
    X = _pref(params.e) * (eps / MASS**2 * math.log(params.beta * MASS) + 2 * np.pi / params.beta * inv_a)
    return SigmaCoeffs.from_X(X)


def _sigma_node(a: float, eps: float, beta: float, Lambda: float, tol: float) -> dict:
    """Per-direction soft integrals, Im parts.

    vac   = eps * vac_coef,           vac_coef = int_0^L k dk / (4k^2a^2 + eps^2)
    heat  = int_0^L 2 eps k n(k) / (4k^2a^2 + eps^2) dk
          = (pi/2 - atan(eps/2aL)) / (a beta) + eps * rem_coef
    rem_coef = int_0^L 2k (n - 1/beta k) / (4k^2a^2 + eps^2) dk

    The 1/(beta k) piece of n is integrated with its exact antiderivative.
    """
    scale = abs(eps) / (2 * a)
    den = lambda k: 4 * k * k * a * a + eps * eps  # noqa: E731
    vac = quad.integrate_radial(lambda k: k / den(k), 0.0, Lambda, tol, scale=scale)
    rem = quad.integrate_radial(lambda k: 2 * k * bose_n_subtracted(k, beta) / den(k), 0.0, Lambda, tol, scale=scale)
    pole = (np.pi / 2 - math.atan(eps / (2 * a * Lambda))) / (a * beta)
    return {"vac_coef": vac.value.real, "rem_coef": rem.value.real, "heat_pole": pole, "evals": vac.evals + rem.evals}


def _sigma_combined_node(a: float, eps: float, beta: float, Lambda: float, tol: float) -> float:
    """Im(vac + heat) for one direction with the ln(eps) pieces merged pointwise.

    The merged integrand k (1 + 2n - 2/(beta k)) / (4k^2a^2 + eps^2) is even in
    eps and regular at eps = 0, so negative eps is a literal substitution.
    """
    scale = max(abs(eps) / (2 * a), 1e-300)
    merged = quad.integrate_radial(
        lambda k: k * (1 + 2 * bose_n_subtracted(k, beta)) / (4 * k * k * a * a + eps * eps),
        0.0,
        Lambda,
        tol,
        scale=scale if eps != 0 else None,
    )
    pole = (np.pi / 2 - math.atan(eps / (2 * a * Lambda))) / (a * beta)
    return pole + eps * merged.value.real


@dataclass(frozen=True)
class SigmaParts:
    """Angular averages of the per-direction soft integrals (no e^2/2pi^2).

    ``heat_limit`` is the eps -> 0 value of the heat-bath Im part.
    """

    eps: float
    vac_coef: float
    rem_coef: float
    heat_pole: float
    heat_limit: float

    @property
    def vac(self) -> float:
        return self.eps * self.vac_coef

    @property
    def heat(self) -> float:
        return self.heat_pole + self.eps * self.rem_coef

    @property
    def heat_eps_coef(self) -> float:
        """(Im heat - its eps -> 0 limit) / eps."""
        return self.rem_coef + (self.heat_pole - self.heat_limit) / self.eps


def sigma_numeric_parts(params: ThermalParams, eps: float | None = None, tol: float = 1e-11) -> SigmaParts:
    eps = params.eps if eps is None else eps
    if eps <= 0:
        raise ValueError("separate vacuum/heat parts need eps > 0")
    a_nodes, _, w = _axis_nodes(params)
    acc = np.zeros(4)
    for a, wt in zip(a_nodes, w):
        d = _sigma_node(a, eps, params.beta, params.Lambda, tol)
        acc += wt * np.array([d["vac_coef"], d["rem_coef"], d["heat_pole"], np.pi / (2 * a * params.beta)])
    return SigmaParts(eps, *acc)


def sigma_numeric(params: ThermalParams, eps: float | None = None, tol: float = 1e-10) -> SigmaCoeffs:
    """Soft (k < Lambda) part of the one-loop Sigma_F by quadrature.

    k0 is integrated analytically, kslash is dropped in the numerator and k^2
    in the electron denominator.  ``eps`` may be negative (analytic
    continuation of the ln-cancelled combination).
    """
    eps = params.eps if eps is None else eps
    if eps > 0:
        quad.scale_check(params.with_(eps=eps), SchemeTag.EPSILON)
    a_nodes, _, w = _axis_nodes(params)
    tot = sum(wt * _sigma_combined_node(a, eps, params.beta, params.Lambda, tol) for a, wt in zip(a_nodes, w))
    return SigmaCoeffs.from_X(params.e**2 / (2 * np.pi**2) * tot)


def sigma_heat_split(params: ThermalParams, lam: float | None = None, tol: float = 1e-11) -> float:
    """Heat-bath Im part via the intermediate-scale split (X units, q = 0 axis
    average included): small-k expansion of n below ``lam``, the eps -> 0 form
    above it.
    """
    lam = params.lam if lam is None else lam
    eps, beta = params.eps, params.beta
    a_nodes, _, w = _axis_nodes(params)
    tot = 0.0
    for a, wt in zip(a_nodes, w):
        low = quad.integrate_radial(
            lambda k: (1 / beta - k / 2) * 2 * eps / (4 * k * k * a * a + eps * eps), 0.0, lam, tol, scale=eps / (2 * a)
        )
        high = quad.integrate_radial(lambda k: bose_n_subtracted(k, beta) / k + 1 / (beta * k * k), lam, params.Lambda, tol, scale=lam)
        tot += wt * (low.value.real + eps / (2 * a * a) * high.value.real)
    return params.e**2 / (2 * np.pi**2) * tot


# ---------------------------------------------------------------------------
# thermal regulator E and the self-energy contribution
# ---------------------------------------------------------------------------


def E_closed(beta: float, e: float) -> float:
    """e^2 m / (2 pi beta) / (1 + e^2 ln(beta m) / 4 pi^2)."""
    return e**2 * MASS / (2 * np.pi * beta) / (1 + e**2 / (4 * np.pi**2) * math.log(beta * MASS))


def solve_E(beta: float, e: float, damping: float = 0.5, x0: float | None = None, rtol: float = 1e-15, maxiter: int = 10_000) -> float:
    """Fixed point of E = (e^2 m^2 / 4 pi^2) [-(E/m^2) ln(beta m) + 2 pi/(beta m)]
    by damped iteration E <- (1 - w) E + w F(E)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if e == 0:
        return 0.0
    k = e**2 / (4 * np.pi**2) * math.log(beta * MASS)
    if 1 + k <= 1e-6:
        raise FixedPointError(f"1 + e^2 ln(beta m)/4pi^2 = {1 + k:.3g}; no stable fixed point")
    c = e**2 * MASS**2 / (4 * np.pi**2) * 2 * np.pi / (beta * MASS)
    E = MASS**2 * 0.5 if x0 is None else x0
    for _ in range(maxiter):
        new = (1 - damping) * E + damping * (c - k * E)
        if abs(new - E) <= rtol * max(abs(new), 1e-300):
            return new
        E = new
    raise FixedPointError(f"no convergence after {maxiter} iterations (contraction {abs(1 - damping * (1 + k)):.3g})")


def J3_selfenergy(beta: float, e: float) -> float:
    """J_(3) = e (4m/E) Im Sigma^(+)_F at eps = -E, asymptotic Sigma: exactly 2e."""
    if e == 0:
        return 0.0
    E = solve_E(beta, e)
    if E <= 0:
        raise ValueError("E must be positive")
    params = ThermalParams(beta=beta, e=e)
    X = sigma_total_asym(params, eps=-E).X
    # E = 2 m^2 X at the fixed point
    return e * 4 * MASS**2 * X / E


def J3_selfenergy_numeric(params: ThermalParams) -> float:
    """Same, with Sigma^(+) from the soft quadrature continued to eps = -E."""
    if params.e == 0:
        return 0.0
    E = solve_E(params.beta, params.e)
    X = sigma_numeric(params, eps=-E).X
    return params.e * 4 * MASS**2 * X / E


# ---------------------------------------------------------------------------
# cancellations: counterterms and the normalization factor
# ---------------------------------------------------------------------------


@dataclass
class Cancellation:
    value: complex
    scale: float
    terms: list = field(default_factory=list)

    @property
    def rel(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)


def counterterm_sum(q: FourVector, p: FourVector, l_c: complex, eps: float) -> Cancellation:
    """ubar(q+p) J_(4) u(q) for the three counterterm diagrams, worst spin pair."""
    qp = q + p
    check_on_shell(q)
    check_on_shell(qp)
    g0 = gamma(0)
    nq = slash(q) + MASS * IDENTITY
    nqp = slash(qp) + MASS * IDENTITY
    mats = [
        1j * l_c * nqp @ g0 / (-1j * eps),
        -1j * l_c * nqp * (1 / (-1j * eps) - 1 / (1j * eps)) @ g0,
        1j * l_c * g0 @ nq / (-1j * eps),
    ]
    # spin pairs with a vanishing current hold only rounding noise, so the
    # scale is the largest term over all pairs
    sums, terms, scale = [], [], 0.0
    for so in (1, 2):
        for si in (1, 2):
            t = [sandwich(qp, so, m, q, si) for m in mats]
            sums.append(sum(t))
            terms.append(t)
            scale = max(scale, max(abs(x) for x in t))
    i = int(np.argmax(np.abs(sums)))
    return Cancellation(sums[i], scale, terms[i])


def sigma_components(sigma_F: np.ndarray, q0: float) -> dict[str, np.ndarray]:
    """Matrix self-energy M^{-1} diag(S, -~S) M^{-1} as four 4x4 blocks."""
    th_p, th_m = float(q0 > 0), float(q0 < 0)
    minv = np.array([[1.0, th_m], [-th_p, 1.0]])
    blocks = np.zeros((2, 2, 4, 4), dtype=complex)
    diag = (sigma_F, -tilde(sigma_F))
    for i in range(2):
        for j in range(2):
            blocks[i, j] = sum(minv[i, k] * diag[k] * minv[k, j] for k in range(2))
    return {"11": blocks[0, 0], "12": blocks[0, 1], "21": blocks[1, 0], "22": blocks[1, 1]}


def norm_factor_loop(q: FourVector, sigma_F: np.ndarray) -> Cancellation:
    """ubar(q) (Sigma^11 + Sigma^21 + Sigma^22) u(q); vanishes identically."""
    if q.t <= 0:
        raise ValueError("need q0 > 0")
    s = sigma_components(sigma_F, q.t)
    total = s["11"] + s["21"] + s["22"]
    worst = Cancellation(0j, 0.0)
    for so in (1, 2):
        for si in (1, 2):
            parts = [sandwich(q, so, s[k], q, si) for k in ("11", "21", "22")]
            c = Cancellation(sandwich(q, so, total, q, si), max(abs(t) for t in parts) or 1.0, parts)
            if worst.scale == 0 or c.rel > worst.rel:
                worst = c
    return worst


# ---------------------------------------------------------------------------
# vertex
# ---------------------------------------------------------------------------


def vertex_pole_integral(a, b, eps, beta: float, Lambda: float):
    """(2/beta) int_0^L dk / ((2ka - i eps)(2kb + i eps)), exact.

    Written as a meromorphic function of eps with a simple pole at 0, so it
    also gives the continuation to eps < 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    br = np.log((2 * Lambda * a - 1j * eps) / (2 * Lambda * b + 1j * eps)) + 1j * np.pi
    return (2 / beta) * br / (2j * eps * (a + b))


def vertex_regular_integral(a: float, b: float, eps: float, beta: float, Lambda: float, tol: float = 1e-10) -> complex:
    """int_0^L k (1 + 2n - 2/(beta k)) / ((2ka - i eps)(2kb + i eps)) dk.

    The subtracted occupation makes the integrand O(1) at k -> 0.
    """
    f = lambda k: k * (1 + 2 * bose_n_subtracted(k, beta)) / ((2 * k * a - 1j * eps) * (2 * k * b + 1j * eps))  # noqa: E731
    return quad.integrate_radial(f, 0.0, Lambda, tol, scale=abs(eps) / (2 * min(a, b))).value


def vertex_kappa_integrals(a: float, b: float, eps: float, beta: float, Lambda: float, tol: float = 1e-10) -> dict:
    """Vacuum and thermal kappa integrals of the vertex, separately, by plain
    quadrature (eps > 0 only)."""
    den = lambda k: (2 * k * a - 1j * eps) * (2 * k * b + 1j * eps)  # noqa: E731
    sc = eps / (2 * min(a, b))
    vac = quad.integrate_radial(lambda k: k / den(k), 0.0, Lambda, tol, scale=sc).value
    th = quad.integrate_radial(
        lambda k: 2 * (k * bose_n_subtracted(k, beta) + 1 / beta) / den(k), 0.0, Lambda, tol, scale=sc
    ).value
    return {"vac": vac, "thermal": th}


def vertex_pole_part(a, b, eps, beta: float):
    """1/eps part of :func:`vertex_pole_integral`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (2 / beta) * (np.log(a / b) + 1j * np.pi) / (2j * eps * (a + b))


@dataclass(frozen=True)
class VertexLogParts:
    """Angular averages of the vertex kappa integrals at one eps > 0.

    ``thermal`` has its 1/eps pole removed; both pieces then grow like
    ln(eps) with opposite coefficients.
    """

    eps: float
    vac: complex
    thermal: complex

    @property
    def combined(self) -> complex:
        return self.vac + self.thermal


def vertex_log_parts(params: ThermalParams, eps: float, tol: float = 1e-11) -> VertexLogParts:
    if eps <= 0:
        raise ValueError("separate vertex parts need eps > 0")
    a_nodes, b_nodes, w = _axis_nodes(params)
    vac = th = 0j
    for a, b, wt in zip(a_nodes, b_nodes, w):
        d = vertex_kappa_integrals(a, b, eps, params.beta, params.Lambda, tol)
        vac += wt * d["vac"]
        th += wt * (d["thermal"] - vertex_pole_part(a, b, eps, params.beta))
    return VertexLogParts(eps, vac, th)


def _vertex_prefactor(params: ThermalParams) -> float:
    p2 = params.p.sq()
    return params.e**3 / (2 * np.pi**2) * (2 * MASS**2 - p2)


def J2_vertex_numeric(params: ThermalParams, eps: float | None = None, continued: bool = True, tol: float = 1e-10) -> complex:
    """gamma^0 coefficient of the vertex contribution by soft quadrature.

    With ``continued`` (default) eps is replaced by -E from :func:`solve_E`;
    otherwise ``eps`` (or params.eps) is used as given.
    """
    if params.e == 0:
        return 0j
    if continued:
        eps = -solve_E(params.beta, params.e)
    elif eps is None:
        eps = params.eps
    a_nodes, b_nodes, w = _axis_nodes(params)
    acc = 0j
    for a, b, wt in zip(a_nodes, b_nodes, w):
        acc += wt * (
            vertex_regular_integral(a, b, eps, params.beta, params.Lambda, tol)
            + vertex_pole_integral(a, b, eps, params.beta, params.Lambda)
        )
    return _vertex_prefactor(params) * acc


def J2_vertex_asym(params: ThermalParams, E: float | None = None, leading: bool = False) -> float:
    """Leading vertex terms with <1/ab>, <1/(a+b)> by sphere quadrature.

    ``leading`` sets a = b = m and drops p^2, the |p|, |q| << m limit, which
    gives -e exactly.
    """
    e, beta = params.e, params.beta
    if e == 0:
        return 0.0
    E = solve_E(beta, e) if E is None else E
    # e^2 m/(2 pi beta E) = 1 + e^2 ln(beta m)/4pi^2 at the fixed point
    resum = e**2 * MASS / (2 * np.pi * beta * E)
    p2 = params.p.sq()
    if leading:
        p2 = 0.0
        inv_ab, inv_apb = 1 / MASS**2, 1 / (2 * MASS)
    else:
        q, qp = params.q, params.q_out
        inv_ab = quad.angular_average(lambda c, ph: 1 / (quad.khat_dot(q, c, ph) * quad.khat_dot(qp, c, ph)), tol=1e-12).value.real
        inv_apb = quad.angular_average(lambda c, ph: 1 / (quad.khat_dot(q, c, ph) + quad.khat_dot(qp, c, ph)), tol=1e-12).value.real
    first = e**3 / (8 * np.pi**2) * (2 * MASS**2 - p2) * math.log(beta * MASS) * inv_ab
    second = -e * MASS * (2 - p2 / MASS**2) * inv_apb * resum
    return first + second


@dataclass
class NullificationReport:
    path: str
    tree: complex
    J2: complex
    J3: complex

    @property
    def total(self) -> complex:
        return self.tree + self.J2 + self.J3

    def rel(self, e: float) -> float:
        return abs(self.total) / abs(e) if e else abs(self.total)


def coulomb_nullification(params: ThermalParams, path: str = "asymptotic") -> NullificationReport:
    """tree + J_(2) + J_(3) for the gamma^0 coefficient."""
    e = params.e
    if path == "asymptotic":
        return NullificationReport(path, -e, J2_vertex_asym(params, leading=True), J3_selfenergy(params.beta, e))
    if path == "numeric":
        return NullificationReport(path, -e, J2_vertex_numeric(params), J3_selfenergy_numeric(params))
    raise ValueError(f"unknown path {path!r}")


# ---------------------------------------------------------------------------
# auxiliary soft integrals
# ---------------------------------------------------------------------------


def lorentz_integral_closed(a: float, b: float, eps: float, lam: float, exact_ab: bool = True) -> complex:
    """int_0^lam dk / ((2ka - i eps)(2kb + i eps)) for eps << lam a, b.

    pi/(2 eps (a + b)) - 1/(4 lam a b); for a != b the exact small-eps
    expansion adds ln(a/b) / (2i eps (a + b)), included with ``exact_ab``.
    """
    val = np.pi / (2 * eps * (a + b)) - 1 / (4 * lam * a * b)
    if exact_ab and a != b:
        val = val + math.log(a / b) / (2j * eps * (a + b))
    return complex(val)


def lorentz_integral_numeric(a: float, b: float, eps: float, lam: float, tol: float = 1e-12) -> complex:
    f = lambda k: 1.0 / ((2 * k * a - 1j * eps) * (2 * k * b + 1j * eps))  # noqa: E731
    return quad.integrate_radial(f, 0.0, lam, tol, scale=eps / (2 * min(a, b))).value


def bose_log_integral_closed(beta: float, lam: float) -> float:
    """int_lam^inf 2 dk / (k (e^{beta k} - 1)) ~ 2/(beta lam) + ln(beta lam) + gamma - ln 2pi."""
    return 2 / (beta * lam) + math.log(beta * lam) + float(np.euler_gamma) - math.log(2 * np.pi)


def bose_log_integral_numeric(beta: float, lam: float, tol: float = 1e-12) -> float:
    from .props import bose_n

    upper = quad.bose_upper(beta, lam)
    res = quad.integrate_radial(lambda k: 2 * bose_n(k, beta) / k, lam, upper, tol, scale=lam)
    return res.value.real
