"""Lambda-regularized soft-photon resummation.

Covers the Gaussian smearing kernels, the eikonal permutation identities,
the vanishing of 2-vertex contributions, the trinomial resummation identity,
the soft integrals d_st and the exponentiated vertex function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import wofz

from . import quad
from .diracalg import IDENTITY, MASS, FourVector, gamma, slash
from .params import SchemeTag, ThermalParams
from .props import bose_n

EULER_GAMMA = float(np.euler_gamma)
MAX_PERMUTATION_N = 6
MAX_TRINOMIAL_N = 12
SMEAR_RATIO_MAX = 1e-2


class NearSingularError(ValueError):
    pass


# ---------------------------------------------------------------------------
# smearing kernels
# ---------------------------------------------------------------------------


def delta_smear(w, lambda_w: float) -> float:
    """Delta_lambda(w) = exp(-(w0^2 + |w|^2)/lambda^2) / (pi^2 lambda^4).

    ``w`` may be a FourVector or an array whose last axis has length 4.
    """
    if lambda_w <= 0:
        raise ValueError("lambda_w must be positive")
    arr = w.arr if isinstance(w, FourVector) else np.asarray(w, dtype=float)
    r2 = np.sum(arr**2, axis=-1)
    return np.exp(-r2 / lambda_w**2) / (np.pi**2 * lambda_w**4)


def delta_star(w, lambda_w: float) -> float:
    """Delta*_lambda(w) = (1/16) int d^4xi Delta((w - xi)/2) Delta((w + xi)/2).

    For the Gaussian kernel the convolution is Delta_{sqrt(2) lambda}(w).
    """
    return delta_smear(w, math.sqrt(2.0) * lambda_w)


@dataclass(frozen=True)
class SmearKernel:
    lambda_w: float

    def __post_init__(self):
        if self.lambda_w <= 0:
            raise ValueError("lambda_w must be positive")

    def __call__(self, w):
        return delta_smear(w, self.lambda_w)

    def star(self, w):
        return delta_star(w, self.lambda_w)

    def check_against(self, lambda0: float, factor: float = SMEAR_RATIO_MAX) -> float:
        ratio = self.lambda_w / lambda0
        if ratio > factor:
            raise quad.ScaleHierarchyError(f"lambda_w/lambda0 = {ratio:.3g} > {factor:.3g}")
        return ratio


def smeared_inverse(x, sigma):
    """E[1/(x + sigma Z + i0)] for standard normal Z (Faddeeva function)."""
    x = np.asarray(x, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    s = np.sqrt(2.0) * sigma
    return -1j * np.sqrt(np.pi) * wofz(x / s) / s


# ---------------------------------------------------------------------------
# permutation identities
# ---------------------------------------------------------------------------


def _dots(ws: Sequence[FourVector], q: FourVector) -> np.ndarray:
    return np.array([w.dot(q) for w in ws], dtype=float)


def _perm_sum(x: np.ndarray, shifts: Sequence[complex]) -> complex:
    """sum over orderings of prod_j 1/(partial_j + shifts[j])."""
    total = 0j
    for perm in itertools.permutations(range(len(x))):
        part = np.cumsum(x[list(perm)]) + np.asarray(shifts)
        total += np.prod(1.0 / part)
    return total


def _check_partials(x: np.ndarray, rtol: float = 1e-9) -> None:
    scale = np.max(np.abs(x))
    if np.any(np.abs(x) <= rtol * scale):
        raise NearSingularError(f"w_{int(np.argmin(np.abs(x))) + 1}.q vanishes")
    for r in range(2, len(x) + 1):
        for sub in itertools.combinations(range(len(x)), r):
            if abs(x[list(sub)].sum()) <= rtol * scale:
                raise NearSingularError(f"partial sum over w{tuple(i + 1 for i in sub)} vanishes on q")


def eikonal_identity_check(ws: Sequence[FourVector], q: FourVector) -> float:
    """Relative residual of sum_perm prod 1/(partial sums) = prod 1/(w_j q)."""
    if not 1 <= len(ws) <= MAX_PERMUTATION_N:
        raise ValueError(f"need 1 <= n <= {MAX_PERMUTATION_N}")
    x = _dots(ws, q)
    _check_partials(x)
    lhs = _perm_sum(x, np.zeros(len(x)))
    rhs = np.prod(1.0 / x)
    return float(abs(lhs - rhs) / abs(rhs))


def epsilon_obstruction(ws: Sequence[FourVector], q: FourVector, eps: float) -> float:
    """Relative failure of factorization with every denominator shifted by +i eps.

    Compares the permutation sum against prod 1/(w_j q + i eps); the mismatch
    is linear in eps at fixed w_j q.
    """
    if len(ws) < 2:
        raise ValueError("need at least two momenta")
    if not len(ws) <= MAX_PERMUTATION_N:
        raise ValueError(f"need n <= {MAX_PERMUTATION_N}")
    x = _dots(ws, q)
    lhs = _perm_sum(x, np.full(len(x), 1j * eps))
    rhs = np.prod(1.0 / (x + 1j * eps))
    return float(abs(lhs - rhs) / abs(rhs))


def excess_factor(w1: FourVector, w2: FourVector, q: FourVector, eps: float) -> complex:
    """i eps / ((w1 + w2) q + i eps): the piece left after permuting two lines."""
    return 1j * eps / ((w1 + w2).dot(q) + 1j * eps)


@dataclass(frozen=True)
class TwoTermResidual:
    bracket: complex
    factorization: float
    scale: float

    @property
    def residual(self) -> float:
        return max(abs(self.bracket) / self.scale, self.factorization)


def _perm_sum_exact(x: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for perm in itertools.permutations(range(len(x))):
        acc, prod = Fraction(0), Fraction(1)
        for j in perm:
            acc += x[j]
            prod /= acc
        total += prod
    return total


def two_term_vanishing(ws: Sequence[FourVector], q: FourVector, m_count: int, eta: float = 0.0) -> TwoTermResidual:
    """Permutation sum with a sign-flipped pole at position ``m_count``.

    Denominators before position m carry -i eta, from m on +i eta.  The
    bracket (difference of the two orientations at m) vanishes for eta -> 0,
    and the step that permutes the first m lines into prod 1/(w_j q) is
    checked by brute force.  At eta = 0 both sums are formed in exact
    rational arithmetic from the (exactly representable) float inputs.
    """
    n = len(ws)
    if m_count < 1 or m_count > n:
        raise ValueError("need 1 <= m_count <= n")
    if n > MAX_PERMUTATION_N:
        raise ValueError(f"need n <= {MAX_PERMUTATION_N}")
    x = _dots(ws, q)
    _check_partials(x)
    if eta == 0:
        xf = [Fraction(v) for v in x]
        a = _perm_sum_exact(xf)
        fact = Fraction(0)
        for perm in itertools.permutations(range(n)):
            head = Fraction(1, math.factorial(m_count))
            for j in perm[:m_count]:
                head /= xf[j]
            acc = sum((xf[j] for j in perm[:m_count]), Fraction(0))
            for j in perm[m_count:]:
                acc += xf[j]
                head /= acc
            fact += head
        scale = abs(float(a)) or 1e-300
        # the two orientations coincide at eta = 0
        return TwoTermResidual(0j, float(abs(a - fact)) / scale, scale)
    up = [(-1j if j < m_count - 1 else 1j) * eta for j in range(n)]
    down = list(up)
    down[m_count - 1] = -1j * eta
    a = _perm_sum(x, up)
    b = _perm_sum(x, down)
    fact = 0j
    for perm in itertools.permutations(range(n)):
        xp = x[list(perm)]
        head = np.prod(1.0 / (xp[:m_count] - 1j * eta)) / math.factorial(m_count)
        tail = np.prod(1.0 / (np.cumsum(xp)[m_count:] + 1j * eta))
        fact += head * tail
    scale = max(abs(a), abs(b), 1e-300)
    return TwoTermResidual(a - b, float(abs(b - fact) / scale), scale)


def trinomial_terms(N: int, d11, d22, d12):
    """sum_{n_i + n_f <= N} d11^n_i/(n_i! 2^n_i) d22^n_f/(n_f! 2^n_f) d12^n0/n0!."""
    if not 0 <= N <= MAX_TRINOMIAL_N:
        raise ValueError(f"need 0 <= N <= {MAX_TRINOMIAL_N}")
    exact = all(isinstance(d, (int, Fraction)) for d in (d11, d22, d12))
    one = Fraction(1) if exact else 1.0
    total = 0 * one
    for ni in range(N + 1):
        for nf in range(N - ni + 1):
            n0 = N - ni - nf
            coef = one / (math.factorial(ni) * 2**ni * math.factorial(nf) * 2**nf * math.factorial(n0))
            total += coef * d11**ni * d22**nf * d12**n0
    return total


def trinomial_check(N: int, d11, d22, d12) -> float:
    """Relative residual of the resummation identity; exact for rational input."""
    lhs = trinomial_terms(N, d11, d22, d12)
    rhs = (d11 + d22 + 2 * d12) ** N / (math.factorial(N) * 2**N)
    if isinstance(lhs, Fraction):
        return 0.0 if lhs == rhs else float(abs(lhs - rhs) / max(abs(rhs), Fraction(1, 10**300)))
    return float(abs(lhs - rhs) / max(abs(rhs), 1e-300))


# ---------------------------------------------------------------------------
# soft integrals and the resummed vertex
# ---------------------------------------------------------------------------

ETA = {1: 1, 2: -1}


def _momenta(params: ThermalParams) -> dict[int, FourVector]:
    return {1: params.q, 2: params.q_out}


def soft_log(params: ThermalParams) -> float:
    """2/(beta lambda0) + ln(beta Lambda) + gamma - ln(2 pi)."""
    b = params.beta
    return 2 / (b * params.lambda0) + math.log(b * params.Lambda) + EULER_GAMMA - math.log(2 * np.pi)


def soft_log_numeric(params: ThermalParams, tol: float = 1e-12) -> float:
    """int_{lambda0}^{Lambda} (1 + 2n)/kappa dkappa by quadrature."""
    res = quad.integrate_radial(
        lambda k: (1 + 2 * bose_n(k, params.beta)) / k, params.lambda0, params.Lambda, tol, scale=params.lambda0
    )
    return res.value.real


def inverse_ab(qs: FourVector, qt: FourVector, tol: float = 1e-12) -> float:
    """<1/((khat q_s)(khat q_t))> over the sphere."""
    f = lambda c, ph: 1.0 / (quad.khat_dot(qs, c, ph) * quad.khat_dot(qt, c, ph))  # noqa: E731
    return quad.angular_average(f, tol=tol).value.real


def d_st(s: int, t: int, params: ThermalParams, numeric: bool = False) -> complex:
    """Soft integral d_st with q_1 = q, q_2 = q + p, eta = (+1, -1)."""
    if s not in ETA or t not in ETA:
        raise ValueError("s, t must be 1 or 2")
    quad.scale_check(params, SchemeTag.LAMBDA)
    qs = _momenta(params)
    L = soft_log_numeric(params) if numeric else soft_log(params)
    return complex(ETA[s] * ETA[t] / (4 * np.pi**2) * qs[s].dot(qs[t]) * inverse_ab(qs[s], qs[t]) * L)


def d_st_smeared(s: int, t: int, params: ThermalParams, lambda_w: float | None = None, tol: float = 1e-11) -> complex:
    """d_st with both eikonal denominators averaged over the Gaussian smearing.

    w.q is normal with variance lambda_w^2 |q|_E^2 / 2 (|q|_E Euclidean norm);
    the averages are Faddeeva functions.
    """
    lw = params.lambda_w if lambda_w is None else lambda_w
    SmearKernel(lw).check_against(params.lambda0, params.factors.get("lambda_w/lambda0", SMEAR_RATIO_MAX))
    qs = _momenta(params)
    q_s, q_t = qs[s], qs[t]
    sig_s = lw * np.linalg.norm(q_s.arr) / np.sqrt(2.0)
    sig_t = lw * np.linalg.norm(q_t.arr) / np.sqrt(2.0)
    c, ph, w = quad.angular_nodes(24, 16)
    a_s = quad.khat_dot(q_s, c, ph)
    a_t = quad.khat_dot(q_t, c, ph)
    beta = params.beta

    def radial(k):
        kern = -ETA[s] * ETA[t] * smeared_inverse(ETA[s] * k * a_s, sig_s) * smeared_inverse(-ETA[t] * k * a_t, sig_t)
        return (1 + 2 * bose_n(k, beta)) * k * np.sum(w * kern)

    L = quad.integrate_radial(radial, params.lambda0, params.Lambda, tol, scale=params.lambda0).value
    return ETA[s] * ETA[t] / (4 * np.pi**2) * q_s.dot(q_t) * L


@dataclass(frozen=True)
class SoftExponent:
    d11: complex
    d22: complex
    d12: complex
    e: float
    singular: complex

    @property
    def combined(self) -> complex:
        return self.e**2 / 2 * (self.d11 + self.d22 + 2 * self.d12)


def soft_exponent(params: ThermalParams, numeric: bool = False) -> SoftExponent:
    """(e^2/2)(d11 + d22 + 2 d12), plus the singular-terms-only form
    (alpha/pi)[1 - (m^2 - p^2/2)<1/ab>][2/(beta lambda0) + ln(beta Lambda)]."""
    d11 = d_st(1, 1, params, numeric)
    d22 = d_st(2, 2, params, numeric)
    d12 = d_st(1, 2, params, numeric)
    qs = _momenta(params)
    p2 = params.p.sq()
    sing_log = 2 / (params.beta * params.lambda0) + math.log(params.beta * params.Lambda)
    singular = params.alpha / np.pi * (1 - (MASS**2 - p2 / 2) * inverse_ab(qs[1], qs[2])) * sing_log
    out = SoftExponent(d11, d22, d12, params.e, complex(singular))
    # 1 - q1.q2 <1/ab> <= 0 by Cauchy-Schwarz on the sphere
    if out.combined.real > 1e-12 * abs(out.e**2 * d11):
        raise AssertionError(f"soft exponent has positive real part {out.combined.real:.3e}")
    return out


def small_p_exponent(params: ThermalParams) -> float:
    """-(alpha |p|^2 / 3 pi m^2)[2/(beta lambda0) + ln(beta Lambda)]."""
    p2 = float(np.dot(params.p3, params.p3))
    return -params.alpha * p2 / (3 * np.pi * MASS**2) * (2 / (params.beta * params.lambda0) + math.log(params.beta * params.Lambda))


def J_resummed(params: ThermalParams, I_Lambda: complex | None = None, n_max: int | None = None, singular_only: bool = False) -> complex:
    """-e exp(exponent) I_Lambda, or its series truncated at order ``n_max``."""
    I_Lambda = params.i_lambda if I_Lambda is None else I_Lambda
    ex = soft_exponent(params)
    if singular_only:
        return -params.e * np.exp(ex.singular) * I_Lambda
    if n_max is None:
        return -params.e * np.exp(ex.combined) * I_Lambda
    ds = (ex.d11, ex.d22, ex.d12)
    if all(complex(d).imag == 0 for d in ds):
        # the d_st nearly cancel in the combination; exact arithmetic keeps
        # the truncated series at rounding level
        ds = tuple(Fraction(complex(d).real) for d in ds)
        e2 = Fraction(params.e**2)
    else:
        e2 = params.e**2
    series = sum(e2**N * trinomial_terms(N, *ds) for N in range(n_max + 1))
    return -params.e * complex(series) * I_Lambda


def series_tail_bound(x: complex, n_max: int) -> float:
    """|x|^(N+1)/(N+1)! times e^|x|, bounding the exponential series remainder."""
    return abs(x) ** (n_max + 1) / math.factorial(n_max + 1) * math.exp(abs(x))


# ---------------------------------------------------------------------------
# external-line self-energy vs its counterterm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterCheck:
    counterterm: np.ndarray
    difference: np.ndarray

    @property
    def rel(self) -> float:
        return float(np.linalg.norm(self.difference) / np.linalg.norm(self.counterterm))


def _lower(mu: int) -> np.ndarray:
    g = gamma(mu)
    return g if mu == 0 else -g


def counterterm_smearing_check(q: FourVector, sigma_q: np.ndarray, slope: Sequence[np.ndarray], lambda_w: float) -> CounterCheck:
    """Self-energy insertion on an external line plus its smeared counterterm.

    Sigma(q + w) = sigma_q + w^mu slope[mu].  The total is
    -E[(qslash + Wslash + m) W^mu slope_mu / (2 (2qW + i0))] with W ~ Delta*,
    evaluated in closed form by Gaussian conditioning on x = qW.  Its size
    relative to the counterterm alone is O(lambda_w).
    """
    qbar = np.array([q.t, -q.x, -q.y, -q.z])  # d(qW)/dW^mu
    qe2 = float(qbar @ qbar)
    s2 = lambda_w**2  # per-component variance of W for Delta_{sqrt2 lambda}
    sx = math.sqrt(s2 * qe2)
    # E[1/(2x + i0)] and E[x/(2x + i0)] for x ~ N(0, sx^2)
    inv = -1j * np.pi / 2 * (1 / (math.sqrt(2 * np.pi) * sx))
    half = 0.5
    nq = slash(q) + MASS * IDENTITY
    counter = nq @ sigma_q * inv
    ws = sum(qbar[mu] * slope[mu] for mu in range(4)) / qe2
    first = nq @ ws * half
    # E[W^nu W^mu / (2x + i0)]: only the part orthogonal to qbar survives
    perp = s2 * (np.eye(4) - np.outer(qbar, qbar) / qe2) * inv
    gam = [gamma(mu) for mu in range(4)]
    metric = np.diag([1.0, -1.0, -1.0, -1.0])
    second = sum(perp[nu, mu] * (metric[nu, nu] * gam[nu]) @ slope[mu] for nu in range(4) for mu in range(4))
    return CounterCheck(counter, -(first + second) / 2)


def slope_from_coeffs(c_slash: complex) -> list[np.ndarray]:
    """d Sigma / d q^mu for Sigma = c_slash qslash + c_m m."""
    return [c_slash * _lower(mu) for mu in range(4)]
