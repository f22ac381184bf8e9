"""Quadrature backbone: radial integrals with eps-shifted poles, sphere averages,
and the scale-hierarchy check.

Radial integrals are delegated to QUADPACK (``scipy.integrate.quad``) on a
geometric set of breakpoints anchored at the caller's feature scale, which is
where the eps-shifted denominators are smallest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .params import SchemeTag, ThermalParams

DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 2_000_000
BOSE_CUT = 45.0
DEFAULT_FACTOR = 1e-2
# Lambda << m only needs to hold loosely; Lambda = 0.1 m is the working default.
DEFAULT_FACTORS = {"Lambda/m": 0.1}


class QuadratureError(RuntimeError):
    def __init__(self, msg: str, best):
        super().__init__(msg)
        self.best = best


class ScaleHierarchyError(ValueError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: complex
    abs_err: float
    evals: int

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise QuadratureError("non-finite integral", self)

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(self.value + other.value, self.abs_err + other.abs_err, self.evals + other.evals)

    def scaled(self, c: complex) -> "QuadResult":
        return QuadResult(c * self.value, abs(c) * self.abs_err, self.evals)


def _breakpoints(a: float, b: float, scale: float | None) -> list[float]:
    pts = [a]
    if scale is not None and scale > 0:
        x = max(scale, a * 1.0001) if a > 0 else scale
        while x < b:
            if x > a:
                pts.append(x)
            x *= 10.0
    pts.append(b)
    return pts


def integrate_radial(
    f: Callable[[float], complex],
    kmin: float,
    kmax: float,
    tol: float = DEFAULT_TOL,
    scale: float | None = None,
    budget: int = DEFAULT_BUDGET,
    abs_floor: float = 0.0,
) -> QuadResult:
    """Integrate a smooth complex function of the radial variable.

    ``scale`` marks where the integrand varies fastest (typically eps/2a);
    breakpoints are placed at scale * 10^j.  An infinite ``kmax`` is mapped
    through kappa = kmin / (1 - u), so it needs ``kmin > 0``.
    """
    if not (0 <= kmin < kmax):
        raise ValueError(f"need 0 <= kmin < kmax, got [{kmin}, {kmax}]")
    if math.isinf(kmax):
        if kmin <= 0:
            raise ValueError("infinite upper limit requires kmin > 0")

        def g(u: float) -> complex:
            k = kmin / (1.0 - u)
            return f(k) * kmin / (1.0 - u) ** 2

        return integrate_radial(g, 0.0, 1.0, tol, budget=budget, abs_floor=abs_floor)

    evals = 0

    def counted(part):
        def h(x):
            nonlocal evals
            evals += 1
            v = f(x)
            return v.real if part == 0 else v.imag

        return h

    total = 0j
    err = 0.0
    pts = _breakpoints(kmin, kmax, scale)
    for lo, hi in zip(pts[:-1], pts[1:]):
        for part in (0, 1):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, e = integrate.quad(
                    counted(part), lo, hi, epsabs=abs_floor, epsrel=tol, limit=500
                )
            total += val if part == 0 else 1j * val
            err += e
        if evals > budget:
            raise QuadratureError("evaluation budget exceeded", QuadResult(total, err, evals))
    res = QuadResult(total, err, evals)
    if err > max(50 * tol * abs(total), abs_floor, 1e-300) and err > 1e-14 * (abs(total) + 1):
        raise QuadratureError(f"tolerance not reached (err {err:.2e}, value {total:.6e})", res)
    return res


def bose_upper(beta: float, kmin: float = 0.0) -> float:
    """Upper limit beyond which the Bose tail is below double precision."""
    return kmin + BOSE_CUT / beta


def unit_photon(cos_t, phi) -> np.ndarray:
    """Unit photon 4-vector (1, n) for arrays of angles, shape (..., 4)."""
    cos_t = np.asarray(cos_t, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    return np.stack(
        [np.ones_like(cos_t), sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t * np.ones_like(phi)], axis=-1
    )


def khat_dot(q, cos_t, phi) -> np.ndarray:
    """khat . q with khat = (1, n); ``q`` a FourVector."""
    kh = unit_photon(cos_t, phi)
    return q.t * kh[..., 0] - (q.x * kh[..., 1] + q.y * kh[..., 2] + q.z * kh[..., 3])


def angular_nodes(n_theta: int, n_phi: int):
    """Product rule: Gauss-Legendre in cos(theta), trapezoid in phi.

    Returns broadcastable (cos_t, phi, weights) with weights summing to 1.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    c, p = np.meshgrid(x, phi, indexing="ij")
    wt = np.outer(w, np.full(n_phi, 1.0 / n_phi)) / 2.0
    return c, p, wt


def angular_average(
    f: Callable,
    tol: float = DEFAULT_TOL,
    n_theta: int = 16,
    n_phi: int = 8,
    axisymmetric: bool = False,
    max_nodes: int = 4096,
) -> QuadResult:
    """Average f(cos_t, phi) over the unit sphere, refining until stable.

    ``f`` must accept numpy arrays.  With ``axisymmetric`` the phi rule has a
    single node.
    """
    prev = None
    evals = 0
    nt, nph = n_theta, (1 if axisymmetric else n_phi)
    while True:
        c, p, w = angular_nodes(nt, nph)
        vals = np.asarray(f(c, p), dtype=complex)
        evals += vals.size
        cur = complex(np.sum(w * vals))
        if prev is not None:
            err = abs(cur - prev)
            if err <= tol * max(abs(cur), 1e-300):
                return QuadResult(cur, err, evals)
        prev = cur
        if nt >= max_nodes:
            raise QuadratureError("angular budget exceeded", QuadResult(cur, float("nan"), evals))
        nt *= 2
        if not axisymmetric:
            nph *= 2


def inverse_a_closed(q) -> float:
    """<1/(khat q)> for on-shell-like q: ln((q0+|q|)/(q0-|q|)) / (2|q|)."""
    qm = float(np.linalg.norm(q.spatial))
    if qm == 0:
        return 1.0 / q.t
    # atanh form: the log ratio cancels badly for small |q|
    return float(np.arctanh(qm / q.t) / qm)


@dataclass
class ScaleReport:
    ratios: dict[str, float]
    factors: dict[str, float]
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_bad(self) -> "ScaleReport":
        if self.violations:
            raise ScaleHierarchyError("scale hierarchy violated: " + "; ".join(self.violations))
        return self


def scale_check(
    params: ThermalParams, scheme: SchemeTag | None = None, factor: float = DEFAULT_FACTOR, strict: bool = True
) -> ScaleReport:
    """Check eps << mT, eps/m << lam << T << Lambda << m (and the lambda-scheme
    cutoffs lambda_w << lambda0 << T) and report every ratio.

    Each "<<" means ratio <= factor; ``params.factors`` overrides per ratio.
    """
    factors = {**DEFAULT_FACTORS, **params.factors}
    T = params.T
    r: dict[str, float] = {}
    if scheme in (None, SchemeTag.EPSILON):
        r["eps/(mT)"] = params.eps / T
        r["(eps/m)/lam"] = params.eps / params.lam
        r["lam/T"] = params.lam / T
    if scheme in (None, SchemeTag.LAMBDA):
        r["lambda0/T"] = params.lambda0 / T
        r["lambda_w/lambda0"] = params.lambda_w / params.lambda0
    r["T/Lambda"] = T / params.Lambda
    r["Lambda/m"] = params.Lambda
    used = {k: float(factors.get(k, factor)) for k in r}
    bad = [f"{k} = {v:.3g} > {used[k]:.3g}" for k, v in r.items() if not v <= used[k]]
    rep = ScaleReport(r, used, bad)
    return rep.raise_if_bad() if strict else rep
