"""Long-range effective potential of a localized charge.

The static potential is the radial sine transform

    A0(r) = -(1/(2 pi^2 r)) int_0^inf dp sin(p r) J(p) s(p) / p

of the gamma^0 vertex coefficient J(p) (tree value -e) times the source form
factor s(p); with J = -e, s = 1 it is e/(4 pi r).  Results are reported as
ratios to that tree value wherever possible.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from . import oneloop, quad, resum
from .params import SchemeTag, ThermalParams

P_CUT = 0.3  # momentum transfer beyond which the full exponent is not trusted
R_MIN = 1.0


def _check_r(r: float) -> None:
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")


def coulomb_tree(r: float, e: float = 1.0) -> float:
    """e / (4 pi r)."""
    _check_r(r)
    return e / (4 * np.pi * r)


def _negligible_from(S: Callable[[float], float], p0: float, p_hi: float = 1e4) -> float:
    """First p = p0 * 2^k at which |S| drops below 1e-18 (or ``p_hi``)."""
    p = p0
    while p < p_hi and abs(S(p)) > 1e-18:
        p *= 2
    return p


def sine_ratio(S: Callable[[float], float], r: float, p_split: float | None = None, tol: float = 1e-11) -> float:
    """(2/pi) int_0^inf sin(p r) S(p) / p dp, the potential in units of the
    tree value for a transfer-dependent factor S with S(0) = 1 for pure
    Coulomb.

    The first period uses adaptive quadrature on sinc, then whole-period
    chunks up to where S is negligible; a slowly decaying remainder goes to
    the Fourier-weighted QUADPACK rule.
    """
    _check_r(r)
    period = 2 * np.pi / r
    p_split = period if p_split is None else p_split
    total = quad.integrate_radial(lambda p: r * np.sinc(p * r / np.pi) * S(p), 0.0, p_split, tol, abs_floor=1e-15).value.real
    p_neg = _negligible_from(S, p_split)
    p_stop = min(p_neg, p_split + 400 * period)
    edges = np.append(np.arange(p_split, p_stop, 4 * period), p_stop)
    g = lambda p: np.sin(p * r) * S(p) / p  # noqa: E731
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(g, lo, hi, epsabs=1e-15, epsrel=tol, limit=200)[0]
    if p_stop < p_neg:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            tail, _ = integrate.quad(lambda p: S(p) / p, edges[-1], np.inf, weight="sin", wvar=r, epsabs=1e-15, limlst=200)
        total += tail
    return float(2 / np.pi * total)


def tree_synthesis(r: float, e: float = 1.0) -> float:
    """Tree potential from the sine transform with S = 1."""
    return coulomb_tree(r, e) * sine_ratio(lambda p: 1.0, r)


@dataclass(frozen=True)
class SourceModel:
    """Spin-unpolarized Gaussian charge cloud.

    ``width_sigma`` is the rms width of the charge density per axis, in units
    of 1/m; the form factor is exp(-p^2 sigma^2 / 2).
    """

    width_sigma: float = 0.01

    def __post_init__(self):
        if self.width_sigma < 0:
            raise ValueError("width_sigma must be non-negative")

    def form_factor(self, p):
        return np.exp(-0.5 * (np.asarray(p) * self.width_sigma) ** 2)

    def normalization(self) -> float:
        """Total charge of the cloud, int d^3x rho(x)."""
        s = self.width_sigma
        if s == 0:
            return 1.0
        dens = lambda x: 4 * np.pi * x * x * np.exp(-x * x / (2 * s * s)) / (2 * np.pi * s * s) ** 1.5  # noqa: E731
        return quad.integrate_radial(dens, 0.0, 40 * s, 1e-12).value.real


def exponent_at_rest(p, params: ThermalParams):
    """Soft exponent (e^2/2)(d11 + d22 + 2 d12) for q = 0 and |p| = p.

    Closed form of the sphere average:
    <1/ab> = ln((E + p)/(E - p)) / (2 p m) with E = m + p^2/2m.
    """
    p = np.asarray(p, dtype=float)
    E = 1.0 + p**2 / 2
    with np.errstate(invalid="ignore", divide="ignore"):
        inv_ab = np.where(p > 0, np.arctanh(p / E) / np.where(p > 0, p, 1.0), 1 / E)
    L = resum.soft_log(params)
    return params.e**2 / (4 * np.pi**2) * L * (1 - E * inv_ab)


def small_p_coefficient(params: ThermalParams) -> float:
    """c in exp(-c p^2) from the small-transfer exponent."""
    return -resum.small_p_exponent(params.with_(p3=(1.0, 0.0, 0.0)))


def suppression_factor(params: ThermalParams, model: str = "full"):
    """Return S(p) = J(p) / (-e I_Lambda) for the lambda scheme.

    ``model="full"`` uses the complete angular exponent up to P_CUT and a
    Gaussian continuation matching its value and slope in p^2 there;
    ``"small_p"`` is exp(-c p^2).
    """
    if model == "small_p":
        c = small_p_coefficient(params)
        return lambda p: math.exp(-c * p * p)
    if model != "full":
        raise ValueError(f"unknown model {model!r}")
    h = 1e-4
    x_cut = float(exponent_at_rest(P_CUT, params))
    # d X / d(p^2) at the cut; the continuation is linear in p^2
    slope = float(exponent_at_rest(P_CUT + h, params) - exponent_at_rest(P_CUT - h, params)) / (4 * P_CUT * h)

    def S(p):
        if p <= P_CUT:
            return math.exp(float(exponent_at_rest(p, params)))
        return math.exp(x_cut + slope * (p * p - P_CUT**2))

    return S


@dataclass(frozen=True)
class Suppression:
    """Potential over tree at one r.  ``log_deficit`` = ln(1 - ratio) from the
    Gaussian closed form, which stays resolvable when the ratio rounds to 1."""

    ratio: float
    closed_form: float
    log_deficit: float


def suppression_ratio(r: float, params: ThermalParams, model: str = "small_p", source: SourceModel | None = None) -> Suppression:
    """A0(r) / A0_tree(r) in the lambda scheme."""
    _check_r(r)
    quad.scale_check(params, SchemeTag.LAMBDA)
    S = suppression_factor(params, model)
    if source is not None:
        S0 = S
        S = lambda p: S0(p) * float(source.form_factor(p))  # noqa: E731
    ratio = sine_ratio(S, r)
    c = small_p_coefficient(params)
    x = r / (2 * math.sqrt(c)) if c > 0 else math.inf
    closed = float(special.erf(x))
    # ln erfc(x) = ln(2 Phi(-sqrt2 x))
    log_def = float(math.log(2.0) + special.log_ndtr(-math.sqrt(2.0) * x)) if math.isfinite(x) else -math.inf
    return Suppression(ratio, closed, log_def)


def effective_potential(
    r: float,
    scheme: SchemeTag,
    params: ThermalParams,
    source: SourceModel | None = None,
    model: str = "full",
) -> float:
    """A0(r) in units of m (the charge e included)."""
    _check_r(r)
    if r < R_MIN:
        raise ValueError("only the long-range region r >= 1/m is modelled")
    if params.e == 0:
        return 0.0
    scheme = SchemeTag(scheme)
    source = SourceModel() if source is None else source
    if scheme is SchemeTag.EPSILON:
        quad.scale_check(params, SchemeTag.EPSILON)
        rep = oneloop.coulomb_nullification(params, "asymptotic")
        # tree + J2 + J3 cancels identically; only rounding is left
        if rep.rel(params.e) <= 1e-14:
            return 0.0
        total = complex(rep.total).real
        return -total / params.e * coulomb_tree(r, params.e) * sine_ratio(lambda p: float(source.form_factor(p)), r)
    sup = suppression_ratio(r, params, model, source)
    return coulomb_tree(r, params.e) * complex(params.i_lambda).real * sup.ratio


@dataclass
class RadialProfile:
    r: np.ndarray
    A0: np.ndarray
    scheme: str
    lambda0_beta: float
    e: float = 1.0
    columns: tuple = field(default=("r_m", "A0_over_em", "scheme", "lambda0_beta"), init=False)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.A0 = np.asarray(self.A0, dtype=float)
        if np.any(self.r <= 0):
            raise ValueError("r must be positive")
        if not np.all(np.isfinite(self.A0)):
            raise ValueError("non-finite potential")

    def rows(self):
        for r, a in zip(self.r, self.A0):
            yield [f"{r:.10g}", f"{a / self.e if self.e else 0.0:.12e}", self.scheme, f"{self.lambda0_beta:.6g}"]

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            w.writerows(self.rows())
        return path


def radial_profile(rs: Sequence[float], scheme: SchemeTag, params: ThermalParams, source: SourceModel | None = None, model: str = "full") -> RadialProfile:
    vals = [effective_potential(r, scheme, params, source, model) for r in rs]
    return RadialProfile(np.asarray(rs), np.asarray(vals), SchemeTag(scheme).value, params.beta * params.lambda0, params.e)
