"""Acceptance suite shared by ``thermal-ir verify`` and the test-suite.

Each criterion returns a :class:`CriterionResult`; :func:`run_all` runs them
in order.  Random inputs come from a fixed seed so every run is identical.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import field, oneloop, resum, ward
from .diracalg import FourVector
from .params import ThermalParams

SEED = 20240611


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = math.inf

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} [{self.number:2d}] {self.name}: {self.detail} ({self.seconds:.2f}s / {self.budget:g}s)"


def _random_on_shell(rng: np.random.Generator, scale: float = 0.3) -> FourVector:
    return FourVector.on_shell(rng.normal(scale=scale, size=3))


def _random_vectors(rng: np.random.Generator, n: int, q: FourVector) -> list[FourVector]:
    while True:
        ws = [FourVector(*rng.normal(size=4)) for _ in range(n)]
        x = np.array([w.dot(q) for w in ws])
        sums = [abs(x[list(s)].sum()) for r in range(1, n + 1) for s in itertools.combinations(range(n), r)]
        if min(sums) > 1e-3 * np.max(np.abs(x)):
            return ws


def crit_sigma_log_cancellation(tol: float = 0.01) -> tuple[bool, str]:
    params = ThermalParams(beta=1e3, Lambda=0.1)
    eps = np.array([1e-7, 1e-8, 1e-9])
    parts = [oneloop.sigma_numeric_parts(params, eps=e) for e in eps]
    L = np.log(eps)
    vac = np.polyfit(L, [p.vac_coef for p in parts], 1)[0]
    heat = np.polyfit(L, [p.heat_eps_coef for p in parts], 1)[0]
    both = np.polyfit(L, [p.vac_coef + p.heat_eps_coef for p in parts], 1)[0]
    rel = abs(both) / min(abs(vac), abs(heat))
    return rel <= tol, f"slopes vac {vac:.6f}, heat {heat:.6f}, combined {both:.2e} (ratio {rel:.2e} <= {tol:g})"


def crit_fixed_point(tol: float = 1e-12) -> tuple[bool, str]:
    worst = 0.0
    for beta in (1e2, 1e3, 1e4):
        for e2 in (0.01, 0.09, 0.3):
            e = math.sqrt(e2)
            worst = max(worst, abs(oneloop.solve_E(beta, e) / oneloop.E_closed(beta, e) - 1))
    return worst <= tol, f"max rel deviation {worst:.2e} <= {tol:g} on 9 points"


def crit_nullification(tol: float = 0.05) -> tuple[bool, str]:
    params = ThermalParams(beta=1e3)
    asym = oneloop.coulomb_nullification(params, "asymptotic")
    num = oneloop.coulomb_nullification(params, "numeric")
    a_rel, n_rel = asym.rel(params.e), num.rel(params.e)
    ok = a_rel <= 1e-14 and n_rel <= tol
    return ok, (
        f"asymptotic |total|/e = {a_rel:.1e}; numeric J2/e = {complex(num.J2).real / params.e:.5f}, "
        f"J3/e = {num.J3 / params.e:.5f}, |total|/e = {n_rel:.4f} <= {tol:g}"
    )


def crit_counterterm_norm(tol: float = 1e-12, n: int = 100) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst_ct = worst_nf = 0.0
    for _ in range(n):
        q = _random_on_shell(rng)
        qp = _random_on_shell(rng)
        l_c = complex(*rng.normal(size=2))
        worst_ct = max(worst_ct, oneloop.counterterm_sum(q, qp - q, l_c, 1e-8).rel)
        sig = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        worst_nf = max(worst_nf, oneloop.norm_factor_loop(q, sig).rel)
    ok = worst_ct <= tol and worst_nf <= tol
    return ok, f"counterterm {worst_ct:.1e}, normalization {worst_nf:.1e} <= {tol:g} ({n} draws each)"


def crit_eikonal(tol_eik: float = 1e-10, tol_two: float = 1e-12, draws: int = 200) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    worst_e = worst_t = 0.0
    for i in range(draws):
        q = _random_on_shell(rng)
        n = 1 + i % resum.MAX_PERMUTATION_N
        worst_e = max(worst_e, resum.eikonal_identity_check(_random_vectors(rng, n, q), q))
    for i in range(draws):
        q = _random_on_shell(rng)
        n = 1 + i % 5
        ws = _random_vectors(rng, n, q)
        for m in range(1, n + 1):
            worst_t = max(worst_t, resum.two_term_vanishing(ws, q, m).residual)
    ok = worst_e <= tol_eik and worst_t <= tol_two
    return ok, f"eikonal {worst_e:.1e} <= {tol_eik:g}; 2-terms {worst_t:.1e} <= {tol_two:g} ({draws} draws each)"


def crit_trinomial() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    exact = True
    for N in range(11):
        ds = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(3)]
        exact &= resum.trinomial_check(N, *ds) == 0.0
    params = ThermalParams(p3=(0.1, 0.0, 0.0), lambda0=1e-7)
    x = resum.soft_exponent(params).combined
    full = resum.J_resummed(params)
    worst = 0.0
    for N in range(13):
        err = abs(resum.J_resummed(params, n_max=N) - full)
        bound = resum.series_tail_bound(x, N) * params.e + 1e-15 * abs(full)
        worst = max(worst, err / bound)
    ok = exact and worst <= 1.0
    return ok, f"rational identity exact for N <= 10: {exact}; partial sums within tail bound (max err/bound {worst:.2f}), exponent {x.real:.4f}"


def crit_soft_integrals() -> tuple[bool, str]:
    beta = 1e3
    worst = 0.0
    for lam in (1e-6, 1e-5, 1e-4):
        for eps in (1e-10, 1e-9, 1e-8):
            for a, b in ((1.0, 1.0), (1.0, 1.05)):
                c = oneloop.lorentz_integral_closed(a, b, eps, lam)
                nval = oneloop.lorentz_integral_numeric(a, b, eps, lam)
                worst = max(worst, abs(nval / c - 1) / max(1e-8, eps / lam))
        c = oneloop.bose_log_integral_closed(beta, lam)
        nval = oneloop.bose_log_integral_numeric(beta, lam)
        worst = max(worst, abs(nval / c - 1) / max(1e-8, beta * lam))
    return worst <= 1.0, f"max |num/closed - 1| / max(1e-8, eps/lam, beta lam) = {worst:.2e} <= 1"


def crit_exponent_trend() -> tuple[bool, str]:
    negative = all(
        resum.soft_exponent(ThermalParams(p3=(0.0, 0.0, p))).combined.real <= 0 for p in (0.01, 0.05, 0.1)
    )
    beta = 1e3
    monotone = True
    notes = []
    for r in (10.0, 100.0):
        sups = [field.suppression_ratio(r, ThermalParams(lambda0=x / beta, lambda_w=x / beta * 1e-3)) for x in (1e-2, 1e-3, 1e-4)]
        ratios = [s.ratio for s in sups]
        deficits = [s.log_deficit for s in sups]
        monotone &= all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
        monotone &= all(b > a for a, b in zip(deficits, deficits[1:]))
        notes.append(f"r={r:g}: ratios " + ", ".join(f"{x:.10f}" for x in ratios) + "; ln(1-ratio) " + ", ".join(f"{d:.1f}" for d in deficits))
    p = ThermalParams(p3=(0.01, 0.0, 0.0))
    full = resum.soft_exponent(p).combined.real
    small = resum.small_p_exponent(p)
    match = abs(full / small - 1)
    ok = negative and monotone and match <= 0.01
    return ok, f"Re exponent <= 0: {negative}; monotone: {monotone} [{'; '.join(notes)}]; small-p match {match:.1e} <= 0.01"


def crit_ward() -> tuple[bool, str]:
    # |m^2 - q^2| = 0.34, |m^2 - (q+p)^2| = 0.99
    q = FourVector(1.2, 0.1, 0.0, 0.3)
    p = FourVector(0.3, 0.2, -0.1, 0.1)
    exact = ward.ward_111_tree(q, p, 0.0).rel_residual
    r6 = ward.ward_111_tree(q, p, 1e-6).rel_residual
    r7 = ward.ward_111_tree(q, p, 1e-7).rel_residual
    order = r6 / r7
    w211 = ward.ward_211_relation(ThermalParams(beta=1e3, p3=(0.0, 0.0, 0.01))).rel_residual
    ok = exact <= 1e-13 and r6 <= 1e-5 and 8 <= order <= 12 and w211 <= 0.05
    return ok, f"tree eps=0 {exact:.1e}; eps=1e-6 {r6:.1e} (eps-scaling x{order:.2f}); one-loop (211) {w211:.2e} <= 0.05"


def crit_tree_synthesis(tol: float = 1e-6) -> tuple[bool, str]:
    rs = np.logspace(0, 2, 9)
    worst = max(abs(field.tree_synthesis(r) / field.coulomb_tree(r) - 1) for r in rs)
    return worst <= tol, f"max rel error {worst:.1e} <= {tol:g} over r m in [1, 100]"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]], float]] = [
    (1, "ln eps cancellation in Im Sigma", crit_sigma_log_cancellation, 10),
    (2, "fixed point E vs closed form", crit_fixed_point, 1),
    (3, "one-loop Coulomb nullification", crit_nullification, 60),
    (4, "counterterm and normalization sums", crit_counterterm_norm, 5),
    (5, "eikonal factorization and 2-terms", crit_eikonal, 30),
    (6, "trinomial resummation and series", crit_trinomial, 5),
    (7, "soft integral closed forms", crit_soft_integrals, 10),
    (8, "exponent sign and suppression trend", crit_exponent_trend, 60),
    (9, "Ward identities", crit_ward, 120),
    (10, "tree Coulomb synthesis", crit_tree_synthesis, 10),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn, budget in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # report, never mask
                ok, detail = False, f"error: {type(exc).__name__}: {exc}"
            dt = time.perf_counter() - t0
            if dt > budget:
                ok, detail = False, detail + "; runtime over budget"
            return CriterionResult(num, name, bool(ok), detail, dt, budget)
    raise KeyError(number)


def run_all() -> list[CriterionResult]:
    return [run_criterion(num) for num, *_ in CRITERIA]
