"""Momentum-space Ward identities for the (111) and (211) vertex components.

Transversality of the photon polarization operator is assumed rather than
computed: diagrams with a polarization insertion on the current line are
simply absent from both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oneloop
from .diracalg import IDENTITY, MASS, FourVector, slash
from .params import ThermalParams
from .props import PropComponent, electron_D


@dataclass(frozen=True)
class WardResidual:
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def rel_residual(self) -> float:
        scale = max(np.linalg.norm(self.lhs), np.linalg.norm(self.rhs))
        if scale == 0:
            return 0.0
        return float(np.linalg.norm(self.lhs - self.rhs) / scale)


def inverse_feynman(q: FourVector, eps: float) -> np.ndarray:
    """(D^(11)(q))^{-1} for the free electron, eps >= 0."""
    den = MASS**2 - q.sq() - 1j * eps
    if den == 0:
        raise np.linalg.LinAlgError(f"propagator at {q} is singular (on shell with eps = 0)")
    d = (slash(q) + MASS * IDENTITY) / den
    try:
        return np.linalg.inv(d)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"propagator at {q} is not invertible") from exc


def ward_111_tree(q: FourVector, p: FourVector, eps: float) -> WardResidual:
    """pslash against D^{-1}(q) - D^{-1}(q + p).

    The inverse of the regularized propagator is m - qslash up to
    O(eps / |m^2 - q^2|), so the residual has that size.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    lhs = slash(p)
    rhs = inverse_feynman(q, eps) - inverse_feynman(q + p, eps)
    return WardResidual(lhs, rhs)


def component_identity(q: FourVector, eps: float) -> WardResidual:
    """D^(21)(q) against D^(11)(q) + D^(22)(q) for q0 > 0."""
    if q.t <= 0:
        raise ValueError("need q0 > 0")
    d = {c: electron_D(c, q, eps) for c in PropComponent}
    return WardResidual(d[PropComponent.C21], d[PropComponent.C11] + d[PropComponent.C22])


def gamma211_contracted(params: ThermalParams, eps: float, tol: float = 1e-10) -> np.ndarray:
    """p_mu Gamma^mu_(211)(q + p, q) at one loop, soft photons only.

    Under the integral the contracted numerator obeys
    N2 pslash N1 = -d2 N1 + d1 N2 with d_i = m^2 - (q_i - k)^2.  The d2 term
    multiplies the on-shell part of D^(21) and drops; the d1 term cancels the
    incoming propagator and leaves the (21) self-energy loop at q + p:

        i (e^2/pi^2)(2m - q2slash) eps <int k (1 + 2n) / (4k^2 b^2 + eps^2) dk>.

    The k0 = +kappa and k0 = -kappa photon poles carry 1 + n and n.
    """
    q2 = params.q_out
    moved = params.with_(q3=tuple(np.add(params.q3, params.p3)), p3=(0.0, 0.0, 0.0))
    X = oneloop.sigma_numeric(moved, eps=eps, tol=tol).X
    # X carries e^2/(2 pi^2) and the angular average
    return 2j * X * (2 * MASS * IDENTITY - slash(q2))


def ward_211_relation(params: ThermalParams, continued: bool = True, eps: float | None = None) -> WardResidual:
    """p_mu Gamma^mu_(211) against 2i Im Sigma_F(q + p).

    With ``continued`` the regulator is eps = -E; otherwise ``eps`` (or
    params.eps).  The right side uses the asymptotic self-energy.
    """
    if params.q.t <= 0:
        raise ValueError("need q0 > 0")
    if continued:
        eps = -oneloop.solve_E(params.beta, params.e) if params.e else 0.0
    elif eps is None:
        eps = params.eps
    lhs = gamma211_contracted(params, eps)
    moved = params.with_(q3=tuple(np.add(params.q3, params.p3)), p3=(0.0, 0.0, 0.0))
    X = oneloop.sigma_total_asym(moved, eps=eps, simplified=False).X
    rhs = 2j * X * (2 * MASS * IDENTITY - slash(params.q_out))
    return WardResidual(lhs, rhs)
