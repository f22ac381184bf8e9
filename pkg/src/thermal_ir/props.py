"""Real-time (Schwinger-Keldysh) propagator components.

Photon components are returned as :class:`SplitValue` objects, so the
delta(k^2) pieces never get sampled numerically.  Electron components are
4x4 matrices with the pole shifted by a finite ``eps``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .diracalg import IDENTITY, MASS, FourVector, slash, tilde


class PropComponent(enum.Enum):
    C11 = (1, 1)
    C12 = (1, 2)
    C21 = (2, 1)
    C22 = (2, 2)


@dataclass(frozen=True)
class SplitValue:
    """Photon propagator value split into a pole part and a delta(k^2) part.

    The full distribution is::

        regular / (k^2 + i0 * i0_sign) + onshell_weight * delta(k^2)

    ``regular`` is the numerator of the pole term (+1, -1 or 0) and
    ``i0_sign`` its orientation.  :meth:`delta_coefficient` moves the
    imaginary half of the pole into the delta part, leaving a principal
    value with coefficient ``regular``.
    """

    regular: complex
    i0_sign: int
    onshell_weight: complex

    def delta_coefficient(self) -> complex:
        # 1/(x + i0 s) = PV 1/x - i pi s delta(x)
        return self.onshell_weight - 1j * np.pi * self.i0_sign * self.regular

    def __add__(self, other: "SplitValue") -> tuple[complex, complex]:
        return (self.regular + other.regular, self.delta_coefficient() + other.delta_coefficient())


def _theta(x: float) -> float:
    if x == 0:
        raise ValueError("theta(0) is ambiguous; k0 = 0 is rejected")
    return 1.0 if x > 0 else 0.0


def bose_n(kmag, beta: float):
    """Bose-Einstein occupation 1/(exp(beta |k|) - 1)."""
    kmag = np.asarray(kmag, dtype=float)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if np.any(kmag <= 0):
        raise ValueError("bose_n is only defined for |k| > 0")
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(beta * kmag)
    return float(out) if out.ndim == 0 else out


def bose_n_subtracted(kmag, beta: float):
    """n(k) - 1/(beta k), evaluated without cancellation at small beta k."""
    x = beta * np.asarray(kmag, dtype=float)
    small = x < 1e-2
    xs = np.where(small, x, 1.0)
    xl = np.where(small, 1.0, x)
    series = -0.5 + xs / 12 - xs**3 / 720 + xs**5 / 30240
    with np.errstate(over="ignore"):
        direct = 1.0 / np.expm1(xl) - 1.0 / xl
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def photon_D(comp: PropComponent, k: FourVector, beta: float) -> SplitValue:
    """Feynman-gauge photon component D^(ij)(k) (the eta_{mu nu} factor stripped)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    kmag = float(np.linalg.norm(k.spatial))
    n = bose_n(kmag, beta) if np.isfinite(beta) and kmag > 0 else 0.0
    if comp is PropComponent.C11:
        return SplitValue(1.0, +1, -2j * np.pi * n)
    if comp is PropComponent.C22:
        # -tilde(C11): conjugate the pole orientation and the weight, then negate
        return SplitValue(-1.0, -1, -np.conj(-2j * np.pi * n))
    if comp is PropComponent.C21:
        return SplitValue(0.0, 0, -2j * np.pi * (_theta(k.t) + n))
    return SplitValue(0.0, 0, -2j * np.pi * (_theta(-k.t) + n))


def electron_D(comp: PropComponent, k: FourVector, eps: float) -> np.ndarray:
    """Electron component with the pole regularized by ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    num = slash(k) + MASS * IDENTITY
    den = MASS**2 - k.sq()
    feyn = 1.0 / (den - 1j * eps)
    reg_delta = feyn - 1.0 / (den + 1j * eps)
    if comp is PropComponent.C11:
        return num * feyn
    if comp is PropComponent.C22:
        return -tilde(num * feyn)
    if comp is PropComponent.C21:
        return _theta(k.t) * num * reg_delta
    return -_theta(-k.t) * num * reg_delta


def M_matrix(k0: float) -> np.ndarray:
    """[[1, -theta(-k0)], [theta(k0), 1]]."""
    return np.array([[1.0, -_theta(-k0)], [_theta(k0), 1.0]])


def electron_from_M(k: FourVector, eps: float) -> dict[PropComponent, np.ndarray]:
    """All four electron components rebuilt as M diag(D_F, -~D_F) M."""
    num = slash(k) + MASS * IDENTITY
    dF = 1.0 / (MASS**2 - k.sq() - 1j * eps)
    mm = M_matrix(k.t)
    inner = np.diag([dF, -np.conj(dF)])
    scal = mm @ inner @ mm
    return {
        PropComponent.C11: scal[0, 0] * num,
        PropComponent.C12: scal[0, 1] * num,
        PropComponent.C21: scal[1, 0] * num,
        PropComponent.C22: scal[1, 1] * num,
    }


def electron_component_residual(k: FourVector, eps: float) -> np.ndarray:
    """D^(11) + D^(22) - D^(12) - D^(21); O(eps) off shell."""
    d = {c: electron_D(c, k, eps) for c in PropComponent}
    return d[PropComponent.C11] + d[PropComponent.C22] - d[PropComponent.C12] - d[PropComponent.C21]
