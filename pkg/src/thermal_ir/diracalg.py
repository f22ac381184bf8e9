"""Dirac algebra in the standard (Dirac) representation, units m = 1.

Matrices are plain ``numpy`` complex arrays of shape (4, 4).  The metric is
diag(+1, -1, -1, -1).

Tilde conjugation
-----------------
The "tilde" operation conjugates complex numbers while leaving every gamma
matrix untouched.  In the Dirac representation gamma^0, gamma^1, gamma^3 are
real and gamma^2 is purely imaginary, so entrywise conjugation alone would
flip the sign of gamma^2.  We undo that with the fixed similarity map
``C = gamma^2 gamma^5``, which commutes with gamma^0,1,3 and anticommutes with
gamma^2::

    ~A = C conj(A) C^{-1}

The map is antilinear, multiplicative (~(AB) = ~A ~B) and an involution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASS = 1.0
ONSHELL_TOL = 1e-10

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
IDENTITY = np.eye(4, dtype=complex)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

_GAMMA = (
    np.block([[_I2, _Z2], [_Z2, -_I2]]),
    *(np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI),
)
GAMMA5 = np.block([[_Z2, _I2], [_I2, _Z2]])

_TILDE_C = _GAMMA[2] @ GAMMA5
_TILDE_CINV = np.linalg.inv(_TILDE_C)


class OffShellError(ValueError):
    """Raised when a momentum expected on the mass shell is not."""


@dataclass(frozen=True)
class FourVector:
    """Real Minkowski 4-vector (t, x, y, z) in units of m."""

    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "FourVector":
        a = np.asarray(arr, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def on_shell(cls, p3, mass: float = MASS) -> "FourVector":
        """Positive-energy on-shell vector with 3-momentum ``p3``."""
        p3 = np.asarray(p3, dtype=float)
        return cls(float(np.sqrt(mass**2 + p3 @ p3)), *map(float, p3))

    @property
    def arr(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "FourVector") -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def sq(self) -> float:
        return self.dot(self)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.arr + other.arr)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.arr - other.arr)

    def __neg__(self) -> "FourVector":
        return FourVector.from_array(-self.arr)

    def __mul__(self, c: float) -> "FourVector":
        return FourVector.from_array(c * self.arr)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Bispinor:
    components: np.ndarray
    sigma: int

    def bar(self) -> np.ndarray:
        return self.components.conj() @ _GAMMA[0]


def gamma(mu: int) -> np.ndarray:
    """Return a copy of gamma^mu in the Dirac representation."""
    if mu not in (0, 1, 2, 3):
        raise IndexError(f"gamma index must be 0..3, got {mu!r}")
    return _GAMMA[mu].copy()


def slash(v: FourVector) -> np.ndarray:
    """v_mu gamma^mu."""
    return v.t * _GAMMA[0] - v.x * _GAMMA[1] - v.y * _GAMMA[2] - v.z * _GAMMA[3]


def tilde(a: np.ndarray) -> np.ndarray:
    """Complex conjugation treating the gamma matrices as real."""
    return _TILDE_C @ np.conj(a) @ _TILDE_CINV


def contract_gamma(a: np.ndarray) -> np.ndarray:
    """gamma^mu A gamma_mu."""
    out = _GAMMA[0] @ a @ _GAMMA[0]
    for mu in (1, 2, 3):
        out = out - _GAMMA[mu] @ a @ _GAMMA[mu]
    return out


def check_on_shell(q: FourVector, mass: float = MASS, tol: float = ONSHELL_TOL) -> None:
    if q.t <= 0 or abs(q.sq() - mass**2) > tol * mass**2:
        raise OffShellError(f"momentum {q} is off the mass shell (q^2 = {q.sq():.3e})")


def spinor_u(q: FourVector, sigma: int) -> Bispinor:
    """Positive-energy bispinor with ubar u = 1, spin label 1 or 2."""
    if sigma not in (1, 2):
        raise ValueError("sigma must be 1 or 2")
    check_on_shell(q)
    chi = np.zeros(2, dtype=complex)
    chi[sigma - 1] = 1.0
    e = q.t
    sig_p = sum(c * s for c, s in zip(q.spatial, _PAULI))
    lower = sig_p @ chi / (e + MASS)
    norm = np.sqrt((e + MASS) / (2 * MASS))
    return Bispinor(norm * np.concatenate([chi, lower]), sigma)


def sandwich(qbar: FourVector, sigma_out: int, m: np.ndarray, q: FourVector, sigma_in: int) -> complex:
    """ubar_{sigma'}(qbar) M u_sigma(q)."""
    return complex(spinor_u(qbar, sigma_out).bar() @ m @ spinor_u(q, sigma_in).components)
