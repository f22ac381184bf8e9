"""Scenario parameters shared by every computation (units m = 1)."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .diracalg import MASS, FourVector

ALPHA_PHYSICAL = 1 / 137.035999
E_PHYSICAL = float(np.sqrt(4 * np.pi * ALPHA_PHYSICAL))


class SchemeTag(str, enum.Enum):
    EPSILON = "Epsilon"
    LAMBDA = "Lambda"


@dataclass(frozen=True)
class ThermalParams:
    """One scenario.

    ``q3`` is the electron 3-momentum and ``p3`` the momentum transfer; the
    energies follow from the mass shell and the nonrelativistic dispersion
    p0 = ((q+p)^2 - q^2) / 2m, never set independently.
    """

    beta: float = 1e3
    e: float = E_PHYSICAL
    eps: float = 1e-8
    Lambda: float = 0.1
    lam: float = 1e-5
    lambda0: float = 1e-6
    lambda_w: float = 1e-9
    q3: tuple[float, float, float] = (0.0, 0.0, 0.0)
    p3: tuple[float, float, float] = (0.0, 0.0, 0.0)
    i_lambda: complex = 1.0
    factors: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "q3", tuple(float(x) for x in self.q3))
        object.__setattr__(self, "p3", tuple(float(x) for x in self.p3))

    @property
    def alpha(self) -> float:
        return self.e**2 / (4 * np.pi)

    @property
    def T(self) -> float:
        return 1.0 / self.beta

    @property
    def q(self) -> FourVector:
        return FourVector.on_shell(self.q3)

    @property
    def p(self) -> FourVector:
        q3 = np.array(self.q3)
        p3 = np.array(self.p3)
        p0 = ((q3 + p3) @ (q3 + p3) - q3 @ q3) / (2 * MASS)
        return FourVector(p0, *p3)

    @property
    def q_out(self) -> FourVector:
        """q + p with the nonrelativistic p0 (on shell up to O(p^4))."""
        return self.q + self.p

    @property
    def q_out_onshell(self) -> FourVector:
        """On-shell vector with 3-momentum q + p; used for the outgoing spinor."""
        return FourVector.on_shell(np.array(self.q3) + np.array(self.p3))

    def with_(self, **kw) -> "ThermalParams":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q3"] = list(self.q3)
        d["p3"] = list(self.p3)
        d["i_lambda"] = [complex(self.i_lambda).real, complex(self.i_lambda).imag]
        return d
