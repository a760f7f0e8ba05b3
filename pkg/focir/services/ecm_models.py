"""
Equivalent-circuit models and their forward parameter maps.

Randles circuit: R_inf in series with one R1||C1 pair (integer order).
FO-ECM: R_inf in series with n branches R_i||CPE_i, CPE impedance 1/(C_i s^alpha_i).
A branch with an open resistor (R_i = infinity) is a Warburg element.

Per-branch discrete coefficients:

    a_{i,0} = alpha_i - Ts^alpha_i / (R_i C_i)     (alpha_i for a Warburg branch)
    a_{i,j} = (-1)^j binom(alpha_i, j+1),  j >= 1
    b_i     = Ts^alpha_i / C_i,   m_i = 1,   d = R_inf
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from focir.errors import DomainError
from focir.services.frac_core import a_coefficients
from focir.services.ss_sim import ContinuousFoSystem, DiscreteFoSystem

logger = logging.getLogger(__name__)


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return value


@dataclass(frozen=True)
class RandlesParams:
    """theta = [R_inf, R1, C1] in ohms, ohms, farads."""

    r_inf: float
    r1: float
    c1: float

    def __post_init__(self):
        object.__setattr__(self, "r_inf", _positive(self.r_inf, "R_inf"))
        object.__setattr__(self, "r1", _positive(self.r1, "R1"))
        object.__setattr__(self, "c1", _positive(self.c1, "C1"))

    def theta(self) -> np.ndarray:
        return np.array([self.r_inf, self.r1, self.c1])


@dataclass(frozen=True)
class BranchParams:
    """
    One R||CPE branch.

    r: resistance in ohms, None for an open circuit (Warburg element)
    c: CPE constant, F cm^-2 s^(alpha-1); the area normalization is documentation only
    alpha: CPE exponent in (0, 1]; 1 reduces the CPE to an ideal capacitor
    """

    r: Optional[float]
    c: float
    alpha: float

    def __post_init__(self):
        if self.r is not None:
            object.__setattr__(self, "r", _positive(self.r, "Branch resistance"))
        object.__setattr__(self, "c", _positive(self.c, "CPE constant"))
        alpha = float(self.alpha)
        if not 0.0 < alpha <= 1.0:
            raise DomainError(f"CPE exponent must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def is_open(self) -> bool:
        return self.r is None


@dataclass(frozen=True)
class FoEcmParams:
    """R_inf plus n R||CPE branches, sampled every ts seconds."""

    r_inf: float
    branches: Tuple[BranchParams, ...]
    ts: float

    def __post_init__(self):
        r_inf = float(self.r_inf)
        if not math.isfinite(r_inf) or r_inf < 0:
            raise DomainError(f"R_inf must be non-negative and finite, got {self.r_inf}")
        object.__setattr__(self, "r_inf", r_inf)
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise DomainError("An FO-ECM needs at least one branch")
        object.__setattr__(self, "ts", _positive(self.ts, "Sample time"))

    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([branch.alpha for branch in self.branches])

    def theta(self) -> np.ndarray:
        """Parameter vector [R_inf, R_1..R_n, C_1..C_n, alpha_1..alpha_n]; open resistors are inf."""
        rs = [math.inf if branch.is_open else branch.r for branch in self.branches]
        cs = [branch.c for branch in self.branches]
        return np.array([self.r_inf, *rs, *cs, *self.alphas])

    @classmethod
    def from_theta(cls, theta: Sequence[float], ts: float) -> "FoEcmParams":
        theta = [float(value) for value in theta]
        if (len(theta) - 1) % 3 != 0 or len(theta) < 4:
            raise DomainError(f"theta must have 1 + 3n entries, got {len(theta)}")
        n = (len(theta) - 1) // 3
        rs, cs, alphas = theta[1:1 + n], theta[1 + n:1 + 2 * n], theta[1 + 2 * n:]
        branches = tuple(
            BranchParams(r=None if math.isinf(r) else r, c=c, alpha=alpha)
            for r, c, alpha in zip(rs, cs, alphas)
        )
        return cls(r_inf=theta[0], branches=branches, ts=ts)

    def permuted(self, order: Sequence[int]) -> "FoEcmParams":
        return FoEcmParams(r_inf=self.r_inf, branches=tuple(self.branches[i] for i in order), ts=self.ts)


@dataclass(frozen=True)
class BranchCoefficients:
    """Discrete coefficients of one branch; ``a_tail[j - 1]`` is a_{i,j}."""

    a0: float
    a_tail: np.ndarray
    b: float
    d: float
    m: float = 1.0


def randles_tf_coeffs(p: RandlesParams, ts: float) -> Tuple[float, float, float]:
    """
    First-order transfer function (f1 z + f0) / (z + g0) of the Randles circuit.

    Args:
        p: Randles parameters
        ts: Sample time in seconds

    Returns:
        (f1, f0, g0)
    """
    ts = _positive(ts, "Sample time")
    pole = 1.0 - ts / (p.r1 * p.c1)
    f1 = p.r_inf
    f0 = -p.r_inf * pole + ts / p.c1
    g0 = -pole
    return f1, f0, g0


def branch_coefficients(p: FoEcmParams, i: int, T: int) -> BranchCoefficients:
    """Coefficients a_{i,0}, a_{i,1..T}, b_i, d of branch i for horizon T."""
    if T < 1:
        raise DomainError(f"Horizon must be at least 1, got {T}")
    branch = p.branches[i]
    scale = p.ts ** branch.alpha
    leak = 0.0 if branch.is_open else scale / (branch.r * branch.c)
    return BranchCoefficients(
        a0=branch.alpha - leak,
        a_tail=a_coefficients(branch.alpha, T),
        b=scale / branch.c,
        d=p.r_inf,
    )


def to_state_space(p: FoEcmParams, T: int) -> DiscreteFoSystem:
    """Discrete state-space model with the CPE voltages as states."""
    coefficients = [branch_coefficients(p, i, T) for i in range(p.n)]
    return DiscreteFoSystem(
        alphas=p.alphas,
        A0=np.diag([c.a0 for c in coefficients]),
        a_tail=np.vstack([c.a_tail for c in coefficients]),
        B=np.array([c.b for c in coefficients]),
        M=np.ones(p.n),
        D=p.r_inf,
        Ts=p.ts,
    )


def to_continuous(p: FoEcmParams) -> ContinuousFoSystem:
    """Continuous model d^alpha_i v_i/dt^alpha_i = -v_i/(R_i C_i) + u/C_i, y = sum v_i + R_inf u."""
    decay = [0.0 if b.is_open else -1.0 / (b.r * b.c) for b in p.branches]
    return ContinuousFoSystem(
        Abar=np.diag(decay),
        Bbar=np.array([1.0 / b.c for b in p.branches]),
        M=np.ones(p.n),
        D=p.r_inf,
        alphas=p.alphas,
    )


def as_randles(p: FoEcmParams) -> Optional[RandlesParams]:
    """The Randles parameters of a one-branch, integer-order model, else None."""
    if p.n != 1:
        return None
    branch = p.branches[0]
    if branch.alpha != 1.0 or branch.is_open or p.r_inf <= 0:
        return None
    return RandlesParams(r_inf=p.r_inf, r1=branch.r, c1=branch.c)
