"""
Dense polynomial algebra and monic transfer-function assembly.

A branch with gain b and coefficients a_0..a_T has the transfer function

    b z^T / (z^{T+1} - sum_{j=0}^{T} a_j z^{T-j})

and the n-branch circuit is H(z) = d + sum_i b_i z^T / P_i(z), assembled over the
product denominator prod_i P_i(z), which is monic because every factor is.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import lfilter

from focir.errors import DimensionError, DomainError
from focir.services.ecm_models import FoEcmParams, RandlesParams, as_randles, branch_coefficients, randles_tf_coeffs
from focir.services.frac_core import ASequence

logger = logging.getLogger(__name__)


class StructureTag(str, Enum):
    RANDLES = "randles"
    SINGLE_CPE = "single_cpe"
    TWO_CPE = "two_cpe"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in z; ``coeffs[k]`` multiplies z^k."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.trim_zeros(np.atleast_1d(np.asarray(self.coeffs, dtype=float)), "b")
        if coeffs.size == 0:
            coeffs = np.zeros(1)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return P.polyval(z, self.coeffs)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact product of two polynomials (coefficient convolution)."""
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


@dataclass(frozen=True)
class BranchTF:
    """One R||CPE branch: numerator b z^T over the degree T+1 monic denominator."""

    b: float
    a0: float
    a_tail: np.ndarray
    T: int

    @property
    def numerator(self) -> Polynomial:
        coeffs = np.zeros(self.T + 1)
        coeffs[self.T] = self.b
        return Polynomial(coeffs)

    @property
    def denominator(self) -> Polynomial:
        coeffs = np.empty(self.T + 2)
        coeffs[self.T + 1] = 1.0
        coeffs[self.T] = -self.a0
        coeffs[: self.T] = -self.a_tail[: self.T][::-1]
        return Polynomial(coeffs)

    def __call__(self, z):
        return self.b * z ** self.T / self.denominator(z)


@dataclass(frozen=True)
class MonicRationalTF:
    """
    H(z) = (f_deg z^deg + ... + f_0) / (z^deg + g_{deg-1} z^{deg-1} + ... + g_0).

    ``f[k]`` and ``g[k]`` multiply z^k; the leading denominator 1 is implicit.
    """

    f: np.ndarray
    g: np.ndarray

    @property
    def deg(self) -> int:
        return self.g.size

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self.f)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(np.append(self.g, 1.0))

    def evaluate(self, z):
        return P.polyval(z, self.f) / P.polyval(z, np.append(self.g, 1.0))


@dataclass(frozen=True)
class CoefficientVector:
    """
    Image of the coefficient map: (f_deg, ..., f_0, g_{deg-1}, ..., g_0).

    For the Randles structure the vector is (f_1, f_0, g_0).
    """

    values: np.ndarray
    structure: StructureTag
    T: int
    Ts: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "structure", StructureTag(self.structure))
        if values.size % 2 == 0:
            raise DimensionError(f"Coefficient vector must have odd length 2*deg + 1, got {values.size}")

    @property
    def deg(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def f(self) -> np.ndarray:
        """Numerator coefficients indexed by power."""
        return self.values[: self.deg + 1][::-1].copy()

    @property
    def g(self) -> np.ndarray:
        """Denominator coefficients (without the leading 1) indexed by power."""
        return self.values[self.deg + 1:][::-1].copy()

    @classmethod
    def from_powers(cls, f, g, structure, T: int, Ts: float) -> "CoefficientVector":
        f = np.asarray(f, dtype=float)
        g = np.asarray(g, dtype=float)
        if f.size != g.size + 1:
            raise DimensionError(f"Numerator needs deg+1 = {g.size + 1} coefficients, got {f.size}")
        return cls(values=np.concatenate((f[::-1], g[::-1])), structure=structure, T=T, Ts=Ts)

    def as_tf(self) -> MonicRationalTF:
        return MonicRationalTF(f=self.f, g=self.g)


def branch_tf(b: float, a0: float, a_tail: Union[ASequence, Sequence[float], np.ndarray], T: int) -> BranchTF:
    """
    Transfer function of one branch for horizon T.

    Args:
        b: Numerator gain
        a0: Coefficient of z^T in the denominator (negated)
        a_tail: a_1..a_T (at least T values)
        T: Horizon (data length)

    Returns:
        BranchTF with denominator z^{T+1} - a0 z^T - sum_j a_j z^{T-j}
    """
    if T < 1:
        raise DomainError(f"Horizon must be at least 1, got {T}")
    tail = np.asarray(a_tail, dtype=float).ravel()
    if tail.size < T:
        raise DimensionError(f"Branch needs a_1..a_{T}, only {tail.size} coefficients supplied")
    tail = tail[:T].copy()
    tail.flags.writeable = False
    return BranchTF(b=float(b), a0=float(a0), a_tail=tail, T=T)


def assemble_tf(d: float, branches: Sequence[BranchTF]) -> MonicRationalTF:
    """
    Combine d + sum_i b_i z^T / P_i(z) into a single monic rational function.

    The denominator is prod_i P_i(z); the numerator is d prod_i P_i + sum_i b_i z^T prod_{k != i} P_k.
    """
    if not branches:
        raise DimensionError("At least one branch is required")
    horizons = {branch.T for branch in branches}
    if len(horizons) != 1:
        raise DimensionError(f"All branches must share one horizon, got {sorted(horizons)}")

    denominators = [branch.denominator for branch in branches]
    den = Polynomial(np.ones(1))
    for factor in denominators:
        den = poly_mul(den, factor)

    numerator = d * den.coeffs
    for i, branch in enumerate(branches):
        term = branch.numerator
        for k, factor in enumerate(denominators):
            if k != i:
                term = poly_mul(term, factor)
        numerator = P.polyadd(numerator, term.coeffs)

    deg = den.degree
    f = np.zeros(deg + 1)
    f[: numerator.size] = numerator[: deg + 1]
    logger.debug(f"Assembled {len(branches)} branch(es), horizon {branches[0].T}, degree {deg}")
    return MonicRationalTF(f=f, g=den.coeffs[:deg].copy())


def impulse_response(tf: MonicRationalTF, n_samples: int) -> np.ndarray:
    """First ``n_samples`` terms h_0, h_1, ... of the z^{-1} power series of H(z)."""
    impulse = np.zeros(n_samples)
    impulse[0] = 1.0
    return lfilter(tf.f[::-1], np.append(1.0, tf.g[::-1]), impulse)


def coefficient_map(
    params: Union[FoEcmParams, RandlesParams], T: int, *, ts: Optional[float] = None
) -> CoefficientVector:
    """
    Coefficient map theta -> (f_deg, ..., f_0, g_{deg-1}, ..., g_0).

    Args:
        params: Circuit parameters; a one-branch integer-order model is treated as Randles
        T: Horizon (data length)
        ts: Sample time, required only for bare RandlesParams

    Returns:
        CoefficientVector tagged randles, single_cpe, two_cpe or unsupported (n > 2)
    """
    if isinstance(params, FoEcmParams):
        randles = as_randles(params)
        if randles is not None:
            params, ts = randles, params.ts
    if isinstance(params, RandlesParams):
        if ts is None:
            raise DomainError("A sample time is required for the Randles coefficient map")
        return CoefficientVector(values=randles_tf_coeffs(params, ts), structure=StructureTag.RANDLES, T=1, Ts=ts)

    branches = []
    for i in range(params.n):
        coefficients = branch_coefficients(params, i, T)
        branches.append(branch_tf(coefficients.m * coefficients.b, coefficients.a0, coefficients.a_tail, T))
    tf = assemble_tf(params.r_inf, branches)
    structure = {1: StructureTag.SINGLE_CPE, 2: StructureTag.TWO_CPE}.get(params.n, StructureTag.UNSUPPORTED)
    logger.debug(f"Coefficient map: {structure.value}, T={T}, {2 * tf.deg + 1} coefficients")
    return CoefficientVector.from_powers(tf.f, tf.g, structure, T, params.ts)
