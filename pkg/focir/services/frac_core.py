"""
Fractional-calculus kernel.

Log-gamma, generalized binomial coefficients, Grünwald-Letnikov weights,
the a_j tail coefficients of the discrete fractional state-space model and
commensurability testing. Everything here is a pure function of its inputs.

Notation: for an order alpha, the GL weights are w_j = (-1)^j binom(alpha, j)
and the tail coefficients are a_j = -w_{j+1} = (-1)^j binom(alpha, j+1), j >= 1.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import gammaln

from focir.errors import DomainError

logger = logging.getLogger(__name__)


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class FractionalOrder:
    """Derivative order strictly inside (0, 1)."""

    alpha: float

    def __post_init__(self):
        value = float(self.alpha)
        if not math.isfinite(value) or not 0.0 < value < 1.0:
            raise DomainError(f"Fractional order must lie in the open interval (0, 1), got {self.alpha}")
        object.__setattr__(self, "alpha", value)

    def __float__(self) -> float:
        return self.alpha


OrderLike = Union[FractionalOrder, float]


def as_order(alpha: OrderLike) -> FractionalOrder:
    """Coerce a float to a validated FractionalOrder."""
    if isinstance(alpha, FractionalOrder):
        return alpha
    return FractionalOrder(alpha)


@dataclass(frozen=True)
class GlWeightSequence:
    """Grünwald-Letnikov weights w_0..w_jmax for one order."""

    alpha: FractionalOrder
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(self.weights))

    @property
    def j_max(self) -> int:
        return self.weights.size - 1

    def __getitem__(self, j: int) -> float:
        return float(self.weights[j])


@dataclass(frozen=True)
class ASequence:
    """
    Tail coefficients a_1..a_jmax of one state.

    ``values[j - 1]`` holds a_j; indexing the sequence itself uses j directly.
    ``alpha`` is a plain float so the integer-order limit (alpha = 1, all
    coefficients zero) can be represented by the state-space layer.
    """

    alpha: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "values", _readonly(self.values))

    @property
    def j_max(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, j: int) -> float:
        if not 1 <= j <= self.values.size:
            raise IndexError(f"a_j defined for 1 <= j <= {self.values.size}, got j={j}")
        return float(self.values[j - 1])

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype)


def log_gamma(x: float) -> float:
    """
    Natural logarithm of the gamma function.

    Args:
        x: Positive real argument

    Returns:
        ln Gamma(x)
    """
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires a positive argument, got {x}")
    return float(gammaln(x))


def frac_binomial(alpha: float, j: int) -> float:
    """
    Generalized binomial coefficient binom(alpha, j).

    Evaluated as the finite product prod_{m<j} (alpha - m)/(m + 1), which stays
    finite where the gamma quotient Gamma(alpha+1)/(Gamma(j+1) Gamma(alpha+1-j))
    has poles.
    """
    if j < 0:
        raise DomainError(f"Binomial index must be non-negative, got {j}")
    if j == 0:
        return 1.0
    m = np.arange(j, dtype=float)
    return float(np.prod((alpha - m) / (m + 1.0)))


def gl_weights(alpha: OrderLike, j_max: int) -> GlWeightSequence:
    """
    Grünwald-Letnikov weights w_j = (-1)^j binom(alpha, j) for j = 0..j_max.

    Generated by the one-term recursion w_j = w_{j-1} (j - 1 - alpha) / j.
    """
    order = as_order(alpha)
    if j_max < 0:
        raise DomainError(f"j_max must be non-negative, got {j_max}")
    j = np.arange(1, j_max + 1, dtype=float)
    factors = np.concatenate(([1.0], (j - 1.0 - order.alpha) / j))
    return GlWeightSequence(alpha=order, weights=np.cumprod(factors))


def a_coefficients(alpha: float, j_max: int) -> np.ndarray:
    """
    Raw tail coefficients [a_1, ..., a_jmax] for any order in [0, 1].

    Seeds a_1 = alpha (1 - alpha) / 2 and applies a_{j+1} = -(alpha - j - 1)/(j + 2) a_j.
    Both endpoints of [0, 1] give identically zero tails.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"Tail coefficients need an order in [0, 1], got {alpha}")
    if j_max < 1:
        raise DomainError(f"j_max must be at least 1, got {j_max}")
    j = np.arange(1, j_max, dtype=float)
    factors = np.concatenate(([alpha * (1.0 - alpha) / 2.0], -(alpha - j - 1.0) / (j + 2.0)))
    return np.cumprod(factors)


def a_sequence(alpha: OrderLike, j_max: int) -> ASequence:
    """
    Tail coefficients a_j = -(-1)^{j+1} binom(alpha, j+1) for j = 1..j_max.

    Args:
        alpha: Fractional order in (0, 1)
        j_max: Last index, at least 1

    Returns:
        ASequence with values a_1..a_jmax
    """
    order = as_order(alpha)
    return ASequence(alpha=order.alpha, values=a_coefficients(order.alpha, j_max))


def a_value(alpha: float, j: int) -> float:
    """Single coefficient a_j(alpha); alpha may sit on the closed interval [0, 1]."""
    return float(a_coefficients(alpha, j)[-1])


def a_log_derivative(alpha: float, j: int) -> float:
    """d ln a_j / d alpha = 1/alpha - sum_{m=1..j} 1/(m - alpha)."""
    m = np.arange(1, j + 1, dtype=float)
    return float(1.0 / alpha - np.sum(1.0 / (m - alpha)))


def ratio_residuals(a: Union[ASequence, Sequence[float], np.ndarray], alpha: float) -> np.ndarray:
    """
    Relative residuals of the ratio recursion a_{j+1} = -(alpha - j - 1)/(j + 2) a_j.

    Element k corresponds to the pair (a_{k+1}, a_{k+2}).
    """
    values = np.asarray(a, dtype=float)
    j = np.arange(1, values.size, dtype=float)
    predicted = -(alpha - j - 1.0) / (j + 2.0) * values[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(values[1:] - predicted) / np.abs(values[1:])


def a_curves(alphas: Iterable[float], js: Iterable[int]) -> np.ndarray:
    """Table of a_j(alpha): one row per alpha, one column per j."""
    js = [int(j) for j in js]
    depth = max(js)
    rows = [a_coefficients(alpha, depth)[np.asarray(js) - 1] for alpha in alphas]
    return np.vstack(rows)


def is_commensurate(alphas: Iterable[float], base: float, tol: float = 1e-9) -> bool:
    """
    Test whether every order is a positive integer multiple of ``base``.

    Args:
        alphas: Derivative orders (positive)
        base: Candidate base order
        tol: Allowed distance of alpha/base from the nearest integer

    Returns:
        True if the system is commensurate with respect to ``base``
    """
    if not base > 0:
        raise DomainError(f"Base order must be positive, got {base}")
    ratios = np.asarray(list(alphas), dtype=float) / base
    if np.any(ratios <= 0):
        raise DomainError("Derivative orders must be positive")
    nearest = np.rint(ratios)
    result = bool(np.all((nearest >= 1) & (np.abs(ratios - nearest) <= tol)))
    logger.debug(f"Commensurability check: ratios={ratios.tolist()} base={base} -> {result}")
    return result
