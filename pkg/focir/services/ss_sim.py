"""
Discrete-time fractional-order state-space simulation.

The Grünwald-Letnikov discretization turns d^alpha x/dt^alpha = Abar x + Bbar u into

    x_{k+1} = sum_{j=0}^{k} A_j x_{k-j} + B u_k,    y_k = M x_k + D u_k

where A_0 = diag(alpha) + diag(Ts^alpha) Abar and A_j (j >= 1) = diag(a_j(alpha_i)).
Every new state depends on the whole state history (the system is non-Markov).
Pre-history before k = 0 is taken as zero.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from focir.errors import DimensionError, DomainError
from focir.services.frac_core import a_coefficients

logger = logging.getLogger(__name__)

Summation = Literal["compensated", "pairwise"]

_BLOCK = 128


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float, ndmin=ndim)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.flags.writeable = False
    return array


def _orders(alphas: Sequence[float]) -> np.ndarray:
    orders = _frozen([float(a) for a in alphas], 1, "alphas")
    if np.any(~np.isfinite(orders)) or np.any(orders <= 0) or np.any(orders > 1):
        raise DomainError(f"State orders must lie in (0, 1], got {orders.tolist()}")
    return orders


@dataclass(frozen=True)
class ContinuousFoSystem:
    """d^alpha x/dt^alpha = Abar x + Bbar u, y = M x + D u (single input, single output)."""

    Abar: np.ndarray
    Bbar: np.ndarray
    M: np.ndarray
    D: float
    alphas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Abar", _frozen(self.Abar, 2, "Abar"))
        object.__setattr__(self, "Bbar", _frozen(self.Bbar, 1, "Bbar"))
        object.__setattr__(self, "M", _frozen(self.M, 1, "M"))
        object.__setattr__(self, "D", float(self.D))
        object.__setattr__(self, "alphas", _orders(self.alphas))
        n = self.alphas.size
        if self.Abar.shape != (n, n) or self.Bbar.size != n or self.M.size != n:
            raise DimensionError(
                f"Inconsistent dimensions: Abar {self.Abar.shape}, Bbar {self.Bbar.shape}, "
                f"M {self.M.shape}, {n} orders"
            )

    @property
    def n(self) -> int:
        return self.alphas.size


@dataclass(frozen=True)
class DiscreteFoSystem:
    """
    Discrete non-Markov system {A_0, A_j (diagonal, j >= 1), B, M, D}.

    ``a_tail[i, j - 1]`` is the diagonal entry of A_j for state i.
    """

    alphas: np.ndarray
    A0: np.ndarray
    a_tail: np.ndarray
    B: np.ndarray
    M: np.ndarray
    D: float
    Ts: float

    def __post_init__(self):
        object.__setattr__(self, "alphas", _orders(self.alphas))
        object.__setattr__(self, "A0", _frozen(self.A0, 2, "A0"))
        object.__setattr__(self, "a_tail", _frozen(self.a_tail, 2, "a_tail"))
        object.__setattr__(self, "B", _frozen(self.B, 1, "B"))
        object.__setattr__(self, "M", _frozen(self.M, 1, "M"))
        object.__setattr__(self, "D", float(self.D))
        object.__setattr__(self, "Ts", float(self.Ts))
        n = self.alphas.size
        if self.A0.shape != (n, n) or self.a_tail.shape[0] != n or self.B.size != n or self.M.size != n:
            raise DimensionError(
                f"Inconsistent dimensions: A0 {self.A0.shape}, a_tail {self.a_tail.shape}, "
                f"B {self.B.shape}, M {self.M.shape}, {n} orders"
            )
        if not self.Ts > 0:
            raise DomainError(f"Sample time must be positive, got {self.Ts}")

    @property
    def n(self) -> int:
        return self.alphas.size

    @property
    def j_max(self) -> int:
        return self.a_tail.shape[1]

    def A(self, j: int) -> np.ndarray:
        """Matrix A_j of the compact state equation."""
        if j == 0:
            return np.array(self.A0)
        return np.diag(self.tail(j)[:, j - 1])

    def tail(self, depth: int) -> np.ndarray:
        """Tail coefficients for lags 1..depth, regenerated from the orders past the stored depth."""
        if depth <= self.j_max:
            return self.a_tail[:, :depth]
        return np.vstack([a_coefficients(alpha, depth) for alpha in self.alphas])


@dataclass(frozen=True)
class SimulationTrace:
    """Input, state and output sequences for k = 0..T."""

    u: np.ndarray
    x: np.ndarray
    y: np.ndarray
    Ts: float

    @property
    def time(self) -> np.ndarray:
        return np.arange(self.u.size) * self.Ts


def discretize(sys: ContinuousFoSystem, Ts: float, j_max: int) -> DiscreteFoSystem:
    """
    Grünwald-Letnikov discretization of a continuous fractional-order system.

    Args:
        sys: Continuous system
        Ts: Sample time in seconds
        j_max: GL memory depth stored with the system

    Returns:
        DiscreteFoSystem with A_0 = diag(alpha) + diag(Ts^alpha) Abar and B = diag(Ts^alpha) Bbar
    """
    if not Ts > 0:
        raise DomainError(f"Sample time must be positive, got {Ts}")
    if j_max < 1:
        raise DomainError(f"j_max must be at least 1, got {j_max}")
    scale = np.diag(Ts ** sys.alphas)
    A0 = np.diag(sys.alphas) + scale @ sys.Abar
    B = scale @ sys.Bbar
    tail = np.vstack([a_coefficients(alpha, j_max) for alpha in sys.alphas])
    return DiscreteFoSystem(alphas=sys.alphas, A0=A0, a_tail=tail, B=B, M=sys.M, D=sys.D, Ts=Ts)


def _history_sum(coeffs: np.ndarray, history: np.ndarray, summation: Summation) -> float:
    """Sum of coeffs * history; block sums are accumulated with exact rounding (math.fsum)."""
    products = coeffs * history
    if summation == "pairwise":
        return float(products.sum())
    full = products.size - products.size % _BLOCK
    partials = products[:full].reshape(-1, _BLOCK).sum(axis=1).tolist()
    partials.append(float(products[full:].sum()))
    return math.fsum(partials)


def simulate(
    sys: DiscreteFoSystem,
    u: Sequence[float],
    x0: Optional[Sequence[float]] = None,
    *,
    window: Optional[int] = None,
    summation: Summation = "compensated",
) -> SimulationTrace:
    """
    Run the full-history convolution x_{k+1} = sum_j A_j x_{k-j} + B u_k.

    Args:
        sys: Discrete system
        u: Input samples u_0..u_T
        x0: Initial state (zero when omitted)
        window: Optional memory truncation; None keeps the entire history
        summation: "compensated" (exactly rounded block accumulation) or "pairwise"

    Returns:
        SimulationTrace with x of shape (T+1, n) and y_k = M x_k + D u_k
    """
    u = np.asarray(u, dtype=float).ravel()
    if u.size < 1:
        raise DimensionError("Input must contain at least one sample")
    n = sys.n
    state0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel()
    if state0.size != n:
        raise DimensionError(f"Initial state has {state0.size} entries, system has {n} states")
    if window is not None and window < 1:
        raise DomainError(f"Truncation window must be at least 1, got {window}")

    steps = u.size - 1
    depth = steps - 1 if window is None else min(window, steps - 1)
    reversed_tail = sys.tail(depth)[:, ::-1].copy() if depth >= 1 else np.zeros((n, 0))
    logger.debug(f"Simulating {steps} steps, {n} states, memory depth {depth}, summation={summation}")

    states = np.zeros((n, steps + 1))
    states[:, 0] = state0
    history = np.zeros(n)
    for k in range(steps):
        lags = min(k, depth)
        if lags:
            for i in range(n):
                history[i] = _history_sum(
                    reversed_tail[i, depth - lags:], states[i, k - lags:k], summation
                )
        states[:, k + 1] = sys.A0 @ states[:, k] + history + sys.B * u[k]

    y = sys.M @ states + sys.D * u
    return SimulationTrace(u=u, x=states.T.copy(), y=y, Ts=sys.Ts)
