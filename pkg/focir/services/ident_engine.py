"""
Structural identifiability: inverting coefficient maps.

Three procedures, one per supported structure:

- Randles: closed-form inverse of (f1, f0, g0).
- Single CPE: read (d, a_0, b, a_1..a_T) off the coefficients, recover the order
  from the preimages of two tail coefficients, then C and R in closed form.
- Two CPEs: the orders solve a two-equation system in (g_0, g_1, g_2) obtained
  from the tail ratio recursion; the remaining parameters follow backwards
  from the leading coefficients. Solutions come in branch-permuted pairs.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from focir.config import Settings, settings
from focir.errors import (
    DimensionError,
    DomainError,
    InconsistentCoefficientsError,
    NoSolutionError,
    NotSingleCpeStructureError,
    SingularStructureError,
    UnsupportedStructureError,
)
from focir.services.ecm_models import BranchParams, FoEcmParams, RandlesParams, as_randles
from focir.services.frac_core import (
    FractionalOrder,
    a_coefficients,
    a_log_derivative,
    a_value,
    ratio_residuals,
)
from focir.services.tf_builder import CoefficientVector, StructureTag, branch_tf, coefficient_map

logger = logging.getLogger(__name__)

Params = Union[FoEcmParams, RandlesParams]

# Golden-section bracket ends for the unimodal a_j(alpha)
_EDGE = 1e-9
# Relative slack when a probe sits exactly on the maximum of a_j
_PEAK_RTOL = 1e-12
# alpha - a_0 below this is an open (Warburg) resistor
_OPEN_TOL = 1e-12
# Coefficients that agree on the order are grouped within this distance
_CLUSTER_TOL = 1e-6
# Distinct orders replace a double root only if their residual is this much smaller
_SPLIT_GAIN = 0.1


class IdentifiabilityKind(str, Enum):
    GLOBALLY_IDENTIFIABLE = "globally_identifiable"
    IDENTIFIABLE = "identifiable"
    UNIDENTIFIABLE = "unidentifiable"


@dataclass(frozen=True)
class Classification:
    """Identifiability class with the solution count behind it."""

    kind: IdentifiabilityKind
    count: int = 1
    multiplicity: int = 1

    @property
    def label(self) -> str:
        if self.kind is IdentifiabilityKind.IDENTIFIABLE:
            if self.multiplicity > 1:
                return f"identifiable({self.count}-with-multiplicity)"
            return f"identifiable({self.count})"
        return self.kind.value

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class IdentifiabilityResult:
    """Recovered parameter sets with their reconstruction residuals."""

    solutions: Tuple[Params, ...]
    classification: Classification
    residuals: Tuple[float, ...]
    structure: StructureTag


@dataclass(frozen=True)
class LemmaSystem:
    """The three lowest denominator coefficients of the two-CPE transfer function."""

    g0: float
    g1: float
    g2: float
    T: int

    def __post_init__(self):
        if self.g0 == 0 or not math.isfinite(self.g0):
            raise InconsistentCoefficientsError("g_0 must be non-zero for a two-CPE structure")
        if self.T < 2:
            raise DomainError(f"Horizon must be at least 2, got {self.T}")

    @classmethod
    def from_coefficients(cls, c: CoefficientVector) -> "LemmaSystem":
        g = c.g
        return cls(g0=float(g[0]), g1=float(g[1]), g2=float(g[2]), T=c.T)


def classify(
    solutions: Sequence[Params], *, continuum: bool = False, multiplicity: int = 1
) -> Classification:
    """
    Classify a completed inversion.

    Args:
        solutions: Distinct parameter sets reproducing the coefficients
        continuum: Solver met a flat direction confirmed by the Jacobian rank
        multiplicity: Multiplicity of a single coincident solution

    Returns:
        Classification (global, identifiable(k) or unidentifiable)
    """
    if continuum:
        return Classification(IdentifiabilityKind.UNIDENTIFIABLE, count=len(solutions))
    if not solutions:
        raise InconsistentCoefficientsError("No parameter set reproduces the coefficients")
    if len(solutions) == 1 and multiplicity == 1:
        return Classification(IdentifiabilityKind.GLOBALLY_IDENTIFIABLE)
    return Classification(IdentifiabilityKind.IDENTIFIABLE, count=len(solutions), multiplicity=multiplicity)


def reconstruction_residual(params: Params, c: CoefficientVector) -> float:
    """max |C(params) - c| / max |c|."""
    image = coefficient_map(params, c.T, ts=c.Ts).values
    if image.size != c.values.size:
        return math.inf
    scale = max(float(np.max(np.abs(c.values))), np.finfo(float).tiny)
    return float(np.max(np.abs(image - c.values)) / scale)


def forward_jacobian_rank(
    params: FoEcmParams, T: int, *, rel_step: float = 1e-6, rank_rtol: float = 1e-7
) -> Tuple[int, int]:
    """
    Numerical rank of the coefficient map's Jacobian in log-parameters.

    Open resistors are not parameters. Columns are normalized before the
    singular-value test.

    Returns:
        (rank, number of free parameters)
    """
    theta = params.theta()
    free = [k for k, value in enumerate(theta) if math.isfinite(value)]
    columns = []
    for k in free:
        up, down = theta.copy(), theta.copy()
        up[k] *= 1.0 + rel_step
        down[k] *= 1.0 - rel_step
        if k > 2 * params.n:
            up[k] = min(up[k], 1.0)
        forward = coefficient_map(FoEcmParams.from_theta(up, params.ts), T).values
        backward = coefficient_map(FoEcmParams.from_theta(down, params.ts), T).values
        column = (forward - backward) / math.log(up[k] / down[k])
        norm = np.linalg.norm(column)
        columns.append(column / norm if norm > 0 else column)
    singular = np.linalg.svd(np.column_stack(columns), compute_uv=False)
    rank = int(np.sum(singular > rank_rtol * singular[0]))
    logger.debug(f"Jacobian singular values {singular.tolist()} -> rank {rank}/{len(free)}")
    return rank, len(free)


def invert_randles(f1: float, f0: float, g0: float, ts: float) -> RandlesParams:
    """
    Closed-form inverse of the Randles coefficient map.

    Args:
        f1, f0, g0: Coefficients of (f1 z + f0) / (z + g0)
        ts: Sample time in seconds

    Returns:
        RandlesParams with R_inf = f1, C1 = Ts/(f0 - f1 g0), R1 = Ts/((1 + g0) C1)
    """
    gain = f0 - f1 * g0
    pole = 1.0 + g0
    if gain == 0 or pole == 0:
        raise SingularStructureError(
            f"Degenerate Randles coefficients (f0 - f1*g0 = {gain}, 1 + g0 = {pole}): parameters on the domain boundary"
        )
    c1 = ts / gain
    r1 = ts / (pole * c1)
    if f1 <= 0 or c1 <= 0 or r1 <= 0:
        raise SingularStructureError(
            f"Randles inverse leaves the positive domain: R_inf={f1}, R1={r1}, C1={c1}"
        )
    return RandlesParams(r_inf=f1, r1=r1, c1=c1)


def alpha_preimages(j: int, value: float, *, xtol: float = 1e-12) -> List[float]:
    """
    Orders alpha in (0, 1) with a_j(alpha) = value.

    a_j is unimodal on [0, 1] and vanishes at both ends, so there are two roots
    below the maximum, one at it, and none above it.
    """
    if not value > 0:
        raise NoSolutionError(f"a_{j} is positive on (0, 1); probe value {value} is not attainable")
    peak = minimize_scalar(
        lambda alpha: -a_value(alpha, j), bracket=(_EDGE, 0.5, 1.0 - _EDGE), method="golden", tol=xtol
    )
    alpha_peak = float(peak.x)
    peak_value = a_value(alpha_peak, j)
    if value > peak_value * (1.0 + _PEAK_RTOL):
        raise NoSolutionError(
            f"Probe a_{j} = {value} exceeds the attainable maximum {peak_value} (at alpha = {alpha_peak})"
        )
    if value >= peak_value * (1.0 - _PEAK_RTOL):
        return [alpha_peak]

    def gap(alpha: float) -> float:
        return a_value(alpha, j) - value

    return [brentq(gap, 0.0, alpha_peak, xtol=xtol), brentq(gap, alpha_peak, 1.0, xtol=xtol)]


def _polish_order(alpha: float, j: int, value: float, iterations: int = 3) -> float:
    """Newton steps on ln a_j(alpha) = ln value."""
    for _ in range(iterations):
        slope = a_log_derivative(alpha, j)
        if slope == 0:
            break
        step = (math.log(a_value(alpha, j)) - math.log(value)) / slope
        candidate = alpha - step
        if not 0.0 < candidate < 1.0:
            break
        alpha = candidate
        if abs(step) <= 4 * np.finfo(float).eps * alpha:
            break
    return alpha


def recover_alpha_single(
    a_probe: Mapping[int, float], *, xtol: float = 1e-12, match_tol: float = 1e-8
) -> FractionalOrder:
    """
    Recover one order from two or more tail coefficients.

    Each probe a_j contributes its preimage (<= 2 orders); the order is the common
    root, i.e. the candidate at which every probe is matched within ``match_tol``
    (relative). The result is polished on the best-conditioned probe.

    Args:
        a_probe: Map j -> a_j with at least two distinct j >= 1
        xtol: Root bracketing tolerance in alpha
        match_tol: Relative mismatch allowed at a common root

    Returns:
        FractionalOrder
    """
    probes = {int(j): float(value) for j, value in a_probe.items()}
    if len(probes) < 2:
        raise DomainError("At least two distinct coefficient indices are needed to recover an order")
    if min(probes) < 1:
        raise DomainError(f"Coefficient indices must be >= 1, got {sorted(probes)}")

    candidates = sorted({root for j, value in probes.items() for root in alpha_preimages(j, value, xtol=xtol)})
    matched = []
    for alpha in candidates:
        mismatch = max(abs(a_value(alpha, j) - value) / value for j, value in probes.items())
        if mismatch <= match_tol:
            matched.append((alpha, mismatch))
    logger.debug(f"Order preimages {candidates} -> common roots {matched}")

    if not matched:
        raise InconsistentCoefficientsError(
            f"Coefficients {probes} have no common order within tolerance {match_tol}"
        )
    if matched[-1][0] - matched[0][0] > _CLUSTER_TOL:
        raise InconsistentCoefficientsError(
            f"Coefficients {probes} admit several orders: {[alpha for alpha, _ in matched]}"
        )

    alpha = min(matched, key=lambda item: item[1])[0]
    j_best = max(probes, key=lambda j: abs(a_log_derivative(alpha, j)))
    return FractionalOrder(_polish_order(alpha, j_best, probes[j_best]))


def _branch(alpha: float, a0: float, b: float, ts: float) -> Optional[BranchParams]:
    """Branch parameters from (alpha, a_0, b); None outside the physical domain."""
    leak = alpha - a0
    if not b > 0 or leak < -_OPEN_TOL:
        return None
    c = ts ** alpha / b
    r = None if leak <= _OPEN_TOL else b / leak
    try:
        return BranchParams(r=r, c=c, alpha=alpha)
    except DomainError:
        return None


def _require_structure(c: CoefficientVector, structure: StructureTag, min_T: int, deg: int) -> None:
    if c.structure is not structure:
        raise UnsupportedStructureError(f"Expected a {structure.value} coefficient vector, got {c.structure.value}")
    if c.T < min_T:
        raise DomainError(f"{structure.value} inversion needs T >= {min_T}, got {c.T}")
    if c.deg != deg:
        raise DimensionError(f"{structure.value} with T={c.T} needs degree {deg}, got {c.deg}")


def invert_single_cpe(
    c: CoefficientVector,
    *,
    xtol: float = 1e-12,
    match_tol: float = 1e-8,
    consistency_rtol: float = 1e-8,
    residual_tol: float = 1e-6,
) -> IdentifiabilityResult:
    """
    Invert the single-CPE coefficient map.

    d = f_{T+1}, a_0 = -g_T, b = f_T - g_T f_{T+1}, a_j = -g_{T-j}; the order comes
    from (a_1, a_2) and is checked against every other a_j; then
    R_inf = d, C = Ts^alpha / b, R = Ts^alpha / ((alpha - a_0) C).
    """
    T = c.T
    _require_structure(c, StructureTag.SINGLE_CPE, 2, T + 1)
    f, g = c.f, c.g
    d = f[T + 1]
    a0 = -g[T]
    b = f[T] - g[T] * f[T + 1]
    tail = -g[T - 1::-1]
    if np.any(tail <= 0):
        raise NotSingleCpeStructureError("Tail coefficients a_j must all be positive")

    order = recover_alpha_single({1: tail[0], 2: tail[1]}, xtol=xtol, match_tol=match_tol)
    alpha = order.alpha
    worst = float(np.max(ratio_residuals(tail, alpha))) if T > 1 else 0.0
    if worst > consistency_rtol:
        raise NotSingleCpeStructureError(
            f"Tail coefficients break the ratio recursion for alpha={alpha} (max relative residual {worst:.3e})"
        )

    branch = _branch(alpha, a0, b, c.Ts)
    if branch is None or d < 0:
        raise InconsistentCoefficientsError(
            f"Recovered parameters leave the physical domain (d={d}, a0={a0}, b={b}, alpha={alpha})"
        )
    solution = FoEcmParams(r_inf=d, branches=(branch,), ts=c.Ts)
    residual = reconstruction_residual(solution, c)
    if residual > residual_tol:
        raise InconsistentCoefficientsError(f"Recovered parameters reproduce the coefficients only to {residual:.3e}")
    logger.info(f"Single-CPE inversion: alpha={alpha}, residual={residual:.3e}")
    return IdentifiabilityResult(
        solutions=(solution,), classification=classify([solution]), residuals=(residual,),
        structure=StructureTag.SINGLE_CPE,
    )


def lemma_residuals(alpha1, alpha2, sys: LemmaSystem, *, normalized: bool = True):
    """
    Residuals of the two relations linking (g_0, g_1, g_2) to the orders.

        r1 = g1 + g0 (T+1) (1/(alpha1 - T) + 1/(alpha2 - T))
        r2 = g2 - g0 (T+1) (a_hat + b_hat + c_hat)

    With ``normalized`` both are divided by g0. Accepts scalars or arrays.
    """
    T = sys.T
    alpha1 = np.asarray(alpha1, dtype=float)
    alpha2 = np.asarray(alpha2, dtype=float)
    pole_sum = 1.0 / (alpha1 - T) + 1.0 / (alpha2 - T)
    a_hat = T / ((alpha2 - T) * (alpha2 - T + 1))
    b_hat = (T + 1) / ((alpha1 - T) * (alpha2 - T))
    c_hat = T / ((alpha1 - T) * (alpha1 - T + 1))
    quadratic = (a_hat + c_hat) + b_hat
    if normalized:
        r1 = sys.g1 / sys.g0 + (T + 1) * pole_sum
        r2 = sys.g2 / sys.g0 - (T + 1) * quadratic
    else:
        r1 = sys.g1 + sys.g0 * (T + 1) * pole_sum
        r2 = sys.g2 - sys.g0 * (T + 1) * quadratic
    if r1.ndim == 0:
        return float(r1), float(r2)
    return r1, r2


def solve_two_cpe_alphas(
    sys: LemmaSystem,
    *,
    scan_points: int = 2000,
    xtol: float = 1e-12,
    double_root_tol: float = 1e-12,
    merge_tol: float = 1e-9,
    detect_double_root: bool = True,
) -> List[Tuple[float, float]]:
    """
    Solve the two relations for (alpha1, alpha2) in (0, 1)^2.

    The first relation is linear in 1/(alpha2 - T), giving alpha2 as a function of
    alpha1; the second is scanned along alpha1 for sign changes and each bracket
    polished with Brent's method. The symmetric point alpha1 = alpha2 is always a
    scan node: a residual vanishing there is a double root, unless
    ``detect_double_root`` is off and only sign changes count.

    Returns:
        Pairs sorted by alpha1; normally two, permutations of each other
    """
    T = sys.T
    pole_sum = -(sys.g1 / sys.g0) / (T + 1)

    def partner(alpha1):
        with np.errstate(divide="ignore", invalid="ignore"):
            return T + 1.0 / (pole_sum - 1.0 / (np.asarray(alpha1, dtype=float) - T))

    def reduced(alpha1):
        return lemma_residuals(alpha1, partner(alpha1), sys)[1]

    symmetric = T + 2.0 / pole_sum
    if detect_double_root and 0.0 < symmetric < 1.0 and abs(reduced(symmetric)) <= double_root_tol:
        logger.debug(f"Double root at the symmetric point alpha = {symmetric}")
        return [(float(symmetric), float(symmetric))]

    grid = np.linspace(0.0, 1.0, scan_points + 2)[1:-1]
    if 0.0 < symmetric < 1.0:
        grid = np.sort(np.append(grid, symmetric))
    partners = partner(grid)
    valid = np.isfinite(partners) & (partners > 0.0) & (partners < 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(valid, reduced(grid), np.nan)

    roots: List[float] = []
    for k in range(grid.size - 1):
        if not (valid[k] and valid[k + 1]):
            continue
        if values[k] == 0.0:
            roots.append(float(grid[k]))
        elif values[k] * values[k + 1] < 0.0:
            roots.append(brentq(reduced, grid[k], grid[k + 1], xtol=xtol))
    if valid[-1] and values[-1] == 0.0:
        roots.append(float(grid[-1]))

    pairs: List[Tuple[float, float]] = []
    for root in sorted(roots):
        if pairs and abs(root - pairs[-1][0]) <= merge_tol:
            continue
        pairs.append((float(root), float(partner(root))))
    logger.debug(f"Two-order scan over {grid.size} nodes found {len(pairs)} root(s): {pairs}")

    if not pairs:
        raise InconsistentCoefficientsError("The order relations have no solution in (0, 1)^2")
    if len(pairs) > 2:
        logger.warning(f"Order relations admit {len(pairs)} solutions; expected a permuted pair: {pairs}")
    return pairs


def _two_branch_candidates(
    alphas: Tuple[float, float], c: CoefficientVector, merge_tol: float
) -> Iterator[Tuple[FoEcmParams, bool]]:
    """
    Parameter sets for one order pair, one per assignment of a_{1,0}, a_{2,0}.

    a_{1,0} + a_{2,0} = -g_{2T+1} and a_{1,0} a_{2,0} = g_{2T} + a_{1,1} + a_{2,1};
    b_1, b_2 then solve the (linear) numerator identity
    f - d P_1 P_2 = b_1 z^T P_2 + b_2 z^T P_1 in the least-squares sense.
    Yields (params, continuum) where continuum flags exchangeable identical branches.
    """
    T = c.T
    top = 2 * T + 2
    f, g = c.f, c.g
    d = f[top]
    tails = [a_coefficients(alpha, T) for alpha in alphas]
    total = -g[top - 1]
    product = g[top - 2] + tails[0][0] + tails[1][0]

    discriminant = total * total - 4.0 * product
    if discriminant < -merge_tol * max(1.0, total * total):
        logger.debug(f"Orders {alphas}: no real split of a_0 (discriminant {discriminant})")
        return
    spread = math.sqrt(max(discriminant, 0.0))
    first = 0.5 * (total + math.copysign(spread, total))
    second = product / first if first != 0 else total - first
    if abs(first - second) <= merge_tol * max(1.0, abs(first), abs(second)):
        first = second = 0.5 * total

    assignments = [(first, second)] if first == second else [(first, second), (second, first)]
    for a10, a20 in assignments:
        den1 = branch_tf(1.0, a10, tails[0], T).denominator.coeffs
        den2 = branch_tf(1.0, a20, tails[1], T).denominator.coeffs
        # z^T P_j has degree 2T+1; the z^{2T+2} row belongs to R_inf alone
        shift, top_row = np.zeros(T), np.zeros(1)
        design = np.column_stack(
            (np.concatenate((shift, den2, top_row)), np.concatenate((shift, den1, top_row)))
        )
        rhs = f - d * np.convolve(den1, den2)
        (b1, b2), _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
        branches = (_branch(alphas[0], a10, b1, c.Ts), _branch(alphas[1], a20, b2, c.Ts))
        if None in branches or d < 0:
            continue
        yield FoEcmParams(r_inf=d, branches=branches, ts=c.Ts), rank < 2


def _accept_pairs(
    pairs: Sequence[Tuple[float, float]], c: CoefficientVector, merge_tol: float, residual_tol: float
) -> Tuple[List[Tuple[FoEcmParams, float]], bool]:
    """Best parameter set per order pair, kept when it reproduces ``c`` within ``residual_tol``."""
    accepted: List[Tuple[FoEcmParams, float]] = []
    continuum = False
    for alphas in pairs:
        scored = [
            (reconstruction_residual(params, c), params, flat)
            for params, flat in _two_branch_candidates(alphas, c, merge_tol)
        ]
        if not scored:
            continue
        residual, params, flat = min(scored, key=lambda item: item[0])
        logger.debug(f"Orders {alphas}: best residual {residual:.3e} over {len(scored)} assignment(s)")
        if residual <= residual_tol:
            accepted.append((params, residual))
            continuum = continuum or flat
    return accepted, continuum


def invert_two_cpe(
    c: CoefficientVector,
    *,
    scan_points: int = 2000,
    xtol: float = 1e-12,
    double_root_tol: float = 1e-12,
    merge_tol: float = 1e-9,
    residual_tol: float = 1e-6,
    rank_rtol: float = 1e-7,
) -> IdentifiabilityResult:
    """
    Invert the two-CPE coefficient map.

    R_inf = f_{2T+2}; the order pairs solve the relations in (g_0, g_1, g_2); for
    each pair the tails follow from the orders, a_{1,0}, a_{2,0} from g_{2T+1}, g_{2T}
    and b_1, b_2 from the numerator; C_i = Ts^alpha_i / b_i, R_i = b_i/(alpha_i - a_{i,0}).

    A double root is only kept when no pair of distinct nearby orders reproduces the
    coefficients markedly better.
    """
    T = c.T
    _require_structure(c, StructureTag.TWO_CPE, 3, 2 * T + 2)
    sys = LemmaSystem.from_coefficients(c)
    scan = dict(scan_points=scan_points, xtol=xtol, double_root_tol=double_root_tol, merge_tol=merge_tol)
    pairs = solve_two_cpe_alphas(sys, **scan)
    accepted, continuum = _accept_pairs(pairs, c, merge_tol, residual_tol)

    double = len(pairs) == 1 and pairs[0][0] == pairs[0][1]
    if double:
        try:
            split = solve_two_cpe_alphas(sys, detect_double_root=False, **scan)
        except InconsistentCoefficientsError:
            split = []
        split = [pair for pair in split if pair[0] != pair[1]]
        split_accepted, split_continuum = _accept_pairs(split, c, merge_tol, residual_tol)
        best_double = min((residual for _, residual in accepted), default=math.inf)
        if len(split_accepted) >= 2 and max(r for _, r in split_accepted) < _SPLIT_GAIN * best_double:
            logger.debug(f"Distinct orders {split} beat the double root {pairs[0]} (residual {best_double:.3e})")
            pairs, accepted, continuum, double = split, split_accepted, split_continuum, False

    if not accepted:
        raise InconsistentCoefficientsError("No two-CPE parameter set reproduces the coefficients")
    accepted.sort(key=lambda item: tuple(item[0].alphas) + tuple(b.c for b in item[0].branches))

    if continuum:
        rank, size = forward_jacobian_rank(accepted[0][0], T, rank_rtol=rank_rtol)
        continuum = rank < size
    solutions = [params for params, _ in accepted]
    classification = classify(solutions, continuum=continuum, multiplicity=2 if double else 1)
    logger.info(f"Two-CPE inversion: {len(solutions)} solution(s), {classification.label}")
    return IdentifiabilityResult(
        solutions=tuple(solutions),
        classification=classification,
        residuals=tuple(residual for _, residual in accepted),
        structure=StructureTag.TWO_CPE,
    )


def _relative_error(truth: np.ndarray, estimate: np.ndarray) -> float:
    if truth.shape != estimate.shape:
        return math.inf
    errors = []
    for t, e in zip(truth, estimate):
        if math.isinf(t) or math.isinf(e):
            errors.append(0.0 if t == e else math.inf)
        else:
            errors.append(abs(e - t) / max(abs(t), np.finfo(float).tiny))
    return max(errors)


@dataclass(frozen=True)
class RoundtripAudit:
    """Coefficient map followed by inversion, compared against the true parameters."""

    truth: Params
    coefficients: CoefficientVector
    result: IdentifiabilityResult
    max_rel_error: float
    truth_in_solutions: bool


class IdentificationService:
    """Structure dispatch and round-trip audits with configured tolerances."""

    def __init__(self, config: Settings = settings):
        self.config = config

    def identify(self, c: CoefficientVector) -> IdentifiabilityResult:
        """
        Invert a coefficient vector according to its structure tag.

        Args:
            c: Coefficient vector

        Returns:
            IdentifiabilityResult
        """
        cfg = self.config
        logger.info(f"Identifying {c.structure.value} structure, T={c.T}, Ts={c.Ts}")
        if c.structure is StructureTag.RANDLES:
            f1, f0, g0 = (float(v) for v in c.values)
            solution = invert_randles(f1, f0, g0, c.Ts)
            return IdentifiabilityResult(
                solutions=(solution,), classification=classify([solution]),
                residuals=(reconstruction_residual(solution, c),), structure=StructureTag.RANDLES,
            )
        if c.structure is StructureTag.SINGLE_CPE:
            return invert_single_cpe(
                c, xtol=cfg.alpha_xtol, match_tol=cfg.alpha_match_tol,
                consistency_rtol=cfg.consistency_rtol, residual_tol=cfg.residual_tol,
            )
        if c.structure is StructureTag.TWO_CPE:
            return invert_two_cpe(
                c, scan_points=cfg.scan_points, xtol=cfg.lemma_xtol, double_root_tol=cfg.double_root_tol,
                merge_tol=cfg.merge_tol, residual_tol=cfg.residual_tol, rank_rtol=cfg.rank_rtol,
            )
        raise UnsupportedStructureError(
            f"No inversion procedure for structure '{c.structure.value}' (at most two CPE branches)"
        )

    def roundtrip(self, params: FoEcmParams, T: int, tol: Optional[float] = None) -> RoundtripAudit:
        """
        Map parameters to coefficients, invert, and measure the parameter error.

        The error is the smallest max-relative parameter error over all solutions
        and branch orders of the truth.
        """
        tol = self.config.roundtrip_tol if tol is None else tol
        coefficients = coefficient_map(params, T)
        result = self.identify(coefficients)

        randles = as_randles(params)
        if randles is not None:
            truths = [randles.theta()]
        else:
            orders = [(0,)] if params.n == 1 else [(0, 1), (1, 0)] if params.n == 2 else [tuple(range(params.n))]
            truths = [params.permuted(order).theta() for order in orders]
        error = min(
            _relative_error(truth, solution.theta()) for truth in truths for solution in result.solutions
        )
        logger.info(f"Round trip: {len(result.solutions)} solution(s), max relative error {error:.3e}")
        return RoundtripAudit(
            truth=randles if randles is not None else params,
            coefficients=coefficients,
            result=result,
            max_rel_error=error,
            truth_in_solutions=error <= tol,
        )


# Global service instance
ident_service = IdentificationService()
