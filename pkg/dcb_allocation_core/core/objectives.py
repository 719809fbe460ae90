# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from dcb_allocation_core.core.exceptions import EmptyBoxError, InfeasibleBoxesError, NonPositiveWidthError
from dcb_allocation_core.core.mac_phy import activity_ratio, lambda_L
from dcb_allocation_core.core.models.scheme import BnbNode, ProblemInstance

logger = logging.getLogger(__name__)

WATER_LEVEL_TOL = 1e-9
MAX_BONDED = 8.0
FITTED_DOMAIN = (1.0, 830.0)


def valid_widths(instance: ProblemInstance) -> Tuple[int, ...]:
    return instance.activity.durations.widths


def per_width_throughput(instance: ProblemInstance, width: int) -> float:
    return lambda_L(instance.activity) / (1.0 + activity_ratio(instance.activity, width))


def h_exact(k: Sequence[int], instance: ProblemInstance) -> float:
    """Sum of A / (1 + rho(k_i)); infeasible schemes score zero."""
    widths = valid_widths(instance)
    if any(v not in widths for v in k) or sum(k) > instance.num_channels:
        return 0.0
    return float(sum(per_width_throughput(instance, int(v)) for v in k))


def h_fitted(k: Sequence[float], instance: ProblemInstance) -> float:
    """Sum of A / (1 + b / k_i^a), every coordinate through the fitted ratio."""
    values = np.asarray(k, dtype=float)
    if np.any(values <= 0):
        raise NonPositiveWidthError(f"channel counts must be positive, got {list(k)}")
    fit = instance.fit
    return float(np.sum(lambda_L(instance.activity) / (1.0 + fit.b / values ** fit.a)))


def g_exact(n: Sequence[float], instance: ProblemInstance) -> float:
    """Sum of A n_k / (1 + B n_k) with B = rho(1)."""
    values = np.asarray(n, dtype=float)
    big_b = activity_ratio(instance.activity, 1)
    return float(np.sum(lambda_L(instance.activity) * values / (1.0 + big_b * values)))


def water_fill(lower: Sequence[float], upper: Sequence[float], total: float) -> np.ndarray:
    """x_i = clip(c, l_i, u_i) with the common level c chosen so that sum(x) = total."""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)

    def excess(level: float) -> float:
        return float(np.sum(np.clip(level, lo, hi)) - total)

    a, b = float(np.min(lo)), float(np.max(hi))
    if excess(a) >= 0:
        return np.clip(a, lo, hi)
    if excess(b) <= 0:
        return np.clip(b, lo, hi)
    level = brentq(excess, a, b, xtol=WATER_LEVEL_TOL * 1e-3, rtol=4 * np.finfo(float).eps)
    return np.clip(level, lo, hi)


def _boxes(size: int, lower: Optional[Sequence[float]], upper: Optional[Sequence[float]],
           default_lower: float, default_upper: float) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    lo = tuple(float(v) for v in lower) if lower is not None else (default_lower,) * size
    hi = tuple(float(v) for v in upper) if upper is not None else (default_upper,) * size
    if len(lo) != size or len(hi) != size:
        raise ValueError(f"boxes must have {size} entries")
    return lo, hi


def relax_channels(instance: ProblemInstance, lower: Optional[Sequence[float]] = None,
                   upper: Optional[Sequence[float]] = None, depth: int = 0) -> BnbNode:
    """Maximize h_fitted subject to sum(k) <= K and l_i <= k_i <= u_i."""
    lo, hi = _boxes(instance.num_wlans, lower, upper, 1.0, MAX_BONDED)
    if any(l > u for l, u in zip(lo, hi)):
        raise EmptyBoxError(f"empty box: lower {lo} exceeds upper {hi}")
    if sum(lo) > instance.num_channels + WATER_LEVEL_TOL:
        raise EmptyBoxError(f"lower bounds {lo} need more than {instance.num_channels} channels")
    target = min(float(instance.num_channels), sum(hi))
    solution = tuple(float(v) for v in water_fill(lo, hi, target))
    value = h_fitted(solution, instance)
    bound = max(value, envelope_bound(instance, lo, hi))
    return BnbNode(lo, hi, solution, value, bound, depth)


def relax_wlans(instance: ProblemInstance, lower: Optional[Sequence[float]] = None,
                upper: Optional[Sequence[float]] = None, depth: int = 0) -> BnbNode:
    """Maximize g subject to sum(n) = N and l_k <= n_k <= u_k."""
    n, k = instance.num_wlans, instance.num_channels
    lo, hi = _boxes(k, lower, upper, 1.0, float(max(1, n - k + 1)))
    if any(l > u for l, u in zip(lo, hi)) or sum(lo) > n + WATER_LEVEL_TOL or sum(hi) < n - WATER_LEVEL_TOL:
        raise InfeasibleBoxesError(f"boxes {lo}..{hi} cannot hold {n} WLANs")
    solution = tuple(float(v) for v in water_fill(lo, hi, float(n)))
    value = g_exact(solution, instance)
    return BnbNode(lo, hi, solution, value, value, depth)


def _upper_hull(points: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    hull: List[Tuple[float, float]] = []
    for point in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(point)
    return hull


def envelope_bound(instance: ProblemInstance, lower: Sequence[float], upper: Sequence[float]) -> float:
    """Upper bound on h_exact over integer completions of the box.

    Pinned coordinates contribute their exact value. Free coordinates are bounded by the
    concave envelope of the tabulated per-width throughputs, filled greedily by slope.
    """
    widths = valid_widths(instance)
    hull = _upper_hull([(float(w), per_width_throughput(instance, w)) for w in widths])
    pinned = [l for l, u in zip(lower, upper) if l == u]
    free = [(l, u) for l, u in zip(lower, upper) if l != u]

    if any(int(v) != v or int(v) not in widths for v in pinned):
        return 0.0
    value = sum(per_width_throughput(instance, int(v)) for v in pinned)
    budget = instance.num_channels - sum(pinned)
    if not free:
        return value if budget >= 0 else 0.0

    def hull_value(x: float) -> float:
        xs, ys = zip(*hull)
        return float(np.interp(x, xs, ys))

    start = [max(l, hull[0][0]) for l, _ in free]
    stop = [min(u, hull[-1][0]) for _, u in free]
    if any(a > b for a, b in zip(start, stop)):
        return 0.0
    value += sum(hull_value(x) for x in start)
    budget -= sum(start)
    if budget < -WATER_LEVEL_TOL:
        return 0.0

    segments = []
    for i, (a, b) in enumerate(zip(start, stop)):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            left, right = max(a, x1), min(b, x2)
            if right > left:
                segments.append(((y2 - y1) / (x2 - x1), right - left))
    for slope, length in sorted(segments, key=lambda item: -item[0]):
        if budget <= 0 or slope <= 0:
            break
        step = min(length, budget)
        value += slope * step
        budget -= step
    return value


@dataclass
class ConcavityReport:
    objective: str
    samples: int
    max_second_difference: float
    max_cross_ratio: float
    points: List[Tuple[float, ...]] = field(default_factory=list, repr=False)

    @property
    def concave(self) -> bool:
        return self.max_second_difference < 0 and self.max_cross_ratio <= 1e-6


def second_difference(func: Callable[[np.ndarray], float], x: np.ndarray, i: int) -> float:
    step = 1e-3 * max(1.0, abs(x[i]))
    up, down = x.copy(), x.copy()
    up[i] += step
    down[i] -= step
    return (func(up) - 2.0 * func(x) + func(down)) / step ** 2


def cross_difference(func: Callable[[np.ndarray], float], x: np.ndarray, i: int, j: int) -> float:
    hi_, hj = 1e-3 * max(1.0, abs(x[i])), 1e-3 * max(1.0, abs(x[j]))
    total = 0.0
    for si, sj, sign in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        y = x.copy()
        y[i] += si * hi_
        y[j] += sj * hj
        total += sign * func(y)
    return total / (4.0 * hi_ * hj)


def concavity_check(objective: str, dims: int, samples: int, instance: ProblemInstance,
                    seed: int = 0, domain: Optional[Tuple[float, float]] = None) -> ConcavityReport:
    """Finite-difference concavity diagnostics for h_fitted ("h") or g ("g")."""
    if objective == "h":
        func = lambda x: h_fitted(x, instance)  # noqa: E731
        low, high = domain or FITTED_DOMAIN
    elif objective == "g":
        func = lambda x: g_exact(x, instance)  # noqa: E731
        low, high = domain or (1.0, float(max(2, instance.num_wlans)))
    else:
        raise ValueError(f"unknown objective {objective!r}; use 'h' or 'g'")

    rng = np.random.default_rng(seed)
    worst_second = -np.inf
    worst_cross = 0.0
    points = []
    for _ in range(samples):
        x = rng.uniform(low, high, size=dims)
        # keep the stencil inside the domain
        x = np.clip(x, low * (1 + 2e-3), high / (1 + 2e-3))
        points.append(tuple(x))
        scale = max(1.0, abs(func(x)))
        for i in range(dims):
            worst_second = max(worst_second, second_difference(func, x, i))
            for j in range(i + 1, dims):
                worst_cross = max(worst_cross, abs(cross_difference(func, x, i, j)) / scale)
    report = ConcavityReport(objective, samples, float(worst_second), float(worst_cross), points)
    logger.debug("concavity of %s over %d samples: max d2=%.6g, max cross=%.3g",
                 objective, samples, report.max_second_difference, report.max_cross_ratio)
    return report
