# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from dcb_allocation_core.core.exceptions import DegenerateFitError, NonPositiveWidthError
from dcb_allocation_core.core.models.params import ActivityModel, FittedActivityModel, MacPhyParams

logger = logging.getLogger(__name__)


def default_activity_model() -> ActivityModel:
    return ActivityModel.from_params(MacPhyParams())


def activity_ratio(model: ActivityModel, width: int, wlan: Optional[int] = None) -> float:
    """rho(k') = T(k') / E[B]."""
    return model.durations.duration(width) * model.rate(wlan)


def fitted_activity_ratio(fit: FittedActivityModel, k: float) -> float:
    if not k > 0:
        raise NonPositiveWidthError(f"channel count must be positive, got {k!r}")
    return fit.b / k ** fit.a


def fit_power_law(points: Sequence[Tuple[float, float]]) -> FittedActivityModel:
    """Least-squares fit of log(rho) = log(b) - a log(k)."""
    if len(points) < 2:
        raise DegenerateFitError("at least two points are needed for a power-law fit")
    k = np.array([p[0] for p in points], dtype=float)
    rho = np.array([p[1] for p in points], dtype=float)
    if np.any(k <= 0) or np.any(rho <= 0):
        raise DegenerateFitError("power-law fit needs strictly positive points")
    if np.allclose(k, k[0]):
        raise DegenerateFitError("all channel counts are equal")

    slope, intercept = np.polyfit(np.log(k), np.log(rho), 1)
    a, b = float(-slope), float(np.exp(intercept))
    if a <= 0:
        raise DegenerateFitError(f"fitted exponent {a:.6f} is not positive; ratios must decrease with k")

    fitted = b / k ** a
    if np.allclose(rho, rho[0]) or np.allclose(fitted, fitted[0]):
        correlation = 1.0
    else:
        correlation = float(np.corrcoef(rho, fitted)[0, 1])

    result = FittedActivityModel(a=a, b=b, correlation=correlation)
    if not result.acceptable:
        logger.warning("power-law fit correlation %.4f is below %.2f", correlation,
                       FittedActivityModel.MIN_CORRELATION)
    logger.debug("fitted %s over %d points", result, len(points))
    return result


def fit_duration_table(model: ActivityModel) -> FittedActivityModel:
    points = [(float(w), activity_ratio(model, w)) for w in model.durations.widths]
    return fit_power_law(points)


def lambda_L(model: ActivityModel, wlan: Optional[int] = None) -> float:
    """The constant A = lambda * L in bits per second."""
    return model.rate(wlan) * model.payload(wlan)


def isolated_throughput(model: ActivityModel, width: int, wlan: Optional[int] = None) -> float:
    """Throughput of a WLAN that never shares its channels: lambda L (1 - p_e) / (1 + rho)."""
    return lambda_L(model, wlan) * (1.0 - model.packet_error_prob) / (1.0 + activity_ratio(model, width, wlan))
