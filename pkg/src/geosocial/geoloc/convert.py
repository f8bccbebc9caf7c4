"""Conversions from raw location metrics to distances and bearings."""

from __future__ import annotations

import math

from ..errors import EstimationError
from .models import TWO_PI, PathLossModel

SPEED_OF_LIGHT_M_S = 299_792_458.0


def toa_to_distance(t_s: float) -> float:
    """Distance implied by a one-way time of arrival: d = c * t."""
    if t_s < 0:
        raise EstimationError("negative_time", f"arrival time must be non-negative, got {t_s}")
    return SPEED_OF_LIGHT_M_S * t_s


def distance_to_rss(d_m: float, model: PathLossModel) -> float:
    """Forward log-distance model: rss(d) = p0 - 10*n*log10(d/d0)."""
    if d_m <= 0:
        raise EstimationError("bad_distance", f"distance must be positive, got {d_m}")
    return model.p0_dbm - 10.0 * model.exponent_n * math.log10(d_m / model.d0_m)


def rss_to_distance(rss_dbm: float, model: PathLossModel) -> float:
    """Invert the log-distance model: d = d0 * 10^((p0 - rss) / (10*n))."""
    return model.d0_m * 10.0 ** ((model.p0_dbm - rss_dbm) / (10.0 * model.exponent_n))


def poa_to_distances(phase_rad: float, wavelength_m: float, k_max: int) -> list[float]:
    """Candidate distances for a carrier phase with integer-cycle ambiguity.

    d_k = (phase/2pi + k) * wavelength for k = 0..k_max.
    """
    if not (0.0 <= phase_rad < TWO_PI):
        raise EstimationError("bad_phase", f"phase must lie in [0, 2*pi), got {phase_rad}")
    if wavelength_m <= 0:
        raise EstimationError("bad_wavelength", f"wavelength must be positive, got {wavelength_m}")
    if k_max < 0:
        raise EstimationError("bad_ambiguity", f"k_max must be non-negative, got {k_max}")
    fraction = phase_rad / TWO_PI
    return [(fraction + k) * wavelength_m for k in range(k_max + 1)]
