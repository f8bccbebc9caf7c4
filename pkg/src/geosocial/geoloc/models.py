"""Value types for the measurement-driven position estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..errors import ValidationError

TWO_PI = 2.0 * math.pi


class MeasurementKind(str, Enum):
    TOA = "TOA"
    RSS = "RSS"
    AOA = "AOA"
    POA = "POA"


@dataclass(frozen=True)
class ReferencePoint:
    """Infrastructure node at a known planar position (meters, local ENU)."""

    rp_id: str
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError("bad_reference_point", f"non-finite position for {self.rp_id}")


@dataclass(frozen=True)
class Measurement:
    """One tagged observation from a reference point about a terminal.

    value units depend on kind: TOA seconds, RSS dBm, AOA radians
    (counterclockwise from +x), POA carrier phase in [0, 2*pi).
    noise_sigma is the standard deviation of the *derived* observation
    (meters for distance-type, radians for AOA).
    """

    rp_id: str
    kind: MeasurementKind
    value: float
    noise_sigma: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError("bad_measurement", "measurement value must be finite")
        if self.kind == MeasurementKind.POA and not (0.0 <= self.value < TWO_PI):
            raise ValidationError("bad_phase", "POA phase must lie in [0, 2*pi)")
        if self.noise_sigma is not None and not (self.noise_sigma > 0):
            raise ValidationError("bad_measurement", "noise_sigma must be positive when given")


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss: rss(d) = p0 - 10*n*log10(d/d0)."""

    p0_dbm: float
    d0_m: float = 1.0
    exponent_n: float = 2.0

    def __post_init__(self):
        if not (self.d0_m > 0):
            raise ValidationError("bad_model", "reference distance d0_m must be positive")
        if not (self.exponent_n > 0):
            raise ValidationError("bad_model", "path-loss exponent must be positive")


@dataclass
class PositionEstimate:
    """Solver output: planar position plus fit quality metadata.

    rms_residual_m is the RMS of the weighted residual vector -- meters
    for distance-only problems, a weighted mix for fused ones.
    """

    x: float
    y: float
    rms_residual_m: float
    iterations: int
    converged: bool
    used_measurements: int
    poa_dropped: bool = False

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)
