"""Measurement-driven planar position estimation."""

from .convert import (
    SPEED_OF_LIGHT_M_S,
    distance_to_rss,
    poa_to_distances,
    rss_to_distance,
    toa_to_distance,
)
from .estimate import estimate_aoa, estimate_multilateration, fuse_estimate, wrap_angle
from .geodesy import (
    EARTH_RADIUS_M,
    GeodeticPoint,
    geodetic_to_local,
    haversine_m,
    local_to_geodetic,
)
from .models import (
    Measurement,
    MeasurementKind,
    PathLossModel,
    PositionEstimate,
    ReferencePoint,
)

__all__ = [
    "SPEED_OF_LIGHT_M_S",
    "EARTH_RADIUS_M",
    "GeodeticPoint",
    "Measurement",
    "MeasurementKind",
    "PathLossModel",
    "PositionEstimate",
    "ReferencePoint",
    "distance_to_rss",
    "estimate_aoa",
    "estimate_multilateration",
    "fuse_estimate",
    "geodetic_to_local",
    "haversine_m",
    "local_to_geodetic",
    "poa_to_distances",
    "rss_to_distance",
    "toa_to_distance",
    "wrap_angle",
]
