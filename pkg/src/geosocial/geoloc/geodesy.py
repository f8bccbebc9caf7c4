"""Geodetic <-> local planar conversion and great-circle distance.

The planar frame is an equirectangular approximation about an origin:
x = R*cos(lat0)*dlon, y = R*dlat (radians), with a spherical earth of
radius 6,371,000 m. Valid away from the poles and for small areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import EstimationError, ValidationError

EARTH_RADIUS_M = 6_371_000.0
MAX_PROJECTION_LAT_DEG = 89.0


@dataclass(frozen=True)
class GeodeticPoint:
    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        if not (math.isfinite(self.lat_deg) and -90.0 <= self.lat_deg <= 90.0):
            raise ValidationError("out_of_bounds", f"latitude out of range: {self.lat_deg}")
        if not (math.isfinite(self.lon_deg) and -180.0 <= self.lon_deg <= 180.0):
            raise ValidationError("out_of_bounds", f"longitude out of range: {self.lon_deg}")


def _check_projection_lat(lat_deg: float) -> None:
    if abs(lat_deg) >= MAX_PROJECTION_LAT_DEG:
        raise EstimationError("polar_region", "projection is not valid near the poles")


def local_to_geodetic(x_m: float, y_m: float, origin: GeodeticPoint) -> GeodeticPoint:
    """Map a local (x, y) offset in meters back to latitude/longitude."""
    _check_projection_lat(origin.lat_deg)
    dlat = math.degrees(y_m / EARTH_RADIUS_M)
    dlon = math.degrees(x_m / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat_deg))))
    lon = origin.lon_deg + dlon
    if lon > 180.0 or lon < -180.0:
        lon = (lon + 180.0) % 360.0 - 180.0
    return GeodeticPoint(lat_deg=origin.lat_deg + dlat, lon_deg=lon)


def geodetic_to_local(point: GeodeticPoint, origin: GeodeticPoint) -> tuple[float, float]:
    """Project a geodetic point into the local planar frame (meters)."""
    _check_projection_lat(origin.lat_deg)
    _check_projection_lat(point.lat_deg)
    x = (
        EARTH_RADIUS_M
        * math.cos(math.radians(origin.lat_deg))
        * math.radians(point.lon_deg - origin.lon_deg)
    )
    y = EARTH_RADIUS_M * math.radians(point.lat_deg - origin.lat_deg)
    return x, y


def haversine_m(a: GeodeticPoint, b: GeodeticPoint) -> float:
    """Great-circle distance in meters on the R = 6,371,000 m sphere."""
    lat1, lat2 = math.radians(a.lat_deg), math.radians(b.lat_deg)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon_deg - a.lon_deg)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))
