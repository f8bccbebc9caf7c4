"""Automatic Location Identification registry.

Stores per-user location fixes, answers "current location" queries for
the owner and accepted friends, and reverse-geocodes coordinates to a
country/city via an offline nearest-city dataset. An external map
service can be plugged in; any failure there falls back to the offline
dataset, so location views never break on network trouble.
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Optional

import httpx
import numpy as np

from .domain import new_id, utcnow
from .errors import NotFoundError, PermissionDenied, ValidationError
from .geoloc.geodesy import EARTH_RADIUS_M, GeodeticPoint
from .storage import Storage

FIX_SOURCES = ("estimated", "client_reported")


@dataclass(frozen=True)
class Place:
    city: str
    country: str
    distance_to_city_center_m: Optional[float] = None


@dataclass
class LocationFix:
    fix_id: str
    user_id: str
    point: GeodeticPoint
    rms_residual_m: float
    recorded_at: datetime
    source: str


@dataclass
class CurrentLocation:
    point: GeodeticPoint
    place: Place
    recorded_at: datetime
    geocode_source: str


class PlacesDataset:
    """Nearest-city lookup table loaded from a `city,country,lat,lon` CSV."""

    def __init__(self, rows: list[tuple[str, str, float, float]]):
        if not rows:
            raise ValidationError("empty_dataset", "places dataset has no rows")
        seen = set()
        for city, country, lat, lon in rows:
            GeodeticPoint(lat, lon)  # bounds check
            key = (city, country)
            if key in seen:
                raise ValidationError("duplicate_place", f"duplicate place: {city}, {country}")
            seen.add(key)
        self.rows = rows
        self._lat = np.radians(np.array([r[2] for r in rows]))
        self._lon = np.radians(np.array([r[3] for r in rows]))

    @classmethod
    def from_csv(cls, path) -> "PlacesDataset":
        rows = []
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            expected = {"city", "country", "lat", "lon"}
            if reader.fieldnames is None or set(reader.fieldnames) != expected:
                raise ValidationError(
                    "bad_dataset", f"expected header city,country,lat,lon in {path}"
                )
            for record in reader:
                rows.append(
                    (
                        record["city"].strip(),
                        record["country"].strip(),
                        float(record["lat"]),
                        float(record["lon"]),
                    )
                )
        return cls(rows)

    def nearest(self, point: GeodeticPoint) -> Place:
        """Row minimizing haversine distance; ties break on (country, city)."""
        lat = np.radians(point.lat_deg)
        lon = np.radians(point.lon_deg)
        h = (
            np.sin((self._lat - lat) / 2.0) ** 2
            + np.cos(lat) * np.cos(self._lat) * np.sin((self._lon - lon) / 2.0) ** 2
        )
        dist = 2.0 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))
        best = dist.min()
        candidates = [self.rows[i] for i in np.flatnonzero(dist == best)]
        city, country, *_ = min(candidates, key=lambda r: (r[1], r[0]))
        return Place(city=city, country=country, distance_to_city_center_m=float(best))


def reverse_geocode(point: GeodeticPoint, dataset: PlacesDataset) -> Place:
    """Offline reverse geocoding: nearest dataset city to the point."""
    return dataset.nearest(point)


@dataclass(frozen=True)
class GeocoderClientConfig:
    base_url: str
    key: str
    timeout_s: float = 5.0


class ExternalGeocoder:
    """Client for a reverse-geocoding HTTP service with total fallback.

    GET {base_url}/reverse?lat=..&lon=..&key=.. must answer 200 with
    {"city": .., "country": ..}. Timeouts, transport errors, non-2xx
    statuses, and malformed bodies all fall back to the offline dataset;
    the failure counter is the only trace callers see.
    """

    def __init__(
        self,
        config: GeocoderClientConfig,
        dataset: PlacesDataset,
        *,
        transport: Optional[httpx.BaseTransport] = None,
        max_in_flight: int = 4,
    ):
        self._config = config
        self._dataset = dataset
        self._client = httpx.Client(
            base_url=config.base_url, timeout=config.timeout_s, transport=transport
        )
        self._gate = threading.Semaphore(max_in_flight)
        self.failures = 0

    def reverse(self, point: GeodeticPoint) -> tuple[Place, str]:
        """Resolve a point to (Place, source); source is "external" or
        "offline_fallback"."""
        try:
            with self._gate:
                response = self._client.get(
                    "/reverse",
                    params={
                        "lat": point.lat_deg,
                        "lon": point.lon_deg,
                        "key": self._config.key,
                    },
                )
            response.raise_for_status()
            body = response.json()
            city, country = body["city"], body["country"]
            if not isinstance(city, str) or not isinstance(country, str):
                raise ValueError("city/country must be text")
            return Place(city=city, country=country), "external"
        except Exception:
            self.failures += 1
            return self._dataset.nearest(point), "offline_fallback"

    def close(self) -> None:
        self._client.close()


class AliRegistry:
    def __init__(
        self,
        storage: Storage,
        dataset: PlacesDataset,
        *,
        is_friends: Callable[[str, str], bool],
        geocoder: Optional[ExternalGeocoder] = None,
        now: Callable[[], datetime] = utcnow,
        history_cap: Optional[int] = None,
    ):
        self._storage = storage
        self._dataset = dataset
        self._is_friends = is_friends
        self._geocoder = geocoder
        self._now = now
        self._history_cap = history_cap

    # -- writes ---------------------------------------------------------------

    def record_fix(
        self,
        user_id: str,
        point: GeodeticPoint,
        rms_residual_m: float = 0.0,
        source: str = "client_reported",
    ) -> str:
        """Append a fix and make it the user's current location.

        recorded_at is clamped to the user's latest fix so the per-user
        timestamp sequence stays monotone even if the clock steps back.
        """
        if source not in FIX_SOURCES:
            raise ValidationError("bad_source", f"unknown fix source: {source}")
        try:
            self._storage.get_user(user_id)
        except NotFoundError:
            raise NotFoundError("unknown_user", f"no such user: {user_id}")
        recorded_at = self._now()
        last = self._storage.latest_fix(user_id)
        if last is not None:
            last_at = datetime.fromisoformat(last["recorded_at"])
            if recorded_at < last_at:
                recorded_at = last_at
        fix_id = new_id("f")
        self._storage.append_fix(
            fix_id,
            user_id,
            point.lat_deg,
            point.lon_deg,
            rms_residual_m,
            source,
            recorded_at,
        )
        if self._history_cap is not None:
            self._storage.prune_fixes(user_id, self._history_cap)
        return fix_id

    # -- reads ----------------------------------------------------------------

    def _check_permitted(self, requester: str, target: str) -> None:
        if requester != target and not self._is_friends(requester, target):
            raise PermissionDenied(
                "not_permitted", "location is visible to the user and accepted friends only"
            )

    def current_location(self, requester: str, target: str) -> CurrentLocation:
        self._check_permitted(requester, target)
        row = self._storage.latest_fix(target)
        if row is None:
            raise NotFoundError("no_fix_yet", "no location fix recorded for this user")
        point = GeodeticPoint(row["lat_deg"], row["lon_deg"])
        if self._geocoder is not None:
            place, geocode_source = self._geocoder.reverse(point)
        else:
            place, geocode_source = self._dataset.nearest(point), "offline"
        return CurrentLocation(
            point=point,
            place=place,
            recorded_at=datetime.fromisoformat(row["recorded_at"]),
            geocode_source=geocode_source,
        )

    def location_history(
        self, requester: str, target: str, t0: datetime, t1: datetime
    ) -> list[LocationFix]:
        self._check_permitted(requester, target)
        if t0 > t1:
            raise ValidationError("bad_range", "history range start must not exceed end")
        return [
            LocationFix(
                fix_id=row["fix_id"],
                user_id=row["user_id"],
                point=GeodeticPoint(row["lat_deg"], row["lon_deg"]),
                rms_residual_m=row["rms_residual_m"],
                recorded_at=datetime.fromisoformat(row["recorded_at"]),
                source=row["source"],
            )
            for row in self._storage.list_fixes(target, t0, t1)
        ]
