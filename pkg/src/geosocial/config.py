"""Service configuration: file, environment, and CLI flag layering."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional

from .errors import ValidationError

DEFAULT_BIND = "127.0.0.1:8000"
DEFAULT_DB_PATH = "geosocial.db"
GEOCODER_MODES = ("offline", "external")

ENV_PREFIX = "GEOSOCIAL_"


def packaged_places_path() -> str:
    """Path of the places dataset shipped with the package."""
    return str(resources.files("geosocial").joinpath("data/places.csv"))


@dataclass
class ExternalGeocoderSettings:
    base_url: str = ""
    key: str = ""
    timeout_s: float = 5.0


@dataclass
class ServiceConfig:
    bind_address: str = DEFAULT_BIND
    db_path: str = DEFAULT_DB_PATH
    places_dataset_path: Optional[str] = None
    geocoder_mode: str = "offline"
    external_geocoder: ExternalGeocoderSettings = field(default_factory=ExternalGeocoderSettings)
    session_ttl_h: float = 24.0

    def validate(self) -> "ServiceConfig":
        if self.geocoder_mode not in GEOCODER_MODES:
            raise ValidationError("bad_config", f"unknown geocoder_mode: {self.geocoder_mode}")
        if self.geocoder_mode == "external":
            if not self.external_geocoder.base_url or not self.external_geocoder.key:
                raise ValidationError(
                    "bad_config", "external geocoder mode requires base_url and key"
                )
        if self.session_ttl_h <= 0:
            raise ValidationError("bad_config", "session_ttl_h must be positive")
        host, _, port = self.bind_address.rpartition(":")
        if not host or not port.isdigit():
            raise ValidationError("bad_config", f"bind_address must be host:port, got {self.bind_address!r}")
        return self

    @property
    def host(self) -> str:
        return self.bind_address.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.bind_address.rpartition(":")[2])

    def places_path(self) -> str:
        return self.places_dataset_path or packaged_places_path()


def load_config(
    path: Optional[str] = None,
    *,
    env: Optional[Mapping[str, str]] = None,
    bind: Optional[str] = None,
    db: Optional[str] = None,
) -> ServiceConfig:
    """Build a validated config: file values, then env vars, then flags."""
    env = os.environ if env is None else env
    data: dict = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)

    geo = data.get("external_geocoder", {})
    config = ServiceConfig(
        bind_address=data.get("bind_address", DEFAULT_BIND),
        db_path=data.get("db_path", DEFAULT_DB_PATH),
        places_dataset_path=data.get("places_dataset_path"),
        geocoder_mode=data.get("geocoder_mode", "offline"),
        external_geocoder=ExternalGeocoderSettings(
            base_url=geo.get("base_url", ""),
            key=geo.get("key", ""),
            timeout_s=float(geo.get("timeout_s", 5.0)),
        ),
        session_ttl_h=float(data.get("session_ttl_h", 24.0)),
    )

    if env.get(ENV_PREFIX + "BIND"):
        config.bind_address = env[ENV_PREFIX + "BIND"]
    if env.get(ENV_PREFIX + "DB"):
        config.db_path = env[ENV_PREFIX + "DB"]
    if env.get(ENV_PREFIX + "PLACES"):
        config.places_dataset_path = env[ENV_PREFIX + "PLACES"]
    if env.get(ENV_PREFIX + "GEOCODER_MODE"):
        config.geocoder_mode = env[ENV_PREFIX + "GEOCODER_MODE"]
    if env.get(ENV_PREFIX + "GEOCODER_URL"):
        config.external_geocoder.base_url = env[ENV_PREFIX + "GEOCODER_URL"]
    if env.get(ENV_PREFIX + "GEOCODER_KEY"):
        config.external_geocoder.key = env[ENV_PREFIX + "GEOCODER_KEY"]
    if env.get(ENV_PREFIX + "GEOCODER_TIMEOUT_S"):
        config.external_geocoder.timeout_s = float(env[ENV_PREFIX + "GEOCODER_TIMEOUT_S"])
    if env.get(ENV_PREFIX + "SESSION_TTL_H"):
        config.session_ttl_h = float(env[ENV_PREFIX + "SESSION_TTL_H"])

    if bind:
        config.bind_address = bind
    if db:
        config.db_path = db

    return config.validate()
