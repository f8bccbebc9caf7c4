"""HTTP/JSON boundary: routing, auth, and error mapping.

Each endpoint delegates to exactly one domain operation. Domain errors
map to HTTP statuses by exception class, so every (status, code) pair
identifies one failure mode within an endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .ali import AliRegistry, ExternalGeocoder, GeocoderClientConfig, PlacesDataset
from .auth import AuthService
from .config import ServiceConfig
from .domain import utcnow
from .errors import (
    AuthError,
    ConflictError,
    DomainError,
    EstimationError,
    NotFoundError,
    PermissionDenied,
    UnavailableError,
    ValidationError,
)
from .geoloc import (
    GeodeticPoint,
    Measurement,
    MeasurementKind,
    PathLossModel,
    ReferencePoint,
    fuse_estimate,
    local_to_geodetic,
)
from .social import POST_CONFIRMATION_TEXT, SocialGraph
from .storage import Storage, StorageError

_STATUS_BY_TYPE = (
    (AuthError, 401),
    (PermissionDenied, 403),
    (NotFoundError, 404),
    (ConflictError, 409),
    (UnavailableError, 503),
    (StorageError, 500),
    (EstimationError, 422),
    (ValidationError, 422),
)


def status_for(error: DomainError) -> int:
    for klass, status in _STATUS_BY_TYPE:
        if isinstance(error, klass):
            return status
    return 500


def rfc3339(dt: datetime) -> str:
    return dt.isoformat()


@dataclass
class Backend:
    """Wired application services sharing one storage instance."""

    config: ServiceConfig
    storage: Storage
    auth: AuthService
    social: SocialGraph
    ali: AliRegistry


def create_backend(config: ServiceConfig, *, now=utcnow, pbkdf2_iterations=None) -> Backend:
    storage = Storage(config.db_path)
    storage.migrate()
    auth_kwargs = {"session_ttl": timedelta(hours=config.session_ttl_h), "now": now}
    if pbkdf2_iterations is not None:
        auth_kwargs["pbkdf2_iterations"] = pbkdf2_iterations
    auth = AuthService(storage, **auth_kwargs)
    social = SocialGraph(storage, now=now)
    dataset = PlacesDataset.from_csv(config.places_path())
    geocoder = None
    if config.geocoder_mode == "external":
        geocoder = ExternalGeocoder(
            GeocoderClientConfig(
                base_url=config.external_geocoder.base_url,
                key=config.external_geocoder.key,
                timeout_s=config.external_geocoder.timeout_s,
            ),
            dataset,
        )
    ali = AliRegistry(storage, dataset, is_friends=social.is_friends, geocoder=geocoder, now=now)
    return Backend(config=config, storage=storage, auth=auth, social=social, ali=ali)


# -- request bodies ---------------------------------------------------------


class SignupBody(BaseModel):
    first_name: Optional[str] = None
    last_name: Optional[str] = None
    password: Optional[str] = None
    email: Optional[str] = None
    country: Optional[str] = None
    gender: Optional[str] = None
    date_of_birth: Optional[str] = None


class LoginBody(BaseModel):
    email: str = ""
    password: str = ""


class RespondBody(BaseModel):
    accept: bool


class PostBody(BaseModel):
    body: str = ""
    media_ref: Optional[str] = None


class MessageBody(BaseModel):
    to: str
    body: str = ""


class FixBody(BaseModel):
    lat: float
    lon: float


class RpBody(BaseModel):
    rp_id: str
    x: float
    y: float


class MeasurementBody(BaseModel):
    rp_id: str
    kind: str
    value: float
    noise_sigma: Optional[float] = None


class PathLossBody(BaseModel):
    p0_dbm: float = -40.0
    d0_m: float = 1.0
    exponent_n: float = 2.0


class OriginBody(BaseModel):
    lat: float = 0.0
    lon: float = 0.0


class EstimateBody(BaseModel):
    rps: list[RpBody]
    measurements: list[MeasurementBody]
    path_loss: PathLossBody = PathLossBody()
    wavelength_m: Optional[float] = None
    origin: OriginBody = OriginBody()


def _profile_view(profile) -> dict:
    return {
        "user_id": profile.user_id,
        "first_name": profile.first_name,
        "last_name": profile.last_name,
        "email": profile.email.value,
        "country": profile.country,
        "gender": profile.gender,
        "date_of_birth": profile.date_of_birth.isoformat(),
        "created_at": rfc3339(profile.created_at),
    }


def _message_view(message) -> dict:
    return {
        "message_id": message.message_id,
        "sender_id": message.sender_id,
        "recipient_id": message.recipient_id,
        "body": message.body,
        "sent_at": rfc3339(message.sent_at),
        "seq": message.seq,
    }


def create_app(backend: Backend) -> FastAPI:
    app = FastAPI(title="geosocial", docs_url=None, redoc_url=None)
    app.state.backend = backend

    @app.exception_handler(DomainError)
    async def domain_error_handler(_request: Request, exc: DomainError):
        return JSONResponse(
            status_code=status_for(exc),
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def request_error_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "malformed_request", "message": str(exc.errors()[:1])},
        )

    def current_user(authorization: Optional[str] = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise AuthError("invalid_token", "missing or invalid session token")
        return backend.auth.verify_session(authorization.removeprefix("Bearer "))

    # -- health and auth ---------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/signup", status_code=201)
    def signup(body: SignupBody):
        result = backend.auth.signup(body.model_dump())
        return {"user_id": result.user_id, "message": result.welcome_text}

    @app.post("/login")
    def login(body: LoginBody):
        session = backend.auth.login(body.email, body.password)
        return {"token": session.token, "expires_at": rfc3339(session.expires_at)}

    # -- profiles ------------------------------------------------------------

    @app.get("/profiles")
    def search_profiles(
        q: str = Query(default=""),
        limit: int = Query(default=20),
        user: str = Depends(current_user),
    ):
        matches = backend.social.search_profiles(q, limit)
        return {
            "matches": [
                {"user_id": m.user_id, "display_name": m.display_name, "country": m.country}
                for m in matches
            ]
        }

    @app.get("/users/{user_id}")
    def get_user(user_id: str, user: str = Depends(current_user)):
        return _profile_view(backend.storage.get_user(user_id))

    # -- friendships -----------------------------------------------------------

    @app.post("/friends/{other_id}/request", status_code=201)
    def request_friend(other_id: str, user: str = Depends(current_user)):
        friendship = backend.social.request_friend(user, other_id)
        return {
            "requester_id": friendship.requester_id,
            "addressee_id": friendship.addressee_id,
            "state": friendship.state,
        }

    @app.post("/friends/{other_id}/respond")
    def respond_friend(other_id: str, body: RespondBody, user: str = Depends(current_user)):
        friendship = backend.social.respond_friend(user, other_id, body.accept)
        return {
            "requester_id": friendship.requester_id,
            "addressee_id": friendship.addressee_id,
            "state": friendship.state,
        }

    # -- posts --------------------------------------------------------------------

    @app.post("/posts", status_code=201)
    def create_post(body: PostBody, user: str = Depends(current_user)):
        post_id = backend.social.create_post(user, body.body, body.media_ref)
        return {"post_id": post_id, "message": POST_CONFIRMATION_TEXT}

    @app.get("/users/{user_id}/posts")
    def list_posts(user_id: str, user: str = Depends(current_user)):
        posts = backend.social.list_posts(user_id)
        return {
            "posts": [
                {
                    "post_id": p.post_id,
                    "author_id": p.author_id,
                    "body": p.body,
                    "media_ref": p.media_ref,
                    "created_at": rfc3339(p.created_at),
                }
                for p in posts
            ]
        }

    # -- chat ------------------------------------------------------------------------

    @app.post("/messages", status_code=201)
    def send_message(body: MessageBody, user: str = Depends(current_user)):
        message = backend.social.send_message(user, body.to, body.body)
        return _message_view(message)

    @app.get("/messages/{other_id}")
    def fetch_messages(
        other_id: str,
        since_seq: int = Query(default=0),
        user: str = Depends(current_user),
    ):
        view = backend.social.fetch_conversation(user, other_id, since_seq=since_seq)
        return {
            "participants": list(view.participants),
            "messages": [_message_view(m) for m in view.messages],
        }

    # -- location ----------------------------------------------------------------------

    @app.post("/location/fixes", status_code=201)
    def record_fix(body: FixBody, user: str = Depends(current_user)):
        point = GeodeticPoint(body.lat, body.lon)
        fix_id = backend.ali.record_fix(user, point, source="client_reported")
        return {"fix_id": fix_id}

    @app.post("/location/estimate")
    def estimate_location(body: EstimateBody, user: str = Depends(current_user)):
        rps = [ReferencePoint(rp.rp_id, rp.x, rp.y) for rp in body.rps]
        try:
            kinds = [MeasurementKind(m.kind) for m in body.measurements]
        except ValueError:
            raise ValidationError("bad_measurement", "kind must be one of TOA, RSS, AOA, POA")
        measurements = [
            Measurement(rp_id=m.rp_id, kind=kind, value=m.value, noise_sigma=m.noise_sigma)
            for m, kind in zip(body.measurements, kinds)
        ]
        model = PathLossModel(
            p0_dbm=body.path_loss.p0_dbm,
            d0_m=body.path_loss.d0_m,
            exponent_n=body.path_loss.exponent_n,
        )
        estimate = fuse_estimate(rps, measurements, model, body.wavelength_m)
        origin = GeodeticPoint(body.origin.lat, body.origin.lon)
        point = local_to_geodetic(estimate.x, estimate.y, origin)
        fix_id = backend.ali.record_fix(
            user, point, rms_residual_m=estimate.rms_residual_m, source="estimated"
        )
        return {
            "x": estimate.x,
            "y": estimate.y,
            "lat": point.lat_deg,
            "lon": point.lon_deg,
            "rms_residual_m": estimate.rms_residual_m,
            "iterations": estimate.iterations,
            "converged": estimate.converged,
            "used_measurements": estimate.used_measurements,
            "poa_dropped": estimate.poa_dropped,
            "fix_id": fix_id,
        }

    @app.get("/users/{user_id}/location")
    def current_location(user_id: str, user: str = Depends(current_user)):
        view = backend.ali.current_location(user, user_id)
        return {
            "lat": view.point.lat_deg,
            "lon": view.point.lon_deg,
            "city": view.place.city,
            "country": view.place.country,
            "recorded_at": rfc3339(view.recorded_at),
        }

    return app


def create_app_from_config(config: ServiceConfig) -> FastAPI:
    return create_app(create_backend(config.validate()))
