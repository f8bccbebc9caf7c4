"""Core entity types and field validation shared by every other module."""

from __future__ import annotations

import itertools
import secrets
import time
from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import Mapping, Optional

from .errors import ValidationError

PASSWORD_MIN_LENGTH = 9

#: The seven signup attributes collected by the registration form.
SIGNUP_FIELDS = (
    "first_name",
    "last_name",
    "password",
    "email",
    "country",
    "gender",
    "date_of_birth",
)

FRIENDSHIP_STATES = ("pending", "accepted", "rejected")

_id_counter = itertools.count()


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def new_id(prefix: str) -> str:
    """Mint an opaque identifier: time-ordered, unique, serializable.

    Millisecond timestamp + per-process counter keep ids assignable in
    monotone order; the random suffix guards against cross-process
    collisions.
    """
    millis = time.time_ns() // 1_000_000
    return f"{prefix}{millis:011x}{next(_id_counter) & 0xFFFF:04x}{secrets.token_hex(2)}"


@dataclass(frozen=True)
class EmailAddress:
    """Validated ``local@domain`` address; the domain part is lowercased."""

    value: str

    def __str__(self) -> str:
        return self.value


def validate_email(raw: str) -> EmailAddress:
    """Parse and normalize an email address.

    Accepts ``local@domain`` with a non-empty local part and a domain
    containing at least one interior dot. Normalization lowercases the
    domain, so the result is a fixed point of this function.
    """
    if not isinstance(raw, str):
        raise ValidationError("malformed", "email address must be text")
    candidate = raw.strip()
    if candidate.count("@") != 1 or any(ch.isspace() for ch in candidate):
        raise ValidationError("malformed", f"not a valid email address: {raw!r}")
    local, domain = candidate.split("@")
    if not local:
        raise ValidationError("malformed", f"not a valid email address: {raw!r}")
    if "." not in domain or domain.startswith(".") or domain.endswith("."):
        raise ValidationError("malformed", f"not a valid email address: {raw!r}")
    return EmailAddress(f"{local}@{domain.lower()}")


def validate_password(raw: str) -> None:
    """Reject any password shorter than nine characters."""
    if not isinstance(raw, str) or len(raw) < PASSWORD_MIN_LENGTH:
        raise ValidationError(
            "too_short",
            f"password must be at least {PASSWORD_MIN_LENGTH} characters",
        )


@dataclass
class UserProfile:
    user_id: str
    first_name: str
    last_name: str
    email: EmailAddress
    country: str
    gender: str
    date_of_birth: date
    created_at: datetime

    @property
    def display_name(self) -> str:
        return f"{self.first_name} {self.last_name}"


def _parse_dob(value) -> date:
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        try:
            return date.fromisoformat(value)
        except ValueError:
            raise ValidationError("invalid_dob", f"not a calendar date: {value!r}")
    raise ValidationError("invalid_dob", f"not a calendar date: {value!r}")


def build_profile(fields: Mapping[str, object], *, now: Optional[datetime] = None) -> UserProfile:
    """Validate the seven signup attributes and mint a new profile.

    The password is validated here but never stored on the profile;
    credential storage belongs to the auth module.
    """
    now = now or utcnow()
    for name in SIGNUP_FIELDS:
        value = fields.get(name)
        if value is None or (isinstance(value, str) and not value.strip()):
            raise ValidationError("missing_field", f"missing field: {name}")
    email = validate_email(str(fields["email"]))
    validate_password(str(fields["password"]))
    dob = _parse_dob(fields["date_of_birth"])
    if dob > now.date():
        raise ValidationError("invalid_dob", "date of birth cannot be in the future")
    return UserProfile(
        user_id=new_id("u"),
        first_name=str(fields["first_name"]).strip(),
        last_name=str(fields["last_name"]).strip(),
        email=email,
        country=str(fields["country"]).strip(),
        gender=str(fields["gender"]).strip(),
        date_of_birth=dob,
        created_at=now,
    )


@dataclass
class Post:
    post_id: str
    author_id: str
    body: str
    media_ref: Optional[str]
    created_at: datetime


@dataclass
class Message:
    message_id: str
    sender_id: str
    recipient_id: str
    body: str
    sent_at: datetime
    seq: int


@dataclass
class Friendship:
    requester_id: str
    addressee_id: str
    state: str
    updated_at: datetime


def conversation_key(a: str, b: str) -> str:
    """Canonical identifier of the unordered conversation pair."""
    lo, hi = sorted((a, b))
    return f"{lo}|{hi}"


def friendship_pair(a: str, b: str) -> tuple[str, str]:
    """Canonical (min, max) ordering used for unordered-pair uniqueness."""
    lo, hi = sorted((a, b))
    return lo, hi
