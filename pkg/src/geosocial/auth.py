"""Signup, credential storage, login, and session verification.

Passwords are never stored: each user gets a random salt and an
iterated PBKDF2-HMAC digest. Login failure is deliberately opaque --
unknown email and wrong password produce byte-identical errors, so the
login endpoint cannot be used as an account-existence oracle.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Mapping, Optional

from .domain import build_profile, utcnow, validate_email
from .errors import AuthError, ConflictError, ConstraintError, ValidationError
from .storage import Storage

WELCOME_TEXT = "welldone, you are good to go"
BAD_CREDENTIALS_TEXT = "wrong email address or password"

DEFAULT_SESSION_TTL = timedelta(hours=24)
DEFAULT_PBKDF2_ITERATIONS = 100_000
_TOKEN_BYTES = 24  # 192 bits of entropy

# Fixed salt used to equalize work when the email is unknown.
_DUMMY_SALT = b"\x00" * 16


@dataclass(frozen=True)
class SessionToken:
    token: str
    user_id: str
    issued_at: datetime
    expires_at: datetime


@dataclass(frozen=True)
class SignupResult:
    user_id: str
    welcome_text: str


def _digest(password: str, salt: bytes, iterations: int) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)


class AuthService:
    def __init__(
        self,
        storage: Storage,
        *,
        session_ttl: timedelta = DEFAULT_SESSION_TTL,
        pbkdf2_iterations: int = DEFAULT_PBKDF2_ITERATIONS,
        now: Callable[[], datetime] = utcnow,
    ):
        self._storage = storage
        self._session_ttl = session_ttl
        self._iterations = pbkdf2_iterations
        self._now = now

    def signup(self, fields: Mapping[str, object]) -> SignupResult:
        """Validate the signup form and persist profile + credential atomically."""
        profile = build_profile(fields, now=self._now())
        salt = secrets.token_bytes(16)
        digest = _digest(str(fields["password"]), salt, self._iterations)

        def work(con):
            self._storage.put_user(profile, con=con)
            self._storage.put_credential(profile.user_id, salt, digest, self._iterations, con=con)

        try:
            self._storage.transactional(work)
        except ConstraintError as exc:
            if exc.constraint == "users.email":
                raise ConflictError("duplicate_email", "an account with this email already exists")
            raise
        return SignupResult(user_id=profile.user_id, welcome_text=WELCOME_TEXT)

    def login(self, email: str, password: str) -> SessionToken:
        """Issue a fresh session on a correct email/password pair."""
        user = None
        try:
            user = self._storage.find_user_by_email(validate_email(email).value)
        except ValidationError:
            pass
        if user is None:
            # Burn the same digest work so unknown emails are not faster.
            _digest(password, _DUMMY_SALT, self._iterations)
            raise AuthError("bad_credentials", BAD_CREDENTIALS_TEXT)
        salt, stored, iterations = self._storage.get_credential(user.user_id)
        if not hmac.compare_digest(_digest(password, salt, iterations), stored):
            raise AuthError("bad_credentials", BAD_CREDENTIALS_TEXT)
        issued = self._now()
        session = SessionToken(
            token=secrets.token_hex(_TOKEN_BYTES),
            user_id=user.user_id,
            issued_at=issued,
            expires_at=issued + self._session_ttl,
        )
        self._storage.put_session(session.token, session.user_id, session.issued_at, session.expires_at)
        return session

    def verify_session(self, token: Optional[str]) -> str:
        """Return the bound user id iff the token exists and is unexpired."""
        if not token:
            raise AuthError("invalid_token", "missing or invalid session token")
        row = self._storage.get_session(token)
        if row is None:
            raise AuthError("invalid_token", "missing or invalid session token")
        user_id, _issued_at, expires_at = row
        if self._now() >= expires_at:
            raise AuthError("expired", "session has expired")
        return user_id
