"""Normalized relational persistence on an embedded sqlite file.

One table per entity, every attribute stored exactly once, all foreign
keys resolving to ``users``. Uniqueness the rest of the system relies on
is enforced here: unique email, one friendship row per unordered pair
(canonicalized as (user_lo, user_hi)), unique (conversation, seq).

Writers serialize through BEGIN IMMEDIATE transactions; every thread
gets its own connection so concurrent callers race only on sqlite's
locks, never on shared Python state.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager
from datetime import date, datetime
from typing import Callable, Iterator, Optional, TypeVar

from .domain import (
    EmailAddress,
    Friendship,
    Message,
    Post,
    UserProfile,
    conversation_key,
    friendship_pair,
    new_id,
)
from .errors import ConstraintError, DomainError, NotFoundError, UnavailableError

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE users (
    user_id        TEXT PRIMARY KEY,
    first_name     TEXT NOT NULL,
    last_name      TEXT NOT NULL,
    email          TEXT NOT NULL,
    country        TEXT NOT NULL,
    gender         TEXT NOT NULL,
    date_of_birth  TEXT NOT NULL,
    created_at     TEXT NOT NULL
);
CREATE UNIQUE INDEX idx_users_email ON users (email);

CREATE TABLE credentials (
    user_id         TEXT PRIMARY KEY REFERENCES users (user_id),
    salt            BLOB NOT NULL,
    password_digest BLOB NOT NULL,
    iterations      INTEGER NOT NULL
);

CREATE TABLE sessions (
    token      TEXT PRIMARY KEY,
    user_id    TEXT NOT NULL REFERENCES users (user_id),
    issued_at  TEXT NOT NULL,
    expires_at TEXT NOT NULL
);

CREATE TABLE friendships (
    user_lo      TEXT NOT NULL REFERENCES users (user_id),
    user_hi      TEXT NOT NULL REFERENCES users (user_id),
    requester_id TEXT NOT NULL,
    state        TEXT NOT NULL CHECK (state IN ('pending', 'accepted', 'rejected')),
    updated_at   TEXT NOT NULL,
    PRIMARY KEY (user_lo, user_hi)
);

CREATE TABLE posts (
    post_id    TEXT PRIMARY KEY,
    author_id  TEXT NOT NULL REFERENCES users (user_id),
    body       TEXT NOT NULL,
    media_ref  TEXT,
    created_at TEXT NOT NULL
);
CREATE INDEX idx_posts_author ON posts (author_id, created_at);

CREATE TABLE messages (
    message_id   TEXT PRIMARY KEY,
    conversation TEXT NOT NULL,
    seq          INTEGER NOT NULL,
    sender_id    TEXT NOT NULL REFERENCES users (user_id),
    recipient_id TEXT NOT NULL REFERENCES users (user_id),
    body         TEXT NOT NULL,
    sent_at      TEXT NOT NULL,
    UNIQUE (conversation, seq)
);

CREATE TABLE location_fixes (
    fix_id         TEXT PRIMARY KEY,
    user_id        TEXT NOT NULL REFERENCES users (user_id),
    lat_deg        REAL NOT NULL,
    lon_deg        REAL NOT NULL,
    rms_residual_m REAL NOT NULL,
    source         TEXT NOT NULL CHECK (source IN ('estimated', 'client_reported')),
    recorded_at    TEXT NOT NULL
);
CREATE INDEX idx_fixes_user ON location_fixes (user_id, recorded_at);

CREATE TABLE schema_meta (version INTEGER NOT NULL);
"""

T = TypeVar("T")


class StorageError(DomainError):
    """Storage-layer failure that is not a constraint violation."""


def _constraint_name(exc: sqlite3.IntegrityError) -> str:
    text = str(exc)
    if "idx_users_email" in text or "users.email" in text:
        return "users.email"
    if "messages.conversation" in text:
        return "messages.conversation_seq"
    if "friendships" in text:
        return "friendships.pair"
    return text


class Storage:
    """Repository facade over one sqlite database file."""

    def __init__(self, db_path: str):
        self._path = str(db_path)
        self._local = threading.local()
        self._offline = False

    # -- connection management -------------------------------------------

    def set_offline(self, offline: bool) -> None:
        """Simulate an unreachable backend (used by connectivity checks)."""
        self._offline = offline

    def _check_reachable(self) -> None:
        if self._offline:
            raise UnavailableError("connectivity", "storage backend unreachable")

    def _connection(self) -> sqlite3.Connection:
        con = getattr(self._local, "con", None)
        if con is None:
            try:
                con = sqlite3.connect(self._path, timeout=10.0, isolation_level=None)
            except sqlite3.OperationalError as exc:
                raise UnavailableError("connectivity", f"cannot open database: {exc}")
            con.row_factory = sqlite3.Row
            con.execute("PRAGMA journal_mode=WAL")
            con.execute("PRAGMA foreign_keys=ON")
            con.execute("PRAGMA busy_timeout=10000")
            self._local.con = con
        return con

    @contextmanager
    def transaction(self) -> Iterator[sqlite3.Connection]:
        """All writes inside the block commit atomically or not at all."""
        self._check_reachable()
        con = self._connection()
        con.execute("BEGIN IMMEDIATE")
        try:
            yield con
        except sqlite3.IntegrityError as exc:
            con.execute("ROLLBACK")
            raise ConstraintError(_constraint_name(exc))
        except Exception:
            con.execute("ROLLBACK")
            raise
        else:
            con.execute("COMMIT")

    def transactional(self, work: Callable[[sqlite3.Connection], T]) -> T:
        """Run ``work`` in a single transaction; roll back on any error."""
        with self.transaction() as con:
            return work(con)

    def close(self) -> None:
        con = getattr(self._local, "con", None)
        if con is not None:
            con.close()
            self._local.con = None

    # -- schema ------------------------------------------------------------

    def migrate(self) -> int:
        """Create or upgrade the schema; idempotent. Returns the version."""
        self._check_reachable()
        try:
            con = self._connection()
            row = con.execute(
                "SELECT name FROM sqlite_master WHERE type='table' AND name='schema_meta'"
            ).fetchone()
            if row is None:
                # executescript would auto-commit an outer transaction, so
                # atomicity comes from BEGIN/COMMIT inside the script itself.
                con.executescript(
                    "BEGIN IMMEDIATE;\n"
                    + _SCHEMA
                    + f"INSERT INTO schema_meta (version) VALUES ({SCHEMA_VERSION});\nCOMMIT;"
                )
                return SCHEMA_VERSION
            version = con.execute("SELECT version FROM schema_meta").fetchone()[0]
        except sqlite3.OperationalError as exc:
            raise StorageError("io", f"cannot migrate {self._path}: {exc}")
        if version > SCHEMA_VERSION:
            raise StorageError(
                "version_downgrade",
                f"database is at schema version {version}, code supports {SCHEMA_VERSION}",
            )
        return version

    # -- users ---------------------------------------------------------------

    def put_user(self, profile: UserProfile, con: Optional[sqlite3.Connection] = None) -> None:
        self._write(
            con,
            "INSERT INTO users (user_id, first_name, last_name, email, country, gender,"
            " date_of_birth, created_at) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            (
                profile.user_id,
                profile.first_name,
                profile.last_name,
                profile.email.value,
                profile.country,
                profile.gender,
                profile.date_of_birth.isoformat(),
                profile.created_at.isoformat(),
            ),
        )

    def get_user(self, user_id: str) -> UserProfile:
        row = self._one("SELECT * FROM users WHERE user_id = ?", (user_id,))
        if row is None:
            raise NotFoundError("not_found", f"no such user: {user_id}")
        return _user_from_row(row)

    def find_user_by_email(self, email: str) -> Optional[UserProfile]:
        row = self._one("SELECT * FROM users WHERE email = ?", (email,))
        return _user_from_row(row) if row else None

    def list_users(self) -> list[UserProfile]:
        rows = self._all("SELECT * FROM users ORDER BY user_id")
        return [_user_from_row(r) for r in rows]

    # -- credentials -----------------------------------------------------------

    def put_credential(
        self,
        user_id: str,
        salt: bytes,
        digest: bytes,
        iterations: int,
        con: Optional[sqlite3.Connection] = None,
    ) -> None:
        self._write(
            con,
            "INSERT INTO credentials (user_id, salt, password_digest, iterations)"
            " VALUES (?, ?, ?, ?)",
            (user_id, salt, digest, iterations),
        )

    def get_credential(self, user_id: str) -> tuple[bytes, bytes, int]:
        row = self._one("SELECT * FROM credentials WHERE user_id = ?", (user_id,))
        if row is None:
            raise NotFoundError("not_found", f"no credential for user: {user_id}")
        return bytes(row["salt"]), bytes(row["password_digest"]), int(row["iterations"])

    # -- sessions ---------------------------------------------------------------

    def put_session(
        self, token: str, user_id: str, issued_at: datetime, expires_at: datetime
    ) -> None:
        self._write(
            None,
            "INSERT INTO sessions (token, user_id, issued_at, expires_at) VALUES (?, ?, ?, ?)",
            (token, user_id, issued_at.isoformat(), expires_at.isoformat()),
        )

    def get_session(self, token: str) -> Optional[tuple[str, datetime, datetime]]:
        row = self._one("SELECT * FROM sessions WHERE token = ?", (token,))
        if row is None:
            return None
        return (
            row["user_id"],
            datetime.fromisoformat(row["issued_at"]),
            datetime.fromisoformat(row["expires_at"]),
        )

    # -- friendships ------------------------------------------------------------

    def get_friendship(self, a: str, b: str) -> Optional[Friendship]:
        lo, hi = friendship_pair(a, b)
        row = self._one(
            "SELECT * FROM friendships WHERE user_lo = ? AND user_hi = ?", (lo, hi)
        )
        if row is None:
            return None
        requester = row["requester_id"]
        addressee = hi if requester == lo else lo
        return Friendship(
            requester_id=requester,
            addressee_id=addressee,
            state=row["state"],
            updated_at=datetime.fromisoformat(row["updated_at"]),
        )

    def put_friendship(self, friendship: Friendship) -> None:
        lo, hi = friendship_pair(friendship.requester_id, friendship.addressee_id)
        self._write(
            None,
            "INSERT INTO friendships (user_lo, user_hi, requester_id, state, updated_at)"
            " VALUES (?, ?, ?, ?, ?)",
            (lo, hi, friendship.requester_id, friendship.state, friendship.updated_at.isoformat()),
        )

    def update_friendship_state(self, a: str, b: str, state: str, updated_at: datetime) -> None:
        lo, hi = friendship_pair(a, b)
        self._write(
            None,
            "UPDATE friendships SET state = ?, updated_at = ? WHERE user_lo = ? AND user_hi = ?",
            (state, updated_at.isoformat(), lo, hi),
        )

    def list_friends(self, user_id: str) -> list[str]:
        rows = self._all(
            "SELECT user_lo, user_hi FROM friendships"
            " WHERE state = 'accepted' AND (user_lo = ? OR user_hi = ?)",
            (user_id, user_id),
        )
        return [r["user_hi"] if r["user_lo"] == user_id else r["user_lo"] for r in rows]

    # -- posts ---------------------------------------------------------------------

    def put_post(self, post: Post, con: Optional[sqlite3.Connection] = None) -> None:
        self._write(
            con,
            "INSERT INTO posts (post_id, author_id, body, media_ref, created_at)"
            " VALUES (?, ?, ?, ?, ?)",
            (post.post_id, post.author_id, post.body, post.media_ref, post.created_at.isoformat()),
        )

    def list_posts_by_author(self, author_id: str) -> list[Post]:
        rows = self._all(
            "SELECT * FROM posts WHERE author_id = ? ORDER BY created_at, post_id",
            (author_id,),
        )
        return [
            Post(
                post_id=r["post_id"],
                author_id=r["author_id"],
                body=r["body"],
                media_ref=r["media_ref"],
                created_at=datetime.fromisoformat(r["created_at"]),
            )
            for r in rows
        ]

    # -- messages -----------------------------------------------------------------

    def append_message(self, sender_id: str, recipient_id: str, body: str, sent_at: datetime) -> Message:
        """Append with the next per-conversation sequence number.

        BEGIN IMMEDIATE serializes writers per database, so the
        max(seq)+1 read inside the transaction cannot race.
        """
        conv = conversation_key(sender_id, recipient_id)
        with self.transaction() as con:
            cur = con.execute(
                "SELECT COALESCE(MAX(seq), 0) + 1 FROM messages WHERE conversation = ?",
                (conv,),
            )
            seq = int(cur.fetchone()[0])
            message = Message(
                message_id=new_id("m"),
                sender_id=sender_id,
                recipient_id=recipient_id,
                body=body,
                sent_at=sent_at,
                seq=seq,
            )
            con.execute(
                "INSERT INTO messages (message_id, conversation, seq, sender_id,"
                " recipient_id, body, sent_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    message.message_id,
                    conv,
                    seq,
                    sender_id,
                    recipient_id,
                    body,
                    sent_at.isoformat(),
                ),
            )
        return message

    def list_messages(self, a: str, b: str, since_seq: int = 0) -> list[Message]:
        conv = conversation_key(a, b)
        rows = self._all(
            "SELECT * FROM messages WHERE conversation = ? AND seq > ? ORDER BY seq",
            (conv, since_seq),
        )
        return [
            Message(
                message_id=r["message_id"],
                sender_id=r["sender_id"],
                recipient_id=r["recipient_id"],
                body=r["body"],
                sent_at=datetime.fromisoformat(r["sent_at"]),
                seq=r["seq"],
            )
            for r in rows
        ]

    # -- location fixes --------------------------------------------------------------

    def append_fix(
        self,
        fix_id: str,
        user_id: str,
        lat_deg: float,
        lon_deg: float,
        rms_residual_m: float,
        source: str,
        recorded_at: datetime,
        con: Optional[sqlite3.Connection] = None,
    ) -> None:
        self._write(
            con,
            "INSERT INTO location_fixes (fix_id, user_id, lat_deg, lon_deg, rms_residual_m,"
            " source, recorded_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
            (fix_id, user_id, lat_deg, lon_deg, rms_residual_m, source, recorded_at.isoformat()),
        )

    def latest_fix(self, user_id: str) -> Optional[sqlite3.Row]:
        return self._one(
            "SELECT * FROM location_fixes WHERE user_id = ?"
            " ORDER BY recorded_at DESC, fix_id DESC LIMIT 1",
            (user_id,),
        )

    def list_fixes(self, user_id: str, t0: datetime, t1: datetime) -> list[sqlite3.Row]:
        return self._all(
            "SELECT * FROM location_fixes WHERE user_id = ? AND recorded_at >= ?"
            " AND recorded_at <= ? ORDER BY recorded_at, fix_id",
            (user_id, t0.isoformat(), t1.isoformat()),
        )

    def prune_fixes(self, user_id: str, keep_last: int) -> None:
        """Retention cap: drop the oldest fixes beyond ``keep_last``."""
        with self.transaction() as con:
            con.execute(
                "DELETE FROM location_fixes WHERE user_id = ? AND fix_id NOT IN ("
                " SELECT fix_id FROM location_fixes WHERE user_id = ?"
                " ORDER BY recorded_at DESC, fix_id DESC LIMIT ?)",
                (user_id, user_id, keep_last),
            )

    # -- low-level helpers ---------------------------------------------------------

    def _write(self, con: Optional[sqlite3.Connection], sql: str, params: tuple) -> None:
        if con is not None:
            try:
                con.execute(sql, params)
            except sqlite3.IntegrityError as exc:
                raise ConstraintError(_constraint_name(exc))
        else:
            with self.transaction() as own:
                own.execute(sql, params)

    def _one(self, sql: str, params: tuple = ()) -> Optional[sqlite3.Row]:
        self._check_reachable()
        return self._connection().execute(sql, params).fetchone()

    def _all(self, sql: str, params: tuple = ()) -> list[sqlite3.Row]:
        self._check_reachable()
        return self._connection().execute(sql, params).fetchall()


def _user_from_row(row: sqlite3.Row) -> UserProfile:
    return UserProfile(
        user_id=row["user_id"],
        first_name=row["first_name"],
        last_name=row["last_name"],
        email=EmailAddress(row["email"]),
        country=row["country"],
        gender=row["gender"],
        date_of_birth=date.fromisoformat(row["date_of_birth"]),
        created_at=datetime.fromisoformat(row["created_at"]),
    )


def migrate(db_path: str) -> int:
    """Create or upgrade the schema at ``db_path``; returns the version."""
    return Storage(db_path).migrate()
