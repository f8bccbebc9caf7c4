"""Profile search, friendship lifecycle, posts, and chat."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Optional

from .domain import Friendship, Message, Post, new_id, utcnow
from .errors import (
    ConflictError,
    NotFoundError,
    PermissionDenied,
    ValidationError,
)
from .storage import Storage

POST_CONFIRMATION_TEXT = "post has been sent"


@dataclass(frozen=True)
class SearchMatch:
    user_id: str
    display_name: str
    country: str


@dataclass
class ConversationView:
    participants: tuple[str, str]
    messages: list[Message]


class SocialGraph:
    def __init__(self, storage: Storage, *, now: Callable[[], datetime] = utcnow):
        self._storage = storage
        self._now = now

    # -- search -------------------------------------------------------------

    def search_profiles(self, query: str, limit: int = 20) -> list[SearchMatch]:
        """Case-insensitive substring search over display name and email.

        Results are ordered by (display_name, user_id) so repeated
        queries are deterministic.
        """
        needle = query.strip().lower()
        if not needle:
            raise ValidationError("empty_query", "search query must not be empty")
        if limit < 1:
            raise ValidationError("bad_limit", "limit must be a positive integer")
        matches = [
            SearchMatch(user_id=u.user_id, display_name=u.display_name, country=u.country)
            for u in self._storage.list_users()
            if needle in u.display_name.lower() or needle in u.email.value.lower()
        ]
        matches.sort(key=lambda m: (m.display_name, m.user_id))
        return matches[:limit]

    # -- friendships ------------------------------------------------------------

    def request_friend(self, requester: str, addressee: str) -> Friendship:
        if requester == addressee:
            raise ValidationError("self_friend", "cannot friend yourself")
        for user_id in (requester, addressee):
            try:
                self._storage.get_user(user_id)
            except NotFoundError:
                raise NotFoundError("unknown_user", f"no such user: {user_id}")
        if self._storage.get_friendship(requester, addressee) is not None:
            raise ConflictError("already_exists", "a friendship record already exists for this pair")
        friendship = Friendship(
            requester_id=requester,
            addressee_id=addressee,
            state="pending",
            updated_at=self._now(),
        )
        self._storage.put_friendship(friendship)
        return friendship

    def respond_friend(self, responder: str, requester: str, accept: bool) -> Friendship:
        record = self._storage.get_friendship(responder, requester)
        if record is None or record.state != "pending":
            raise ConflictError("not_pending", "no pending friend request for this pair")
        if record.addressee_id != responder:
            raise PermissionDenied("not_addressee", "only the addressee may respond")
        state = "accepted" if accept else "rejected"
        self._storage.update_friendship_state(responder, requester, state, self._now())
        return Friendship(
            requester_id=record.requester_id,
            addressee_id=record.addressee_id,
            state=state,
            updated_at=self._now(),
        )

    def is_friends(self, a: str, b: str) -> bool:
        record = self._storage.get_friendship(a, b)
        return record is not None and record.state == "accepted"

    # -- posts -----------------------------------------------------------------

    def create_post(self, author_id: str, body: str, media_ref: Optional[str] = None) -> str:
        """Persist a post; raises UnavailableError("connectivity") when the
        storage backend is unreachable, leaving no partial row."""
        if not body.strip() and not media_ref:
            raise ValidationError("empty", "a post needs text or a media reference")
        post = Post(
            post_id=new_id("p"),
            author_id=author_id,
            body=body,
            media_ref=media_ref,
            created_at=self._now(),
        )
        self._storage.put_post(post)
        return post.post_id

    def list_posts(self, author_id: str) -> list[Post]:
        self._storage.get_user(author_id)
        return self._storage.list_posts_by_author(author_id)

    # -- chat ------------------------------------------------------------------

    def send_message(self, sender: str, recipient: str, body: str) -> Message:
        if not body.strip():
            raise ValidationError("empty_body", "message body must not be empty")
        if not self.is_friends(sender, recipient):
            raise PermissionDenied("not_friends", "chat is limited to accepted friends")
        return self._storage.append_message(sender, recipient, body, self._now())

    def fetch_conversation(self, user: str, other: str, since_seq: int = 0) -> ConversationView:
        if user == other:
            raise PermissionDenied("not_participant", "no conversation with yourself")
        messages = self._storage.list_messages(user, other, since_seq=since_seq)
        return ConversationView(participants=(user, other), messages=messages)
