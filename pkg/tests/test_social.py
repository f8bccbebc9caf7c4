import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from geosocial.domain import build_profile
from geosocial.errors import (
    ConflictError,
    NotFoundError,
    PermissionDenied,
    UnavailableError,
    ValidationError,
)
from geosocial.social import SocialGraph

from conftest import make_signup_fields


@pytest.fixture
def social(storage):
    return SocialGraph(storage)


def add_user(storage, email, first="Ada", last="Obi", country="Nigeria"):
    profile = build_profile(
        make_signup_fields(email=email, first_name=first, last_name=last, country=country)
    )
    storage.put_user(profile)
    return profile.user_id


def befriend(social, a, b):
    social.request_friend(a, b)
    social.respond_friend(b, a, accept=True)


class TestSearch:
    def test_substring_match(self, storage, social):
        uid = add_user(storage, "ada@example.com", "Ada", "Obi")
        matches = social.search_profiles("ada", 10)
        assert [m.user_id for m in matches] == [uid]

    def test_no_match_is_empty(self, storage, social):
        add_user(storage, "ada@example.com", "Ada", "Obi")
        assert social.search_profiles("zzz", 10) == []

    def test_name_order_matches_brute_force(self, storage, social):
        add_user(storage, "b@example.com", "Ada", "B")
        add_user(storage, "a@example.com", "Ada", "A")
        matches = social.search_profiles("Ada", 10)
        assert [m.display_name for m in matches] == ["Ada A", "Ada B"]

    def test_empty_query_rejected(self, social):
        with pytest.raises(ValidationError) as err:
            social.search_profiles("   ", 10)
        assert err.value.code == "empty_query"

    def test_email_is_searchable(self, storage, social):
        uid = add_user(storage, "unique-handle@example.com", "X", "Y")
        assert [m.user_id for m in social.search_profiles("unique-handle", 5)] == [uid]

    @settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(query=st.text(st.sampled_from("adebola"), min_size=1, max_size=4))
    def test_subset_of_brute_force_scan(self, storage, social, query):
        for i, (first, last) in enumerate(
            [("Ada", "Obi"), ("Bola", "Ade"), ("Dele", "Abo"), ("Abena", "Boateng")]
        ):
            email = f"{first.lower()}.{i}.scan@example.com"
            if social.search_profiles(email, 1) == []:
                add_user(storage, email, first, last)
        users = storage.list_users()
        expected = sorted(
            (
                (u.display_name, u.user_id)
                for u in users
                if query.lower() in u.display_name.lower() or query.lower() in u.email.value.lower()
            ),
        )
        got = [(m.display_name, m.user_id) for m in social.search_profiles(query, len(users))]
        assert got == expected


class TestFriendship:
    def test_request_creates_pending(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        friendship = social.request_friend(a, b)
        assert friendship.state == "pending"

    def test_self_friend_rejected(self, storage, social):
        a = add_user(storage, "a@example.com")
        with pytest.raises(ValidationError) as err:
            social.request_friend(a, a)
        assert err.value.code == "self_friend"

    def test_reverse_request_is_already_exists(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        social.request_friend(a, b)
        with pytest.raises(ConflictError) as err:
            social.request_friend(b, a)
        assert err.value.code == "already_exists"

    def test_unknown_user_rejected(self, storage, social):
        a = add_user(storage, "a@example.com")
        with pytest.raises(NotFoundError) as err:
            social.request_friend(a, "ghost")
        assert err.value.code == "unknown_user"

    def test_accept_and_reject_transitions(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        c = add_user(storage, "c@example.com")
        social.request_friend(a, b)
        assert social.respond_friend(b, a, accept=True).state == "accepted"
        social.request_friend(a, c)
        assert social.respond_friend(c, a, accept=False).state == "rejected"

    def test_requester_cannot_accept_own_request(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        social.request_friend(a, b)
        with pytest.raises(PermissionDenied) as err:
            social.respond_friend(a, b, accept=True)
        assert err.value.code == "not_addressee"

    def test_double_accept_is_not_pending(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        social.request_friend(a, b)
        social.respond_friend(b, a, accept=True)
        with pytest.raises(ConflictError) as err:
            social.respond_friend(b, a, accept=True)
        assert err.value.code == "not_pending"

    def test_symmetry(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        assert social.is_friends(a, b) == social.is_friends(b, a) == False
        befriend(social, a, b)
        assert social.is_friends(a, b) == social.is_friends(b, a) == True


class TestPosts:
    def test_create_and_list(self, storage, social):
        a = add_user(storage, "a@example.com")
        post_id = social.create_post(a, "hello")
        assert [p.post_id for p in social.list_posts(a)] == [post_id]

    def test_empty_post_rejected(self, storage, social):
        a = add_user(storage, "a@example.com")
        with pytest.raises(ValidationError) as err:
            social.create_post(a, "", None)
        assert err.value.code == "empty"

    def test_media_only_post_allowed(self, storage, social):
        a = add_user(storage, "a@example.com")
        post_id = social.create_post(a, "", media_ref="blob:123")
        assert social.list_posts(a)[0].post_id == post_id

    def test_offline_storage_is_connectivity_error_and_atomic(self, storage, social):
        a = add_user(storage, "a@example.com")
        storage.set_offline(True)
        with pytest.raises(UnavailableError) as err:
            social.create_post(a, "will not persist")
        assert err.value.code == "connectivity"
        storage.set_offline(False)
        assert social.list_posts(a) == []


class TestChat:
    def test_first_message_gets_seq_one(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        befriend(social, a, b)
        assert social.send_message(a, b, "hi").seq == 1
        assert social.send_message(a, b, "again").seq == 2

    def test_non_friends_cannot_chat(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        with pytest.raises(PermissionDenied) as err:
            social.send_message(a, b, "hi")
        assert err.value.code == "not_friends"

    def test_pending_is_not_enough(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        social.request_friend(a, b)
        with pytest.raises(PermissionDenied):
            social.send_message(a, b, "hi")

    def test_empty_body_rejected(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        befriend(social, a, b)
        with pytest.raises(ValidationError) as err:
            social.send_message(a, b, "  ")
        assert err.value.code == "empty_body"

    def test_interleaved_conversation_preserves_send_order(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        befriend(social, a, b)
        log = [(a, "one"), (b, "two"), (a, "three")]
        for sender, text in log:
            social.send_message(sender, b if sender == a else a, text)
        view = social.fetch_conversation(a, b)
        assert [m.seq for m in view.messages] == [1, 2, 3]
        assert [(m.sender_id, m.body) for m in view.messages] == [
            (sender, text) for sender, text in log
        ]

    def test_empty_conversation(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        assert social.fetch_conversation(a, b).messages == []

    def test_since_seq_cursor(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        befriend(social, a, b)
        for i in range(4):
            social.send_message(a, b, f"m{i}")
        view = social.fetch_conversation(b, a, since_seq=2)
        assert [m.seq for m in view.messages] == [3, 4]

    def test_gap_free_ascending_seq(self, storage, social):
        a = add_user(storage, "a@example.com")
        b = add_user(storage, "b@example.com")
        befriend(social, a, b)
        for i in range(7):
            sender, recipient = (a, b) if i % 2 else (b, a)
            social.send_message(sender, recipient, f"m{i}")
        seqs = [m.seq for m in social.fetch_conversation(a, b).messages]
        assert seqs == list(range(1, 8))
