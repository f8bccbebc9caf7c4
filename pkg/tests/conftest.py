from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).parent))

from geosocial.api import Backend, create_app, create_backend
from geosocial.config import ServiceConfig, packaged_places_path
from geosocial.storage import Storage

#: Low PBKDF2 cost so test suites that sign up many users stay fast.
FAST_PBKDF2 = 600


class ManualClock:
    """Deterministic, manually advanced clock for expiry tests."""

    def __init__(self, start: datetime | None = None):
        self.current = start or datetime(2024, 1, 1, tzinfo=timezone.utc)

    def now(self) -> datetime:
        return self.current

    def advance(self, **kwargs) -> None:
        self.current += timedelta(**kwargs)


def make_signup_fields(**overrides) -> dict:
    fields = {
        "first_name": "Ada",
        "last_name": "Obi",
        "password": "longenough1",
        "email": "ada@example.com",
        "country": "Nigeria",
        "gender": "female",
        "date_of_birth": "1992-04-11",
    }
    fields.update(overrides)
    return fields


@pytest.fixture
def storage(tmp_path) -> Storage:
    store = Storage(str(tmp_path / "test.db"))
    store.migrate()
    return store


@pytest.fixture
def service_config(tmp_path) -> ServiceConfig:
    return ServiceConfig(
        bind_address="127.0.0.1:0",
        db_path=str(tmp_path / "service.db"),
        places_dataset_path=packaged_places_path(),
    )


@pytest.fixture
def backend(service_config) -> Backend:
    return create_backend(service_config, pbkdf2_iterations=FAST_PBKDF2)


@pytest.fixture
def client(backend) -> TestClient:
    with TestClient(create_app(backend)) as test_client:
        yield test_client


def signup_and_login(client: TestClient, email: str, name: str = "User") -> tuple[str, str]:
    """Create an account and return (user_id, bearer token)."""
    fields = make_signup_fields(email=email, first_name=name, last_name="Test")
    created = client.post("/signup", json=fields)
    assert created.status_code == 201, created.text
    logged_in = client.post("/login", json={"email": email, "password": fields["password"]})
    assert logged_in.status_code == 200, logged_in.text
    return created.json()["user_id"], logged_in.json()["token"]


def auth_header(token: str) -> dict:
    return {"Authorization": f"Bearer {token}"}
