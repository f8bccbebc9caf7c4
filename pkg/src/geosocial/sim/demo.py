"""Seed a running service with demo users, friendships, posts, chats,
and location fixes in several cities, so the map/chat demo is
reproducible against a fresh database.

Reruns report conflicts (duplicate emails, existing friendships) and
skip dependent writes for already-present users, so no duplicate demo
content accumulates.
"""

from __future__ import annotations

from typing import Optional

import httpx

DEMO_PASSWORD = "demopass-123"

DEMO_USERS = [
    {
        "first_name": "Ada", "last_name": "Obi", "email": "ada.obi@example.com",
        "country": "Nigeria", "gender": "female", "date_of_birth": "1992-04-11",
        "city": ("Benin City", 6.3350, 5.6037),
    },
    {
        "first_name": "Bassey", "last_name": "Okon", "email": "bassey.okon@example.com",
        "country": "Nigeria", "gender": "male", "date_of_birth": "1990-09-02",
        "city": ("Aba", 5.1066, 7.3667),
    },
    {
        "first_name": "Chidi", "last_name": "Eze", "email": "chidi.eze@example.com",
        "country": "Nigeria", "gender": "male", "date_of_birth": "1988-01-23",
        "city": ("Port Harcourt", 4.8156, 7.0498),
    },
    {
        "first_name": "Dara", "last_name": "Adeyemi", "email": "dara.adeyemi@example.com",
        "country": "Nigeria", "gender": "female", "date_of_birth": "1995-07-30",
        "city": ("Lagos", 6.5244, 3.3792),
    },
    {
        "first_name": "Efe", "last_name": "Agho", "email": "efe.agho@example.com",
        "country": "Nigeria", "gender": "female", "date_of_birth": "1993-12-05",
        "city": ("Abuja", 9.0765, 7.3986),
    },
]

DEMO_MESSAGES = [
    (0, 1, "hello from Benin City!"),
    (1, 0, "greetings from Aba"),
    (2, 3, "Port Harcourt checking in"),
    (3, 4, "Lagos says hi"),
]


def seed_demo(url: str, client: Optional[httpx.Client] = None) -> dict:
    """Populate the service at ``url``; returns a summary of what happened."""
    own_client = client is None
    http = client or httpx.Client(base_url=url, timeout=10.0)
    summary = {
        "users_created": 0,
        "friendships_created": 0,
        "posts_created": 0,
        "messages_sent": 0,
        "fixes_recorded": 0,
        "cities": [],
        "conflicts": [],
    }
    try:
        http.get("/health").raise_for_status()

        tokens: dict[int, str] = {}
        fresh: set[int] = set()
        for i, user in enumerate(DEMO_USERS):
            payload = {k: user[k] for k in
                       ("first_name", "last_name", "email", "country", "gender", "date_of_birth")}
            payload["password"] = DEMO_PASSWORD
            response = http.post("/signup", json=payload)
            if response.status_code == 201:
                summary["users_created"] += 1
                fresh.add(i)
            elif response.status_code == 409:
                summary["conflicts"].append(f"signup:{user['email']}")
            else:
                response.raise_for_status()
            login = http.post("/login", json={"email": user["email"], "password": DEMO_PASSWORD})
            login.raise_for_status()
            tokens[i] = login.json()["token"]

        def auth(i: int) -> dict:
            return {"Authorization": f"Bearer {tokens[i]}"}

        ids: dict[int, str] = {}
        for i, user in enumerate(DEMO_USERS):
            found = http.get(
                "/profiles", params={"q": user["email"], "limit": 1}, headers=auth(i)
            )
            found.raise_for_status()
            ids[i] = found.json()["matches"][0]["user_id"]

        for i in range(len(DEMO_USERS)):
            for j in range(i + 1, len(DEMO_USERS)):
                response = http.post(f"/friends/{ids[j]}/request", headers=auth(i))
                if response.status_code == 201:
                    accept = http.post(
                        f"/friends/{ids[i]}/respond", json={"accept": True}, headers=auth(j)
                    )
                    accept.raise_for_status()
                    summary["friendships_created"] += 1
                elif response.status_code == 409:
                    summary["conflicts"].append(f"friendship:{i}-{j}")
                else:
                    response.raise_for_status()

        for i, user in enumerate(DEMO_USERS):
            if i not in fresh:
                continue
            city, lat, lon = user["city"]
            post = http.post(
                "/posts",
                json={"body": f"{user['first_name']} joined from {city}"},
                headers=auth(i),
            )
            post.raise_for_status()
            summary["posts_created"] += 1
            fix = http.post("/location/fixes", json={"lat": lat, "lon": lon}, headers=auth(i))
            fix.raise_for_status()
            summary["fixes_recorded"] += 1
            summary["cities"].append(city)

        for sender, recipient, text in DEMO_MESSAGES:
            if sender not in fresh and recipient not in fresh:
                continue
            response = http.post(
                "/messages", json={"to": ids[recipient], "body": text}, headers=auth(sender)
            )
            response.raise_for_status()
            summary["messages_sent"] += 1

        return summary
    finally:
        if own_client:
            http.close()
